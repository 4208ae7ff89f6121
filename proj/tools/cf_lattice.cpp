// Copyright 2026 the cf-lattice authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// cf-lattice: command-line front end over the decoding library.
//
//   cf-lattice rate               alpha/rate for a channel and combination
//   cf-lattice coeffs             rate-optimal integer combination
//   cf-lattice likelihood-profile per-combination likelihood table (CSV t,phi)
//   cf-lattice bound              union bound vs SNR (CSV)
//   cf-lattice sim-fading         Monte Carlo sweep, scalar fading scenario
//   cf-lattice sim-gaussian       Monte Carlo sweep, Gaussian sum scenario
//
// Every subcommand reads a JSON config (--config); --out redirects the
// output (default stdout); the sim subcommands accept --seed to override
// the config's seed.  Exit code 0 on success, 2 on any configuration or
// input error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cfl/fading.hpp"
#include "cfl/gaussian.hpp"
#include "cfl/selection.hpp"
#include "cfl/sim.hpp"

namespace {

using cfl::ConfigError;
using cfl::IntVec;
using cfl::Mat;
using cfl::Vec;
using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("JSON parse failure: ") + e.what());
  }
}

Vec get_vec(const json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw ConfigError("config needs array field '" + key + "'");
  }
  const auto v = j.at(key).get<std::vector<double>>();
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = v[i];
  }
  return out;
}

IntVec get_int_vec(const json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw ConfigError("config needs integer array field '" + key + "'");
  }
  const auto v = j.at(key).get<std::vector<long long>>();
  IntVec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = v[i];
  }
  return out;
}

double get_num(const json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ConfigError("config needs numeric field '" + key + "'");
  }
  return j.at(key).get<double>();
}

Mat get_mat(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("config needs matrix field '" + key + "'");
  const json& m = j.at(key);
  if (!m.is_array() || m.empty() || !m[0].is_array()) {
    throw ConfigError("field '" + key + "' must be an array of rows");
  }
  const std::size_t rows = m.size();
  const std::size_t cols = m[0].size();
  Mat out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!m[i].is_array() || m[i].size() != cols) {
      throw ConfigError("field '" + key + "' rows must have equal length");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          m[i][k].get<double>();
    }
  }
  return out;
}

std::vector<double> get_snr_grid(const json& j) {
  if (!j.contains("snr_db")) throw ConfigError("config needs 'snr_db'");
  const json& s = j.at("snr_db");
  std::vector<double> grid;
  if (s.is_number()) {
    grid.push_back(s.get<double>());
  } else if (s.is_array()) {
    for (const auto& v : s) grid.push_back(v.get<double>());
  } else if (s.is_object()) {
    const double start = s.at("start").get<double>();
    const double stop = s.at("stop").get<double>();
    const double step = s.at("step").get<double>();
    if (step <= 0 || stop < start) {
      throw ConfigError("snr_db range needs step > 0 and stop >= start");
    }
    for (double x = start; x <= stop + 1e-9; x += step) grid.push_back(x);
  } else {
    throw ConfigError("snr_db must be a number, array, or {start,stop,step}");
  }
  if (grid.empty()) throw ConfigError("snr_db grid is empty");
  return grid;
}

// All emitters write to --out when given, else stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ConfigError("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string format_int_vec(const IntVec& v) {
  std::ostringstream os;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ' ';
    os << v(i);
  }
  return os.str();
}

void run_rate(const std::string& config_path, const std::string& out_path) {
  const json j = load_json(config_path);
  const Vec h = get_vec(j, "h");
  const double snr_db = get_num(j, "snr_db");
  const double rho = cfl::snr_from_db(snr_db);
  const IntVec a =
      j.contains("a") ? get_int_vec(j, "a") : cfl::optimal_coefficients(h, rho);
  if (a.size() != h.size()) throw ConfigError("'a' and 'h' lengths differ");
  const double alpha =
      j.contains("alpha") ? get_num(j, "alpha") : cfl::optimal_alpha(h, a, rho);
  const double rate = cfl::computation_rate(h, a, rho, alpha);

  Output out(out_path);
  char buf[256];
  out.stream() << "key,value\n";
  std::snprintf(buf, sizeof(buf), "snr_db,%.10g\n", snr_db);
  out.stream() << buf;
  out.stream() << "a," << format_int_vec(a) << "\n";
  std::snprintf(buf, sizeof(buf), "alpha,%.10g\nrate,%.10g\n", alpha, rate);
  out.stream() << buf;
}

void run_coeffs(const std::string& config_path, const std::string& out_path) {
  const json j = load_json(config_path);
  const Vec h = get_vec(j, "h");
  const double snr_db = get_num(j, "snr_db");
  const double rho = cfl::snr_from_db(snr_db);
  const IntVec a = cfl::optimal_coefficients(h, rho);
  const Mat gram = cfl::coefficient_gram(h, rho);
  const Vec af = a.cast<double>();
  const double quad = af.dot(gram * af);
  const double alpha = cfl::optimal_alpha(h, a, rho);
  const double rate = cfl::computation_rate(h, a, rho, alpha);

  Output out(out_path);
  char buf[256];
  out.stream() << "key,value\n";
  std::snprintf(buf, sizeof(buf), "snr_db,%.10g\n", snr_db);
  out.stream() << buf;
  out.stream() << "a," << format_int_vec(a) << "\n";
  std::snprintf(buf, sizeof(buf),
                "quadratic_form,%.10g\nalpha,%.10g\nrate,%.10g\n", quad, alpha,
                rate);
  out.stream() << buf;
}

void run_profile(const std::string& config_path, const std::string& out_path) {
  const json j = load_json(config_path);
  const Vec h = get_vec(j, "h");
  if (h.size() != 2) throw ConfigError("'h' must have exactly 2 entries");
  const IntVec x = get_int_vec(j, "x");
  if (x.size() != 2) throw ConfigError("'x' must have exactly 2 entries");
  const long long s_max = static_cast<long long>(get_num(j, "s_max"));
  if (s_max < 1) throw ConfigError("s_max must be >= 1");
  if (std::abs(x(0)) > s_max || std::abs(x(1)) > s_max) {
    throw ConfigError("'x' lies outside [-s_max, s_max]");
  }
  const double snr_db = get_num(j, "snr_db");
  const double rho = cfl::snr_from_db(snr_db);
  const double sigma_x2 =
      static_cast<double>(s_max) * (static_cast<double>(s_max) + 1.0) / 3.0;
  const double sigma2 = sigma_x2 / rho;
  const IntVec a =
      j.contains("a") ? get_int_vec(j, "a") : cfl::optimal_coefficients(h, rho);
  if (a.size() != 2) throw ConfigError("'a' must have exactly 2 entries");
  const double alpha =
      j.contains("alpha") ? get_num(j, "alpha") : cfl::optimal_alpha(h, a, rho);
  const double z = j.value("z", 0.0);

  const double y = h(0) * static_cast<double>(x(0)) +
                   h(1) * static_cast<double>(x(1)) + z;
  const cfl::ScaledObservation obs =
      cfl::scale_observation(y, h, sigma2, alpha);
  const cfl::LikelihoodGeometry geom =
      cfl::make_geometry(obs, a(0), a(1), s_max);
  const std::vector<cfl::ProfileRow> rows =
      cfl::likelihood_profile(geom, obs, s_max);

  Output out(out_path);
  out.stream() << "t,phi\n";
  char buf[128];
  for (const cfl::ProfileRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%lld,%.10g\n", r.t, r.phi);
    out.stream() << buf;
  }
}

void run_bound(const std::string& config_path, const std::string& out_path) {
  const json j = load_json(config_path);
  const Mat fine = get_mat(j, "fine");
  Mat coarse;
  if (j.contains("coarse") && j.at("coarse").is_object()) {
    coarse = j.at("coarse").at("scale").get<double>() *
             Mat::Identity(fine.rows(), fine.cols());
  } else {
    coarse = get_mat(j, "coarse");
  }
  const int n_sources = j.value("n_sources", 2);
  if (n_sources < 1) throw ConfigError("n_sources must be >= 1");
  const std::vector<double> grid = get_snr_grid(j);
  const std::uint64_t max_index = j.value("max_index", std::uint64_t{1000000});
  const std::uint64_t max_support =
      j.value("max_support", std::uint64_t{1000000});

  const cfl::NestedLatticeCode code =
      cfl::build_nested_code(fine, coarse, max_index);
  const cfl::SumCodebook sum =
      cfl::build_sum_codebook(code, n_sources, max_support);
  const double d_min = cfl::minimum_distance(code.fine);
  const double sigma_x2 = code.second_moment_per_dim;

  Output out(out_path);
  out.stream() << "snr_db,sigma,union_bound\n";
  char buf[160];
  for (double snr_db : grid) {
    const double sigma = std::sqrt(sigma_x2 / cfl::snr_from_db(snr_db));
    const double bound = cfl::union_bound(sum, d_min, sigma);
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g\n", snr_db, sigma,
                  bound);
    out.stream() << buf;
  }
}

void run_sim(const std::string& config_path, const std::string& out_path,
             const std::optional<std::uint64_t>& seed,
             cfl::Scenario expected) {
  cfl::SimConfig cfg = cfl::load_sim_config(config_path);
  if (cfg.scenario != expected) {
    throw ConfigError("config scenario does not match the subcommand");
  }
  if (seed) cfg.seed = *seed;
  if (!out_path.empty()) cfg.out = out_path;

  const std::vector<cfl::ErrorRateCurve> curves = cfl::sweep(cfg);
  Output out(cfg.out);
  cfl::write_csv(cfg, curves, out.stream());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lattice decoding toolkit for integer-combination relaying"};
  app.require_subcommand(1);

  struct Args {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
  };
  std::vector<std::string> names = {"rate",  "coeffs",     "likelihood-profile",
                                    "bound", "sim-fading", "sim-gaussian"};
  std::vector<Args> args(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    CLI::App* sub = app.add_subcommand(names[i]);
    sub->add_option("--config", args[i].config, "JSON config path")
        ->required();
    sub->add_option("--out", args[i].out, "output path (default stdout)");
    if (names[i].rfind("sim-", 0) == 0) {
      sub->add_option("--seed", args[i].seed, "override the config seed");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand("rate")) {
      run_rate(args[0].config, args[0].out);
    } else if (app.got_subcommand("coeffs")) {
      run_coeffs(args[1].config, args[1].out);
    } else if (app.got_subcommand("likelihood-profile")) {
      run_profile(args[2].config, args[2].out);
    } else if (app.got_subcommand("bound")) {
      run_bound(args[3].config, args[3].out);
    } else if (app.got_subcommand("sim-fading")) {
      run_sim(args[4].config, args[4].out, args[4].seed,
              cfl::Scenario::kFading1d);
    } else if (app.got_subcommand("sim-gaussian")) {
      run_sim(args[5].config, args[5].out, args[5].seed,
              cfl::Scenario::kGaussianMap);
    }
  } catch (const cfl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
