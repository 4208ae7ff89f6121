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

#include "cfl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cfl/fading.hpp"
#include "cfl/selection.hpp"

namespace cfl {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Rng::next_u64() {
  state_ += 0x9E3779B97F4A7C15ull;
  return mix64(state_);
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  // Box-Muller, cosine branch only: stateless pairs keep draws independent
  // of call history.
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

long long Rng::uniform_int(long long lo, long long hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<long long>(next_u64() % span);
}

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t point,
                            std::uint64_t trial) {
  std::uint64_t h = mix64(seed ^ 0x7A17E5D1B564A9C3ull);
  h = mix64(h ^ (point + 0x165667B19E3779F9ull));
  h = mix64(h ^ (trial + 0x27D4EB2F165667C5ull));
  return h;
}

namespace {

const std::vector<std::string> kFadingDecoders = {"conventional", "ida",
                                                  "exhaustive-ml"};
const std::vector<std::string> kGaussianDecoders = {
    "conventional", "map-augmented", "map-gdfe", "exhaustive-map"};

bool known_decoder(Scenario s, const std::string& name) {
  const auto& names =
      s == Scenario::kFading1d ? kFadingDecoders : kGaussianDecoders;
  return std::find(names.begin(), names.end(), name) != names.end();
}

double fading_symbol_variance(long long s_max) {
  // Discrete uniform on the integers of [-s_max, s_max].
  const double s = static_cast<double>(s_max);
  return s * (s + 1.0) / 3.0;
}

}  // namespace

void validate_config(const SimConfig& cfg) {
  if (cfg.snr_db.empty()) throw ConfigError("snr_db grid is empty");
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  if (cfg.decoders.empty()) throw ConfigError("decoder list is empty");
  for (const std::string& d : cfg.decoders) {
    if (!known_decoder(cfg.scenario, d)) {
      throw ConfigError("unknown decoder '" + d + "' for this scenario");
    }
  }
  if (cfg.scenario == Scenario::kFading1d) {
    if (cfg.fading.s_max < 1) throw ConfigError("s_max must be >= 1");
    if (cfg.fading.max_coeff < 0) throw ConfigError("max_coeff must be >= 0");
    if (cfg.fading.conventional_max_coeff &&
        *cfg.fading.conventional_max_coeff < 0) {
      throw ConfigError("conventional_max_coeff must be >= 0");
    }
    if (cfg.fading.fixed_h && cfg.fading.fixed_h->size() != 2) {
      throw ConfigError("fixed_h must have exactly 2 entries");
    }
  } else {
    const Mat& fine = cfg.gaussian.fine;
    const Mat& coarse = cfg.gaussian.coarse;
    if (fine.rows() == 0 || fine.rows() != fine.cols()) {
      throw ConfigError("fine generator must be square and nonempty");
    }
    if (coarse.rows() != fine.rows() || coarse.cols() != fine.cols()) {
      throw ConfigError("coarse generator dimensions must match fine");
    }
    if (cfg.gaussian.n_sources < 1) throw ConfigError("n_sources must be >= 1");
  }
}

namespace {

using nlohmann::json;

Mat parse_matrix(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(what + " must be a nonempty array of rows");
  }
  const std::size_t rows = j.size();
  if (!j[0].is_array()) throw ConfigError(what + " rows must be arrays");
  const std::size_t cols = j[0].size();
  Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw ConfigError(what + " rows must have equal length");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          j[i][k].get<double>();
    }
  }
  return m;
}

std::vector<double> parse_snr_grid(const json& j) {
  std::vector<double> grid;
  if (j.is_array()) {
    for (const auto& v : j) grid.push_back(v.get<double>());
  } else if (j.is_object()) {
    const double start = j.at("start").get<double>();
    const double stop = j.at("stop").get<double>();
    const double step = j.at("step").get<double>();
    if (step <= 0 || stop < start) {
      throw ConfigError("snr_db range needs step > 0 and stop >= start");
    }
    for (double s = start; s <= stop + 1e-9; s += step) grid.push_back(s);
  } else {
    throw ConfigError("snr_db must be an array or {start, stop, step}");
  }
  return grid;
}

}  // namespace

SimConfig parse_sim_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("JSON parse failure: ") + e.what());
  }
  try {
    SimConfig cfg;
    const std::string scenario = j.at("scenario").get<std::string>();
    if (scenario == "fading-1d") {
      cfg.scenario = Scenario::kFading1d;
    } else if (scenario == "gaussian-map") {
      cfg.scenario = Scenario::kGaussianMap;
    } else {
      throw ConfigError("scenario must be fading-1d or gaussian-map");
    }
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.snr_db = parse_snr_grid(j.at("snr_db"));
    cfg.trials = j.value("trials", std::uint64_t{100000});
    cfg.stop_errors = j.value("stop_errors", std::uint64_t{100});
    cfg.decoders = j.at("decoders").get<std::vector<std::string>>();
    cfg.out = j.value("out", std::string{});
    if (cfg.scenario == Scenario::kFading1d) {
      const json f = j.value("fading", json::object());
      cfg.fading.s_max = f.value("s_max", 5LL);
      cfg.fading.max_coeff = f.value("max_coeff", 0LL);
      if (f.contains("conventional_max_coeff")) {
        cfg.fading.conventional_max_coeff =
            f.at("conventional_max_coeff").get<long long>();
      }
      if (f.contains("fixed_h")) {
        const auto v = f.at("fixed_h").get<std::vector<double>>();
        Vec h(static_cast<Eigen::Index>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) {
          h(static_cast<Eigen::Index>(i)) = v[i];
        }
        cfg.fading.fixed_h = h;
      }
    } else {
      const json& g = j.at("gaussian");
      cfg.gaussian.fine = parse_matrix(g.at("fine"), "gaussian.fine");
      const json& coarse = g.at("coarse");
      if (coarse.is_object() && coarse.contains("scale")) {
        cfg.gaussian.coarse =
            coarse.at("scale").get<double>() *
            Mat::Identity(cfg.gaussian.fine.rows(), cfg.gaussian.fine.cols());
      } else {
        cfg.gaussian.coarse = parse_matrix(coarse, "gaussian.coarse");
      }
      cfg.gaussian.n_sources = g.value("n_sources", 2);
      cfg.gaussian.max_index = g.value("max_index", std::uint64_t{1000000});
      cfg.gaussian.max_support = g.value("max_support", std::uint64_t{1000000});
      if (g.contains("power")) {
        cfg.gaussian.power = g.at("power").get<double>();
      }
    }
    validate_config(cfg);
    return cfg;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_sim_config(ss.str());
}

void run_fading_trial(const SimConfig& cfg, double sigma2, StreamId id,
                      TrialRecord& out) {
  const long long s_max = cfg.fading.s_max;
  out.stream = derive_stream(cfg.seed, id.point, id.trial);
  Rng rng(out.stream);
  const long long x1 = rng.uniform_int(-s_max, s_max);
  const long long x2 = rng.uniform_int(-s_max, s_max);
  Vec h(2);
  if (cfg.fading.fixed_h) {
    h = *cfg.fading.fixed_h;
  } else {
    h(0) = rng.normal();
    h(1) = rng.normal();
  }
  const double z = rng.normal() * std::sqrt(sigma2);
  const double rho = fading_symbol_variance(s_max) / sigma2;

  const auto select = [&](long long budget) {
    return budget > 0 ? optimal_coefficients(h, rho, budget)
                      : optimal_coefficients(h, rho);
  };
  const IntVec a = select(cfg.fading.max_coeff);
  const double alpha = optimal_alpha(h, a, rho);
  const double y = h(0) * static_cast<double>(x1) +
                   h(1) * static_cast<double>(x2) + z;
  const ScaledObservation obs = scale_observation(y, h, sigma2, alpha);
  const long long t_true = a(0) * x1 + a(1) * x2;

  // Optional low-complexity baseline: the conventional decoder selects its
  // own combination under a separate budget and is scored against it.
  IntVec a_conv = a;
  double alpha_conv = alpha;
  ScaledObservation obs_conv = obs;
  long long t_conv = t_true;
  const bool split = cfg.fading.conventional_max_coeff.has_value();
  if (split) {
    a_conv = select(*cfg.fading.conventional_max_coeff);
    alpha_conv = optimal_alpha(h, a_conv, rho);
    obs_conv = scale_observation(y, h, sigma2, alpha_conv);
    t_conv = a_conv(0) * x1 + a_conv(1) * x2;
  }

  out.drawn = {static_cast<double>(x1), static_cast<double>(x2), h(0), h(1),
               z,  alpha, static_cast<double>(a(0)), static_cast<double>(a(1))};
  if (split) {
    out.drawn.push_back(alpha_conv);
    out.drawn.push_back(static_cast<double>(a_conv(0)));
    out.drawn.push_back(static_cast<double>(a_conv(1)));
  }
  out.truth.resize(cfg.decoders.size());
  out.correct.resize(cfg.decoders.size());
  for (std::size_t d = 0; d < cfg.decoders.size(); ++d) {
    const std::string& name = cfg.decoders[d];
    long long t_hat = 0;
    long long t_target = t_true;
    if (name == "conventional") {
      t_hat = conventional_decode_1d(obs_conv, a_conv(0), a_conv(1), s_max);
      t_target = t_conv;
    } else if (name == "ida") {
      try {
        const LikelihoodGeometry geom = make_geometry(obs, a(0), a(1), s_max);
        t_hat = ida_decode(geom, obs, s_max).t;
      } catch (const DegenerateGeometry&) {
        t_hat = exhaustive_ml_decode(obs, a(0), a(1), s_max);
      }
    } else {  // exhaustive-ml
      t_hat = exhaustive_ml_decode(obs, a(0), a(1), s_max);
    }
    out.truth[d] = t_target;
    out.correct[d] = (t_hat == t_target) ? 1 : 0;
  }
}

GaussianWorkspace make_gaussian_workspace(const GaussianConfig& cfg) {
  GaussianWorkspace ws;
  ws.code = std::make_unique<NestedLatticeCode>(
      build_nested_code(cfg.fine, cfg.coarse, cfg.max_index));
  if (cfg.power && ws.code->second_moment_per_dim > *cfg.power + 1e-12) {
    std::ostringstream os;
    os << "codebook second moment " << ws.code->second_moment_per_dim
       << " exceeds the configured power " << *cfg.power;
    throw ConfigError(os.str());
  }
  ws.sum = build_sum_codebook(*ws.code, cfg.n_sources, cfg.max_support);
  return ws;
}

void run_gaussian_trial(const SimConfig& cfg, const GaussianWorkspace& ws,
                        double sigma2, StreamId id, TrialRecord& out) {
  const NestedLatticeCode& code = *ws.code;
  const Eigen::Index n = code.dim();
  out.stream = derive_stream(cfg.seed, id.point, id.trial);
  Rng rng(out.stream);
  IntVec u_true = IntVec::Zero(n);
  Vec y = Vec::Zero(n);
  for (int s = 0; s < cfg.gaussian.n_sources; ++s) {
    const long long idx =
        rng.uniform_int(0, static_cast<long long>(code.coeffs.size()) - 1);
    u_true += code.coeffs[static_cast<std::size_t>(idx)];
    y += code.codewords[static_cast<std::size_t>(idx)];
  }
  const double sigma = std::sqrt(sigma2);
  for (Eigen::Index i = 0; i < n; ++i) y(i) += sigma * rng.normal();
  const double beta = noise_ratio(sigma, ws.sum.sigma_s2);

  out.drawn.assign(y.data(), y.data() + n);
  out.truth.assign(u_true.data(), u_true.data() + n);
  out.correct.resize(cfg.decoders.size());
  IntVec u_hat(n);
  for (std::size_t d = 0; d < cfg.decoders.size(); ++d) {
    const std::string& name = cfg.decoders[d];
    if (name == "conventional") {
      conventional_decode(y, ws.sum, beta, /*constrain_to_support=*/false,
                          &u_hat);
    } else if (name == "map-augmented") {
      map_decode_augmented(y, ws.sum, beta, &u_hat);
    } else if (name == "map-gdfe") {
      const GdfeFilters filters = mmse_gdfe_filters(beta, n);
      map_decode_gdfe(y, ws.sum, filters, &u_hat);
    } else {  // exhaustive-map
      exhaustive_map_decode(y, ws.sum, sigma2, &u_hat);
    }
    out.correct[d] = (u_hat == u_true) ? 1 : 0;
  }
}

namespace {

int worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("CF_LATTICE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
  }
  return static_cast<int>(hw);
}

}  // namespace

std::vector<ErrorRateCurve> sweep(const SimConfig& cfg) {
  validate_config(cfg);
  GaussianWorkspace ws;
  double sigma_x2 = 0.0;
  if (cfg.scenario == Scenario::kGaussianMap) {
    ws = make_gaussian_workspace(cfg.gaussian);
    sigma_x2 = ws.code->second_moment_per_dim;
  } else {
    sigma_x2 = fading_symbol_variance(cfg.fading.s_max);
  }

  const int threads = worker_count();
  constexpr std::uint64_t kBatch = 4096;
  const std::size_t n_dec = cfg.decoders.size();

  std::vector<ErrorRateCurve> curves(n_dec);
  for (std::size_t d = 0; d < n_dec; ++d) curves[d].decoder = cfg.decoders[d];

  for (std::size_t p = 0; p < cfg.snr_db.size(); ++p) {
    const double sigma2 = sigma_x2 / snr_from_db(cfg.snr_db[p]);
    std::vector<std::uint64_t> errors(n_dec, 0);
    std::uint64_t done = 0;
    while (done < cfg.trials) {
      const std::uint64_t batch = std::min<std::uint64_t>(kBatch, cfg.trials - done);
      auto run_range = [&](std::uint64_t lo, std::uint64_t hi,
                           std::vector<std::uint64_t>& err_acc) {
        TrialRecord rec;
        for (std::uint64_t t = lo; t < hi; ++t) {
          const StreamId id{p, done + t};
          if (cfg.scenario == Scenario::kFading1d) {
            run_fading_trial(cfg, sigma2, id, rec);
          } else {
            run_gaussian_trial(cfg, ws, sigma2, id, rec);
          }
          for (std::size_t d = 0; d < n_dec; ++d) {
            if (!rec.correct[d]) ++err_acc[d];
          }
        }
      };
      if (threads <= 1 || batch < 2 * kBatch / static_cast<std::uint64_t>(threads) + 1) {
        run_range(0, batch, errors);
      } else {
        std::vector<std::vector<std::uint64_t>> acc(
            static_cast<std::size_t>(threads), std::vector<std::uint64_t>(n_dec, 0));
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (batch + threads - 1) / threads;
        for (int w = 0; w < threads; ++w) {
          const std::uint64_t lo = std::min<std::uint64_t>(batch, w * chunk);
          const std::uint64_t hi = std::min<std::uint64_t>(batch, lo + chunk);
          if (lo >= hi) break;
          pool.emplace_back(run_range, lo, hi,
                            std::ref(acc[static_cast<std::size_t>(w)]));
        }
        for (auto& th : pool) th.join();
        for (const auto& a : acc) {
          for (std::size_t d = 0; d < n_dec; ++d) errors[d] += a[d];
        }
      }
      done += batch;
      if (cfg.stop_errors > 0) {
        bool all_met = true;
        for (std::size_t d = 0; d < n_dec; ++d) {
          if (errors[d] < cfg.stop_errors) all_met = false;
        }
        if (all_met) break;
      }
    }
    for (std::size_t d = 0; d < n_dec; ++d) {
      CurvePoint pt;
      pt.snr_db = cfg.snr_db[p];
      pt.trials = done;
      pt.errors = errors[d];
      pt.pe = done > 0 ? static_cast<double>(errors[d]) / static_cast<double>(done)
                       : 0.0;
      pt.ci95_half = wilson_interval(errors[d], done).half_width;
      curves[d].points.push_back(pt);
    }
  }
  return curves;
}

void write_csv(const SimConfig& cfg, const std::vector<ErrorRateCurve>& curves,
               std::ostream& os) {
  const char* scenario =
      cfg.scenario == Scenario::kFading1d ? "fading-1d" : "gaussian-map";
  os << "scenario,decoder,snr_db,trials,errors,pe,ci95_half\n";
  char buf[512];
  for (const ErrorRateCurve& c : curves) {
    for (const CurvePoint& p : c.points) {
      std::snprintf(buf, sizeof(buf), "%s,%s,%.10g,%llu,%llu,%.10g,%.10g\n",
                    scenario, c.decoder.c_str(), p.snr_db,
                    static_cast<unsigned long long>(p.trials),
                    static_cast<unsigned long long>(p.errors), p.pe,
                    p.ci95_half);
      os << buf;
    }
  }
}

WilsonInterval wilson_interval(std::uint64_t errors, std::uint64_t trials) {
  if (trials == 0) return {0.0, 0.0};
  constexpr double z = 1.959963984540054;  // 97.5% standard-normal quantile
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(errors) / n;
  const double z2n = z * z / n;
  const double denom = 1.0 + z2n;
  const double center = (p + z2n / 2.0) / denom;
  const double half =
      (z / denom) * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n));
  return {center, half};
}

double fit_log10_slope(const std::vector<CurvePoint>& points, double snr_min,
                       double snr_max) {
  std::vector<std::pair<double, double>> xy;
  for (const CurvePoint& p : points) {
    if (p.snr_db < snr_min - 1e-9 || p.snr_db > snr_max + 1e-9) continue;
    if (p.errors == 0) continue;
    xy.emplace_back(p.snr_db, std::log10(p.pe));
  }
  if (xy.size() < 2) {
    throw Error("slope fit needs at least two points with errors");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : xy) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(xy.size());
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

std::optional<double> snr_at_pe(const std::vector<CurvePoint>& points,
                                double target_pe) {
  const double lt = std::log10(target_pe);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const CurvePoint& a = points[i - 1];
    const CurvePoint& b = points[i];
    if (a.errors == 0 || b.errors == 0) continue;
    const double la = std::log10(a.pe);
    const double lb = std::log10(b.pe);
    if ((la - lt) * (lb - lt) > 0.0) continue;  // no crossing in this segment
    if (la == lb) return a.snr_db;
    return a.snr_db + (b.snr_db - a.snr_db) * (lt - la) / (lb - la);
  }
  return std::nullopt;
}

}  // namespace cfl
