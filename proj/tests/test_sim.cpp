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

#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "cfl/selection.hpp"
#include "cfl/sim.hpp"

namespace {

using cfl::SimConfig;

SimConfig small_fading_config() {
  SimConfig cfg = cfl::parse_sim_config(R"({
    "scenario": "fading-1d",
    "seed": 7,
    "snr_db": [10, 20],
    "trials": 2000,
    "stop_errors": 0,
    "decoders": ["conventional", "ida"],
    "fading": {"s_max": 5, "max_coeff": 0}
  })");
  return cfg;
}

SimConfig small_gaussian_config() {
  SimConfig cfg = cfl::parse_sim_config(R"({
    "scenario": "gaussian-map",
    "seed": 3,
    "snr_db": [12],
    "trials": 1500,
    "stop_errors": 0,
    "decoders": ["conventional", "map-augmented", "map-gdfe", "exhaustive-map"],
    "gaussian": {"fine": [[2, 3], [3, -1]], "coarse": {"scale": 11}, "n_sources": 2}
  })");
  return cfg;
}

std::string csv_of(const SimConfig& cfg) {
  const auto curves = cfl::sweep(cfg);
  std::ostringstream os;
  cfl::write_csv(cfg, curves, os);
  return os.str();
}

}  // namespace

TEST_CASE("counter-based generator has sane marginals") {
  cfl::Rng rng(12345);
  const int n = 200000;
  double usum = 0, usum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    usum += u;
    usum2 += u * u;
  }
  const double umean = usum / n;
  const double uvar = usum2 / n - umean * umean;
  CHECK(std::abs(umean - 0.5) < 0.005);
  CHECK(std::abs(uvar - 1.0 / 12.0) < 0.005);

  double gsum = 0, gsum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.normal();
    gsum += g;
    gsum2 += g * g;
  }
  const double gmean = gsum / n;
  const double gvar = gsum2 / n - gmean * gmean;
  CHECK(std::abs(gmean) < 0.01);
  CHECK(std::abs(gvar - 1.0) < 0.02);

  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const long long v = rng.uniform_int(-3, 3);
    CHECK(v >= -3);
    CHECK(v <= 3);
    ++counts[static_cast<std::size_t>(v + 3)];
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("stream derivation separates points and trials") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t point = 0; point < 20; ++point) {
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
      seen.insert(cfl::derive_stream(99, point, trial));
    }
  }
  CHECK(seen.size() == 20 * 200);
  // Different seeds decorrelate the same (point, trial).
  CHECK(cfl::derive_stream(1, 0, 0) != cfl::derive_stream(2, 0, 0));
}

TEST_CASE("confidence interval golden value and edge cases") {
  // Independent evaluation of the score interval at the exact 97.5% normal
  // quantile for the binomial reference point (n=100, k=5).
  const double z = 1.959963984540054;
  const double n = 100.0, p = 0.05;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  const cfl::WilsonInterval w = cfl::wilson_interval(5, 100);
  CHECK(w.center == doctest::Approx(center).epsilon(1e-14));
  CHECK(w.half_width == doctest::Approx(half).epsilon(1e-13));
  // The rounded-quantile approximation agrees to five decimals.
  CHECK(w.center == doctest::Approx(0.0666477).epsilon(1e-5));
  CHECK(w.half_width == doctest::Approx(0.0451043).epsilon(1e-4));
  const cfl::WilsonInterval zero = cfl::wilson_interval(0, 0);
  CHECK(zero.center == 0.0);
  CHECK(zero.half_width == 0.0);
  const cfl::WilsonInterval none = cfl::wilson_interval(0, 1000);
  CHECK(none.center > 0.0);  // shrinkage keeps the interval off the axis
  CHECK(none.center - none.half_width <= 1e-12);
  const cfl::WilsonInterval all = cfl::wilson_interval(1000, 1000);
  CHECK(all.center < 1.0);
  CHECK(all.center + all.half_width >= 1.0 - 1e-12);
}

TEST_CASE("config parsing round-trips every field") {
  const SimConfig cfg = cfl::parse_sim_config(R"({
    "scenario": "fading-1d",
    "seed": 42,
    "snr_db": {"start": 10, "stop": 20, "step": 5},
    "trials": 12345,
    "stop_errors": 50,
    "decoders": ["ida", "exhaustive-ml"],
    "fading": {"s_max": 10, "max_coeff": 2, "conventional_max_coeff": 1,
               "fixed_h": [0.5, -1.25]},
    "out": "curve.csv"
  })");
  CHECK(cfg.scenario == cfl::Scenario::kFading1d);
  CHECK(cfg.seed == 42);
  REQUIRE(cfg.snr_db.size() == 3);
  CHECK(cfg.snr_db[0] == doctest::Approx(10.0));
  CHECK(cfg.snr_db[2] == doctest::Approx(20.0));
  CHECK(cfg.trials == 12345);
  CHECK(cfg.stop_errors == 50);
  REQUIRE(cfg.decoders.size() == 2);
  CHECK(cfg.decoders[1] == "exhaustive-ml");
  CHECK(cfg.fading.s_max == 10);
  CHECK(cfg.fading.max_coeff == 2);
  REQUIRE(cfg.fading.conventional_max_coeff.has_value());
  CHECK(*cfg.fading.conventional_max_coeff == 1);
  REQUIRE(cfg.fading.fixed_h.has_value());
  CHECK((*cfg.fading.fixed_h)(1) == doctest::Approx(-1.25));
  CHECK(cfg.out == "curve.csv");

  const SimConfig g = small_gaussian_config();
  CHECK(g.scenario == cfl::Scenario::kGaussianMap);
  CHECK(g.gaussian.fine(0, 1) == doctest::Approx(3.0));
  CHECK(g.gaussian.coarse(1, 1) == doctest::Approx(11.0));
  CHECK(g.gaussian.n_sources == 2);
}

TEST_CASE("config rejection: malformed and contradictory documents") {
  const auto reject = [](const std::string& text) {
    CHECK_THROWS_AS(cfl::parse_sim_config(text), cfl::ConfigError);
  };
  reject("{not json");
  reject(R"({"scenario": "unknown", "snr_db": [10], "decoders": ["ida"]})");
  reject(R"({"scenario": "fading-1d", "snr_db": [], "decoders": ["ida"]})");
  reject(R"({"scenario": "fading-1d", "snr_db": 10, "decoders": ["ida"]})");
  reject(R"({"scenario": "fading-1d", "snr_db": {"start": 20, "stop": 10, "step": 5},
             "decoders": ["ida"]})");
  reject(R"({"scenario": "fading-1d", "snr_db": [10], "trials": 0,
             "decoders": ["ida"]})");
  reject(R"({"scenario": "fading-1d", "snr_db": [10], "decoders": []})");
  reject(R"({"scenario": "fading-1d", "snr_db": [10], "decoders": ["bogus"]})");
  // Decoder names are per scenario.
  reject(R"({"scenario": "fading-1d", "snr_db": [10],
             "decoders": ["map-augmented"]})");
  reject(R"({"scenario": "gaussian-map", "snr_db": [10], "decoders": ["ida"],
             "gaussian": {"fine": [[1]], "coarse": {"scale": 4}}})");
  reject(R"({"scenario": "fading-1d", "snr_db": [10], "decoders": ["ida"],
             "fading": {"s_max": 0}})");
  reject(R"({"scenario": "fading-1d", "snr_db": [10], "decoders": ["ida"],
             "fading": {"max_coeff": -1}})");
  reject(R"({"scenario": "fading-1d", "snr_db": [10], "decoders": ["ida"],
             "fading": {"conventional_max_coeff": -2}})");
  reject(R"({"scenario": "fading-1d", "snr_db": [10], "decoders": ["ida"],
             "fading": {"fixed_h": [1.0]}})");
  reject(R"({"scenario": "gaussian-map", "snr_db": [10],
             "decoders": ["map-gdfe"]})");  // gaussian table required
  reject(R"({"scenario": "gaussian-map", "snr_db": [10],
             "decoders": ["map-gdfe"],
             "gaussian": {"fine": [[1, 0]], "coarse": {"scale": 2}}})");
  reject(R"({"scenario": "gaussian-map", "snr_db": [10],
             "decoders": ["map-gdfe"],
             "gaussian": {"fine": [[1, 0], [0, 1]],
                          "coarse": [[2, 0], [0, 2]], "n_sources": 0}})");
}

TEST_CASE("fading trials are deterministic in the stream id") {
  const SimConfig cfg = small_fading_config();
  cfl::TrialRecord a, b;
  cfl::run_fading_trial(cfg, 0.5, {1, 17}, a);
  cfl::run_fading_trial(cfg, 0.5, {1, 17}, b);
  CHECK(a.stream == b.stream);
  CHECK(a.drawn == b.drawn);
  CHECK(a.truth == b.truth);
  CHECK(a.correct == b.correct);
  REQUIRE(a.drawn.size() == 8);  // x1 x2 h0 h1 z alpha a0 a1
  REQUIRE(a.truth.size() == cfg.decoders.size());
  CHECK(a.truth[0] == a.truth[1]);  // shared selection: one target
  cfl::TrialRecord c;
  cfl::run_fading_trial(cfg, 0.5, {1, 18}, c);
  CHECK(c.stream != a.stream);
}

TEST_CASE("fixed channel mode holds h constant across trials") {
  SimConfig cfg = cfl::parse_sim_config(R"({
    "scenario": "fading-1d", "snr_db": [15], "trials": 10,
    "decoders": ["ida"],
    "fading": {"s_max": 5, "fixed_h": [0.8, -0.6]}
  })");
  for (std::uint64_t t = 0; t < 10; ++t) {
    cfl::TrialRecord rec;
    cfl::run_fading_trial(cfg, 0.3, {0, t}, rec);
    CHECK(rec.drawn[2] == doctest::Approx(0.8));
    CHECK(rec.drawn[3] == doctest::Approx(-0.6));
  }
}

TEST_CASE("split selection gives the baseline its own budget and target") {
  SimConfig cfg = cfl::parse_sim_config(R"({
    "scenario": "fading-1d", "snr_db": [50], "trials": 10,
    "decoders": ["conventional", "ida"],
    "fading": {"s_max": 5, "max_coeff": 0, "conventional_max_coeff": 1}
  })");
  const double sigma2 = 10.0 / cfl::snr_from_db(50.0);
  bool saw_budget_bind = false;
  for (std::uint64_t t = 0; t < 200; ++t) {
    cfl::TrialRecord rec;
    cfl::run_fading_trial(cfg, sigma2, {0, t}, rec);
    REQUIRE(rec.drawn.size() == 11);  // + alpha_conv a_conv0 a_conv1
    CHECK(std::abs(rec.drawn[9]) <= 1.0);
    CHECK(std::abs(rec.drawn[10]) <= 1.0);
    if (rec.drawn[9] != rec.drawn[6] || rec.drawn[10] != rec.drawn[7]) {
      saw_budget_bind = true;
    }
  }
  // At 50 dB the unrestricted optimum regularly leaves the [-1, 1] box.
  CHECK(saw_budget_bind);
}

TEST_CASE("noise-free gaussian trials decode perfectly") {
  const SimConfig cfg = small_gaussian_config();
  const cfl::GaussianWorkspace ws = cfl::make_gaussian_workspace(cfg.gaussian);
  CHECK(ws.code->index == 11);
  CHECK(ws.sum.points.size() == 33);
  for (std::uint64_t t = 0; t < 50; ++t) {
    cfl::TrialRecord rec;
    cfl::run_gaussian_trial(cfg, ws, 1e-12, {0, t}, rec);
    for (unsigned char ok : rec.correct) CHECK(ok == 1);
  }
  // Determinism of the full record.
  cfl::TrialRecord a, b;
  cfl::run_gaussian_trial(cfg, ws, 0.4, {2, 5}, a);
  cfl::run_gaussian_trial(cfg, ws, 0.4, {2, 5}, b);
  CHECK(a.drawn == b.drawn);
  CHECK(a.truth == b.truth);
  CHECK(a.correct == b.correct);
}

TEST_CASE("sweep output is identical across repeated runs") {
  const SimConfig cfg = small_fading_config();
  const std::string first = csv_of(cfg);
  const std::string second = csv_of(cfg);
  CHECK(first == second);
  CHECK(first.rfind("scenario,decoder,snr_db,trials,errors,pe,ci95_half\n",
                    0) == 0);
  // 1 header + decoders x points rows.
  int rows = 0;
  for (char ch : first) rows += (ch == '\n') ? 1 : 0;
  CHECK(rows == 1 + 2 * 2);
}

TEST_CASE("sweep output is identical across worker counts") {
  const SimConfig cfg = small_fading_config();
  setenv("CF_LATTICE_THREADS", "1", 1);
  const std::string serial = csv_of(cfg);
  setenv("CF_LATTICE_THREADS", "4", 1);
  const std::string parallel = csv_of(cfg);
  unsetenv("CF_LATTICE_THREADS");
  CHECK(serial == parallel);
}

TEST_CASE("early stopping quantizes to whole batches") {
  SimConfig cfg = small_fading_config();
  cfg.trials = 100000;
  cfg.stop_errors = 100;
  const auto curves = cfl::sweep(cfg);
  for (const auto& curve : curves) {
    for (const auto& pt : curve.points) {
      // Stops only at batch boundaries (4096) or the configured cap.
      CHECK((pt.trials % 4096 == 0 || pt.trials == cfg.trials));
      CHECK(pt.trials <= cfg.trials);
      CHECK(pt.pe == doctest::Approx(static_cast<double>(pt.errors) /
                                     static_cast<double>(pt.trials)));
    }
  }
  // High error rates at these SNRs: the first batch already suffices for
  // every decoder, so no point runs longer.
  for (const auto& curve : curves) {
    CHECK(curve.points[0].trials == 4096);
  }
}

TEST_CASE("slope fit recovers an exact synthetic decade line") {
  std::vector<cfl::CurvePoint> pts;
  for (int s = 10; s <= 40; s += 5) {
    cfl::CurvePoint p;
    p.snr_db = s;
    p.pe = std::pow(10.0, -0.1 * s);
    p.errors = 100;
    p.trials = 1000000;
    pts.push_back(p);
  }
  CHECK(cfl::fit_log10_slope(pts, 10, 40) == doctest::Approx(-0.1).epsilon(1e-12));
  // Window selection: using only the top half must also fit the same line.
  CHECK(cfl::fit_log10_slope(pts, 25, 40) == doctest::Approx(-0.1).epsilon(1e-12));
  // Zero-error points are excluded; a window with fewer than two usable
  // points cannot be fit.
  pts[5].errors = 0;
  pts[6].errors = 0;
  CHECK_THROWS_AS(cfl::fit_log10_slope(pts, 35, 40), cfl::Error);
}

TEST_CASE("threshold crossing by log-linear interpolation") {
  std::vector<cfl::CurvePoint> pts(2);
  pts[0].snr_db = 10;
  pts[0].pe = 1e-1;
  pts[0].errors = 10;
  pts[1].snr_db = 20;
  pts[1].pe = 1e-3;
  pts[1].errors = 10;
  const auto at = cfl::snr_at_pe(pts, 1e-2);
  REQUIRE(at.has_value());
  CHECK(*at == doctest::Approx(15.0).epsilon(1e-12));
  CHECK_FALSE(cfl::snr_at_pe(pts, 1e-5).has_value());
  CHECK_FALSE(cfl::snr_at_pe(pts, 0.5).has_value());
}
