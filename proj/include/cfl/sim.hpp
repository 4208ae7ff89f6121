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

#ifndef CFL_SIM_HPP
#define CFL_SIM_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cfl/gaussian.hpp"
#include "cfl/lattice.hpp"

namespace cfl {

// Monte Carlo reproduction harness: seeded per-trial random streams, SNR
// sweeps with deterministic early stopping, Wilson confidence intervals,
// and CSV emission.

// Counter-based generator: each trial owns an independent stream derived
// from (seed, sweep point, trial index), so results are reproducible and
// independent of execution order and worker count.
class Rng {
 public:
  explicit Rng(std::uint64_t stream_state) : state_(stream_state) {}

  std::uint64_t next_u64();
  double uniform01();  // [0, 1)
  double normal();     // standard normal (Box-Muller on two uniforms)
  long long uniform_int(long long lo, long long hi);  // inclusive

 private:
  std::uint64_t state_;
};

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t point,
                            std::uint64_t trial);

enum class Scenario { kFading1d, kGaussianMap };

struct FadingConfig {
  long long s_max = 5;
  std::optional<Vec> fixed_h;  // slow-fading mode: one h for the whole sweep
  // Per-trial combination selection: 0 = unrestricted shortest-vector
  // optimum; m >= 1 = bounded-complexity receiver restricted to
  // [-m, m]^2.  A bounded receiver eventually stops adapting its integer
  // approximation of h, which is what produces a high-SNR error floor;
  // the unrestricted optimum keeps improving and floors much later.
  long long max_coeff = 0;
  // Optional override for the conventional (scale-and-round) decoder only.
  // When set, that decoder selects its own combination under this budget
  // and is scored against its own target, modelling a low-complexity
  // baseline receiver compared against an adaptive one.  The other
  // decoders keep the shared selection above.
  std::optional<long long> conventional_max_coeff;
};

struct GaussianConfig {
  Mat fine;
  Mat coarse;
  int n_sources = 2;
  std::uint64_t max_index = 1000000;
  std::uint64_t max_support = 1000000;
  std::optional<double> power;  // optional power-constraint check
};

struct SimConfig {
  Scenario scenario = Scenario::kFading1d;
  std::uint64_t seed = 1;
  std::vector<double> snr_db;
  std::uint64_t trials = 100000;
  std::uint64_t stop_errors = 100;  // 0 disables early stopping
  std::vector<std::string> decoders;
  FadingConfig fading;
  GaussianConfig gaussian;
  std::string out;  // empty: stdout
};

// Throws ConfigError on invalid/contradictory settings.
void validate_config(const SimConfig& cfg);

// Parse from a JSON document / file (schema in README).  Throws ConfigError.
SimConfig parse_sim_config(const std::string& json_text);
SimConfig load_sim_config(const std::string& path);

struct StreamId {
  std::uint64_t point = 0;
  std::uint64_t trial = 0;
};

// One Monte Carlo draw and the decisions of the selected decoders.
struct TrialRecord {
  std::uint64_t stream = 0;
  std::vector<double> drawn;  // scenario-specific draws (see .cpp)
  // Fading: the target combination each decoder is scored against (entries
  // differ only when conventional_max_coeff splits the selection).
  // Gaussian: the true sum coefficient vector.
  std::vector<long long> truth;
  std::vector<unsigned char> correct;  // aligned with cfg.decoders
};

// Deterministic given (cfg.seed, id).  sigma2 is the per-trial noise
// variance for the sweep point.  Decoder failures that the harness is
// specified to absorb (degenerate geometry) fall back internally.
void run_fading_trial(const SimConfig& cfg, double sigma2, StreamId id,
                      TrialRecord& out);

// Shared per-sweep state for the Gaussian scenario (codebook built once).
// The code lives behind a pointer so that sum.code stays valid when the
// workspace is moved.
struct GaussianWorkspace {
  std::unique_ptr<NestedLatticeCode> code;
  SumCodebook sum;
};
GaussianWorkspace make_gaussian_workspace(const GaussianConfig& cfg);

void run_gaussian_trial(const SimConfig& cfg, const GaussianWorkspace& ws,
                        double sigma2, StreamId id, TrialRecord& out);

struct CurvePoint {
  double snr_db = 0;
  std::uint64_t trials = 0;
  std::uint64_t errors = 0;
  double pe = 0;
  double ci95_half = 0;
};

struct ErrorRateCurve {
  std::string decoder;
  std::vector<CurvePoint> points;
};

// Runs the configured sweep.  Per SNR point, trials run in fixed-size
// batches until every decoder has at least cfg.stop_errors errors or
// cfg.trials is reached; the batch quantization keeps the stopping decision
// (and hence the CSV) identical for any worker count.  Worker parallelism
// is capped by CF_LATTICE_THREADS (default: hardware concurrency).
std::vector<ErrorRateCurve> sweep(const SimConfig& cfg);

// Columns: scenario,decoder,snr_db,trials,errors,pe,ci95_half.
void write_csv(const SimConfig& cfg, const std::vector<ErrorRateCurve>& curves,
               std::ostream& os);

struct WilsonInterval {
  double center;
  double half_width;
};

// 95% Wilson score interval for errors/trials.
WilsonInterval wilson_interval(std::uint64_t errors, std::uint64_t trials);

// Least-squares slope of log10(pe) versus SNR(dB) over the points with
// snr_db in [snr_min, snr_max] and errors > 0 (decades per dB).
double fit_log10_slope(const std::vector<CurvePoint>& points, double snr_min,
                       double snr_max);

// SNR (dB) at which the curve crosses target_pe, by linear interpolation of
// log10(pe) between bracketing points; nullopt when the curve never crosses.
std::optional<double> snr_at_pe(const std::vector<CurvePoint>& points,
                                double target_pe);

}  // namespace cfl

#endif  // CFL_SIM_HPP
