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

#include "cfl/fading.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cfl {

namespace {

constexpr double kDegenerateGamma = 1e-9;

// Preference order on t for equal metrics: smaller |t|, then smaller t.
bool prefer_t(long long t, long long best_t) {
  const long long at = std::llabs(t), abt = std::llabs(best_t);
  if (at != abt) return at < abt;
  return t < best_t;
}

// Better-than comparison for (residual, |t|, t) with the shared relative
// slack: candidates within kMetricSlack of the incumbent count as metric
// ties and fall through to the integer preference.  Both metrics are >= 0.
bool improves(double r, long long t, double best_r, long long best_t) {
  const double window = kMetricSlack * std::max(r, best_r);
  if (r < best_r - window) return true;
  if (r > best_r + window) return false;
  return prefer_t(t, best_t);
}

// Same protocol for a maximized nonnegative score.
bool improves_max(double p, long long t, double best_p, long long best_t) {
  const double window = kMetricSlack * std::max(p, best_p);
  if (p > best_p + window) return true;
  if (p < best_p - window) return false;
  return prefer_t(t, best_t);
}

}  // namespace

ScaledObservation scale_observation(double y, const Vec& h, double sigma2,
                                    double alpha) {
  return ScaledObservation{alpha * y, alpha * h, alpha * alpha * sigma2};
}

IntegerBox candidate_set(long long a1, long long a2, long long s_max) {
  const long long reach = (std::llabs(a1) + std::llabs(a2)) * s_max;
  IntegerBox box;
  box.lo = IntVec::Constant(1, -reach);
  box.hi = IntVec::Constant(1, reach);
  return box;
}

IntegerBox shaping_box(long long s_max) {
  IntegerBox box;
  box.lo = IntVec::Constant(2, -s_max);
  box.hi = IntVec::Constant(2, s_max);
  return box;
}

LikelihoodGeometry make_geometry(const ScaledObservation& obs, long long a1,
                                 long long a2, long long s_max) {
  const GcdResult g = extended_gcd(a1, a2);
  if (g.g != 1) {
    throw NoSolution("decoding requires coprime coefficients");
  }
  LikelihoodGeometry geom;
  geom.a1 = a1;
  geom.a2 = a2;
  geom.gamma = obs.h_scaled(0) * static_cast<double>(g.u1) +
               obs.h_scaled(1) * static_cast<double>(g.u2);
  geom.beta_f = static_cast<double>(a1) * obs.h_scaled(1) -
                static_cast<double>(a2) * obs.h_scaled(0);
  geom.t_range = candidate_set(a1, a2, s_max);
  return geom;
}

double likelihood(const LikelihoodGeometry& geom, const ScaledObservation& obs,
                  const PairSolutionFamily& family,
                  const IntegerBox& shaping) {
  long long klo = 0, khi = -1;
  if (!family_k_interval(family, shaping, klo, khi)) return 0.0;
  const double inv2s = 1.0 / (2.0 * obs.sigma2_scaled);
  const double base = obs.y_scaled - geom.gamma * static_cast<double>(family.t);
  double sum = 0.0;
  for (long long k = klo; k <= khi; ++k) {
    const double r = base + geom.beta_f * static_cast<double>(k);
    sum += std::exp(-r * r * inv2s);
  }
  return sum;
}

double likelihood_at(const LikelihoodGeometry& geom,
                     const ScaledObservation& obs, long long t,
                     long long s_max) {
  return likelihood(geom, obs, solve_pair(geom.a1, geom.a2, t),
                    shaping_box(s_max));
}

std::vector<ProfileRow> likelihood_profile(const LikelihoodGeometry& geom,
                                           const ScaledObservation& obs,
                                           long long s_max) {
  return likelihood_profile(geom, obs, s_max, geom.t_range.lo(0),
                            geom.t_range.hi(0));
}

std::vector<ProfileRow> likelihood_profile(const LikelihoodGeometry& geom,
                                           const ScaledObservation& obs,
                                           long long s_max, long long t_min,
                                           long long t_max) {
  const IntegerBox shaping = shaping_box(s_max);
  const double inv2s = 1.0 / (2.0 * obs.sigma2_scaled);
  std::vector<ProfileRow> rows;
  rows.reserve(static_cast<std::size_t>(std::max<long long>(0, t_max - t_min + 1)));
  for (long long t = t_min; t <= t_max; ++t) {
    const PairSolutionFamily family = solve_pair(geom.a1, geom.a2, t);
    ProfileRow row{t, 0.0, std::numeric_limits<double>::infinity()};
    long long klo = 0, khi = -1;
    if (family_k_interval(family, shaping, klo, khi)) {
      const double base = obs.y_scaled - geom.gamma * static_cast<double>(t);
      for (long long k = klo; k <= khi; ++k) {
        const double r = base + geom.beta_f * static_cast<double>(k);
        row.phi += std::exp(-r * r * inv2s);
        row.min_residual = std::min(row.min_residual, std::abs(r));
      }
    }
    rows.push_back(row);
  }
  return rows;
}

IdaResult ida_decode(const LikelihoodGeometry& geom,
                     const ScaledObservation& obs, long long s_max) {
  if (std::abs(geom.gamma) < kDegenerateGamma) {
    throw DegenerateGeometry("effective channel coefficient is zero");
  }
  const IntegerBox shaping = shaping_box(s_max);
  IdaResult best{0, 0, std::numeric_limits<double>::infinity()};
  bool found = false;
  for (long long t = geom.t_range.lo(0); t <= geom.t_range.hi(0); ++t) {
    const PairSolutionFamily family = solve_pair(geom.a1, geom.a2, t);
    long long klo = 0, khi = -1;
    if (!family_k_interval(family, shaping, klo, khi)) continue;
    const double base = obs.y_scaled - geom.gamma * static_cast<double>(t);
    long long k;
    if (geom.beta_f == 0.0) {
      k = klo;
    } else {
      // |base + beta_f k| is convex piecewise-linear in k: the admissible
      // minimizer is the unconstrained rounding clamped into the interval.
      k = std::llround(-base / geom.beta_f);
      k = std::clamp(k, klo, khi);
    }
    const double r = std::abs(base + geom.beta_f * static_cast<double>(k));
    if (!found || improves(r, t, best.residual, best.t)) {
      best = IdaResult{t, k, r};
      found = true;
    }
  }
  if (!found) throw EmptyConstraint("no feasible combination");
  return best;
}

long long conventional_decode_1d(const ScaledObservation& obs, long long a1,
                                 long long a2, long long s_max) {
  const IntegerBox range = candidate_set(a1, a2, s_max);
  const long long t = std::llround(obs.y_scaled);
  return std::clamp(t, range.lo(0), range.hi(0));
}

long long exhaustive_ml_decode(const ScaledObservation& obs, long long a1,
                               long long a2, long long s_max,
                               std::uint64_t max_pairs) {
  const std::uint64_t side = static_cast<std::uint64_t>(2 * s_max + 1);
  if (side * side > max_pairs) {
    throw TooLarge("constellation square exceeds enumeration cap");
  }
  const long long reach = (std::llabs(a1) + std::llabs(a2)) * s_max;
  std::vector<double> phi(static_cast<std::size_t>(2 * reach + 1), 0.0);
  const double inv2s = 1.0 / (2.0 * obs.sigma2_scaled);
  for (long long x1 = -s_max; x1 <= s_max; ++x1) {
    for (long long x2 = -s_max; x2 <= s_max; ++x2) {
      const double r = obs.y_scaled - obs.h_scaled(0) * static_cast<double>(x1) -
                       obs.h_scaled(1) * static_cast<double>(x2);
      const long long t = a1 * x1 + a2 * x2;
      phi[static_cast<std::size_t>(t + reach)] += std::exp(-r * r * inv2s);
    }
  }
  long long best_t = 0;
  double best_phi = -1.0;
  for (long long t = -reach; t <= reach; ++t) {
    const double p = phi[static_cast<std::size_t>(t + reach)];
    if (best_phi < 0.0 || improves_max(p, t, best_phi, best_t)) {
      best_phi = p;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace cfl
