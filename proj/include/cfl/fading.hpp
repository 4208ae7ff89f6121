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

#ifndef CFL_FADING_HPP
#define CFL_FADING_HPP

#include <vector>

#include "cfl/diophantine.hpp"
#include "cfl/lattice.hpp"

namespace cfl {

// Decoding of the integer combination t = a1*x1 + a2*x2 from a scalar fading
// observation y = h1*x1 + h2*x2 + z, with x_i integers in [-s_max, s_max]:
// likelihood evaluation and profiling, the diophantine-approximation decoder,
// the scale-and-round conventional decoder, and an exhaustive ML oracle.

// Channel output after MMSE scaling by alpha.
struct ScaledObservation {
  double y_scaled;       // alpha * y
  Vec h_scaled;          // alpha * h (length 2)
  double sigma2_scaled;  // alpha^2 * sigma^2
};

ScaledObservation scale_observation(double y, const Vec& h, double sigma2,
                                    double alpha);

// Geometry of the scaled problem for combination a: substituting the solution
// family of a1*x1 + a2*x2 = t into h~.x collapses the two unknowns onto the
// line gamma*t - beta_f*k, so the residual for hypothesis (t, k) is
//   r(t, k) = y~ - gamma*t + beta_f*k.
struct LikelihoodGeometry {
  long long a1, a2;
  double gamma;       // h~1*u1 + h~2*u2 (u = canonical Bezout pair of a)
  double beta_f;      // a1*h~2 - a2*h~1
  IntegerBox t_range; // candidate combinations (1-D box)

  double beta_prime() const { return beta_f / gamma; }
  double y_prime(double y_scaled) const { return -y_scaled / gamma; }
};

// Requires gcd(a1, a2) = 1 (the decoders operate on coprime combinations);
// throws NoSolution otherwise, BothZero on a = 0.
LikelihoodGeometry make_geometry(const ScaledObservation& obs, long long a1,
                                 long long a2, long long s_max);

// Exact range of a1*x1 + a2*x2 over the square [-s_max, s_max]^2:
// [-(|a1|+|a2|)*s_max, +(|a1|+|a2|)*s_max] as a 1-D box.
IntegerBox candidate_set(long long a1, long long a2, long long s_max);

// Shaping square [-s_max, s_max]^2 as a 2-D box on (x1, x2).
IntegerBox shaping_box(long long s_max);

// Likelihood of combination t: sum over exactly the family members inside
// the shaping box of exp(-r(t,k)^2 / (2 sigma~^2)).  Zero when no family
// member is admissible.  Throws NoSolution when gcd(a) does not divide t.
double likelihood(const LikelihoodGeometry& geom, const ScaledObservation& obs,
                  const PairSolutionFamily& family, const IntegerBox& shaping);

// Convenience: builds the family for t and evaluates.
double likelihood_at(const LikelihoodGeometry& geom,
                     const ScaledObservation& obs, long long t,
                     long long s_max);

struct ProfileRow {
  long long t;
  double phi;            // likelihood value
  double min_residual;   // min over admissible k of |r(t,k)|; +inf if none
};

// Tabulates the likelihood over [t_min, t_max] (defaults to the candidate
// set).  min_residual exposes the dominant-term geometry used for near-tie
// analysis independently of the noise scale.
std::vector<ProfileRow> likelihood_profile(const LikelihoodGeometry& geom,
                                           const ScaledObservation& obs,
                                           long long s_max);
std::vector<ProfileRow> likelihood_profile(const LikelihoodGeometry& geom,
                                           const ScaledObservation& obs,
                                           long long s_max, long long t_min,
                                           long long t_max);

struct IdaResult {
  long long t;
  long long k;
  double residual;  // |r(t, k)| at the optimum
};

// Diophantine-approximation decoder: minimizes |r(t, k)| jointly over
// t in the candidate set and admissible k (shaping enforced per t).  For
// each t the admissible k form an interval and |r| is convex in k, so the
// exact per-t minimizer is the clamped rounding of the unconstrained best k;
// the global scan over t is therefore exactly the bounded exhaustive
// minimizer.  Ties resolve to smaller |t|, then smaller t.
// Throws DegenerateGeometry when |gamma| < 1e-9 (callers fall back to the
// exhaustive ML decoder).
IdaResult ida_decode(const LikelihoodGeometry& geom,
                     const ScaledObservation& obs, long long s_max);

// Scale-and-round decoder: nearest integer to y~, clamped to the candidate
// set.
long long conventional_decode_1d(const ScaledObservation& obs, long long a1,
                                 long long a2, long long s_max);

// Exhaustive ML oracle: direct sum of exp(-(y~ - h~.x)^2/(2 sigma~^2)) over
// all (x1, x2) in the shaping square, grouped by t = a1*x1 + a2*x2; returns
// the argmax (ties resolve to smaller |t|, then smaller t).
// Throws TooLarge when (2*s_max+1)^2 exceeds max_pairs.
long long exhaustive_ml_decode(const ScaledObservation& obs, long long a1,
                               long long a2, long long s_max,
                               std::uint64_t max_pairs = 4000000);

}  // namespace cfl

#endif  // CFL_FADING_HPP
