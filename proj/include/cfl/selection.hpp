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

#ifndef CFL_SELECTION_HPP
#define CFL_SELECTION_HPP

#include "cfl/lattice.hpp"

namespace cfl {

// Receiver-side parameter selection for decoding an integer combination of
// lattice codewords over a fading channel: achievable-rate evaluation, the
// MMSE-optimal scaling of the channel output, and the integer coefficient
// vector maximizing that rate.

// dB -> linear power ratio.
inline double snr_from_db(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

// MMSE scaling minimizing the effective-noise variance for combination a:
// alpha_opt = rho h.a / (1 + rho ||h||^2).
double optimal_alpha(const Vec& h, const IntVec& a, double rho);

// Achievable computation rate (bits per real dimension):
// (1/2) log2+( rho / (alpha^2 + rho ||alpha h - a||^2) ), log2+ = max(log2, 0).
// Throws EmptyConstraint when a = 0.
double computation_rate(const Vec& h, const IntVec& a, double rho, double alpha);

// Rate at the MMSE-optimal scaling.
double best_computation_rate(const Vec& h, const IntVec& a, double rho);

// Quadratic form whose minimizer over nonzero integer vectors is the
// rate-optimal coefficient vector: G = I - (rho/(1+rho||h||^2)) h h^T.
// Symmetric positive definite for every finite rho.
Mat coefficient_gram(const Vec& h, double rho);

// Rate-optimal integer coefficient vector: shortest nonzero vector of the
// Gram form above, sign-normalized (first nonzero coordinate positive).
IntVec optimal_coefficients(const Vec& h, double rho);

// Same selection restricted to the box [-max_coeff, max_coeff]^N.  A
// practical receiver variant: at high SNR the unrestricted optimum drifts to
// ever-larger integer approximations of h, whereas a bounded-complexity
// receiver keeps small coefficients (at the cost of residual
// self-interference).  Throws EmptyConstraint when max_coeff < 1.
IntVec optimal_coefficients(const Vec& h, double rho, long long max_coeff);

}  // namespace cfl

#endif  // CFL_SELECTION_HPP
