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

#include "cfl/selection.hpp"

#include <cmath>

namespace cfl {

double optimal_alpha(const Vec& h, const IntVec& a, double rho) {
  if (a.isZero()) throw EmptyConstraint("zero coefficient vector");
  const double ha = h.dot(a.cast<double>());
  return rho * ha / (1.0 + rho * h.squaredNorm());
}

double computation_rate(const Vec& h, const IntVec& a, double rho,
                        double alpha) {
  if (a.isZero()) throw EmptyConstraint("zero coefficient vector");
  const double mismatch = (alpha * h - a.cast<double>()).squaredNorm();
  const double denom = alpha * alpha + rho * mismatch;
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  const double arg = rho / denom;
  return arg <= 1.0 ? 0.0 : 0.5 * std::log2(arg);
}

double best_computation_rate(const Vec& h, const IntVec& a, double rho) {
  return computation_rate(h, a, rho, optimal_alpha(h, a, rho));
}

Mat coefficient_gram(const Vec& h, double rho) {
  const Eigen::Index n = h.size();
  const double scale = rho / (1.0 + rho * h.squaredNorm());
  return Mat::Identity(n, n) - scale * (h * h.transpose());
}

IntVec optimal_coefficients(const Vec& h, double rho) {
  return shortest_vector(coefficient_gram(h, rho)).coeffs;
}

IntVec optimal_coefficients(const Vec& h, double rho, long long max_coeff) {
  if (max_coeff < 1) throw EmptyConstraint("max_coeff must be >= 1");
  const Eigen::Index n = h.size();
  IntegerBox box;
  box.lo = IntVec::Constant(n, -max_coeff);
  box.hi = IntVec::Constant(n, max_coeff);
  return shortest_vector(coefficient_gram(h, rho), &box).coeffs;
}

}  // namespace cfl
