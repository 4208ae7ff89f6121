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

#ifndef CFL_GAUSSIAN_HPP
#define CFL_GAUSSIAN_HPP

#include <cstdint>
#include <vector>

#include "cfl/lattice.hpp"

namespace cfl {

// Decoding the sum of N codewords observed in Gaussian noise,
// y = sum_i x_i + z: sum-codebook statistics, the prior-weighted decoding
// metric, its two lattice-decoder reductions, exhaustive references, and
// the union bound on the error probability.

// Support and exact distribution of the N-fold sum of i.i.d. uniform
// codewords.
struct SumCodebook {
  const NestedLatticeCode* code = nullptr;  // borrowed; must outlive this
  int n_sources = 0;
  std::vector<IntVec> coeffs;        // support in fine coordinates, canonical order
  std::vector<Vec> points;           // the sum codewords
  std::vector<std::uint64_t> counts; // multinomial counts, sum = K^N
  std::vector<double> pmf;           // counts / K^N
  double sigma_s2 = 0.0;             // model variance N * sigma_x^2 (per dim)
  IntegerBox coeff_box;              // bounding box of the support coefficients

  // Index of the support entry with these fine coordinates, or -1.
  std::ptrdiff_t find(const IntVec& u) const;
};

// Exact iterated sumset/convolution in fine coordinates.  Throws TooLarge
// when the support would exceed max_support.
SumCodebook build_sum_codebook(const NestedLatticeCode& code, int n_sources,
                               std::uint64_t max_support = 1000000);

// Ratio of noise to sum-signal deviation driving the prior weight.
inline double noise_ratio(double sigma, double sigma_s2) {
  return sigma / std::sqrt(sigma_s2);
}

// Prior-weighted decoding metric ||y - p||^2 + beta^2 ||p||^2.
double map_metric(const Vec& y, const Vec& point, double beta);

// Posterior-optimal decoder as a constrained closest-point search in the
// augmented lattice [M; beta*M] with target [y; 0]: the augmented squared
// distance equals map_metric plus a constant, so the decision is the
// map_metric argmin over the sum-codebook support (membership enforced as a
// leaf filter inside the search).  Ties follow the shared canonical order.
const Vec& map_decode_augmented(const Vec& y, const SumCodebook& sum,
                                double beta, IntVec* coeffs_out = nullptr);

// Forward/backward filter pair turning the prior-weighted metric into plain
// minimum-distance decoding: B^T B = (1+beta^2) I and F^T B = I, with the
// canonical positive-scalar representative B = sqrt(1+beta^2) I,
// F = I/sqrt(1+beta^2).
struct GdfeFilters {
  Mat forward;   // F
  Mat backward;  // B
  double beta = 0.0;
};

GdfeFilters mmse_gdfe_filters(double beta, Eigen::Index n);

// Same decision as map_decode_augmented via the filtered problem
// argmin ||F y - B p||^2; the two objectives differ by the p-independent
// offset gamma_term(y, beta).
const Vec& map_decode_gdfe(const Vec& y, const SumCodebook& sum,
                           const GdfeFilters& filters,
                           IntVec* coeffs_out = nullptr);

// The p-independent offset: y^T (I - F^T F) y = (beta^2/(1+beta^2)) ||y||^2.
double gamma_term(const Vec& y, double beta);

// Exact posterior argmax under the true discrete prior:
// argmin over support of -ln pmf + ||y - p||^2 / (2 sigma^2).
// The validation oracle for the Gaussian-model decoders above.
const Vec& exhaustive_map_decode(const Vec& y, const SumCodebook& sum,
                                 double sigma2, IntVec* coeffs_out = nullptr);

// Scale-and-quantize reference decoder: closest fine-lattice point to
// alpha_mmse * y with alpha_mmse = 1/(1+beta^2) (the MMSE scaling of the
// unit-gain sum channel).  By default the search is over the whole fine
// lattice, matching the classical receiver that ignores the shaping support;
// with constrain_to_support the search is restricted to the sum support,
// which makes the decision identical to the posterior-optimal decoder (the
// prior weight folds exactly into the MMSE scaling) -- that identity is
// asserted in tests rather than used as the baseline.
Vec conventional_decode(const Vec& y, const SumCodebook& sum, double beta,
                        bool constrain_to_support = false,
                        IntVec* coeffs_out = nullptr);

// Pairwise decision-error probability between sum codewords under the
// prior-weighted rule: Q( d/(2 sigma) + (sigma/d) ln(p/p_hat) ), d = ||Δ||.
// Throws ZeroProbability on nonpositive priors, EmptyConstraint on equal
// points.
double pairwise_error_prob(const Vec& point, double prior, const Vec& other,
                           double other_prior, double sigma);

// Union bound with every pairwise distance replaced by d_min:
// (1/2) sum_i sum_{j != i} pmf_i erfc( sqrt(A) + B_ij / sqrt(A) ),
// A = d_min^2/(8 sigma^2), B_ij = ln(pmf_i/pmf_j)/4.  May exceed 1 at low
// SNR; emitted as-is.
double union_bound(const SumCodebook& sum, double d_min, double sigma);

}  // namespace cfl

#endif  // CFL_GAUSSIAN_HPP
