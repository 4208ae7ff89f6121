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

#include "cfl/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace cfl {

namespace {

struct CoeffLess {
  bool operator()(const IntVec& a, const IntVec& b) const {
    return tie_less(a, b);
  }
};

}  // namespace

std::ptrdiff_t SumCodebook::find(const IntVec& u) const {
  auto it = std::lower_bound(coeffs.begin(), coeffs.end(), u, CoeffLess{});
  if (it == coeffs.end() || tie_less(u, *it)) return -1;
  return it - coeffs.begin();
}

SumCodebook build_sum_codebook(const NestedLatticeCode& code, int n_sources,
                               std::uint64_t max_support) {
  if (n_sources < 1) throw EmptyCodebook("need at least one source");
  std::map<IntVec, std::uint64_t, CoeffLess> acc;
  for (const IntVec& c : code.coeffs) acc.emplace(c, 1);
  for (int s = 1; s < n_sources; ++s) {
    std::map<IntVec, std::uint64_t, CoeffLess> next;
    for (const auto& [u, count] : acc) {
      for (const IntVec& c : code.coeffs) {
        next[u + c] += count;
      }
    }
    if (next.size() > max_support) {
      throw TooLarge("sum-codebook support exceeds cap");
    }
    acc = std::move(next);
  }

  SumCodebook sum;
  sum.code = &code;
  sum.n_sources = n_sources;
  const Eigen::Index n = code.dim();
  double total = 0.0;
  for (const auto& [u, count] : acc) total += static_cast<double>(count);
  sum.coeffs.reserve(acc.size());
  sum.points.reserve(acc.size());
  IntVec lo = IntVec::Constant(n, std::numeric_limits<long long>::max());
  IntVec hi = IntVec::Constant(n, std::numeric_limits<long long>::min());
  for (const auto& [u, count] : acc) {
    sum.coeffs.push_back(u);
    sum.points.push_back(code.fine.basis * u.cast<double>());
    sum.counts.push_back(count);
    sum.pmf.push_back(static_cast<double>(count) / total);
    lo = lo.cwiseMin(u);
    hi = hi.cwiseMax(u);
  }
  sum.coeff_box = IntegerBox{lo, hi};
  sum.sigma_s2 = static_cast<double>(n_sources) * code.second_moment_per_dim;
  double pmf_total = 0.0;
  for (double p : sum.pmf) pmf_total += p;
  if (std::abs(pmf_total - 1.0) > 1e-12) {
    throw Error("internal: sum-codebook pmf does not normalize");
  }
  return sum;
}

double map_metric(const Vec& y, const Vec& point, double beta) {
  return (y - point).squaredNorm() + beta * beta * point.squaredNorm();
}

namespace {

// Shared constrained search over the sum-codebook support.
CvpResult support_cvp(const Mat& basis, const Vec& target,
                      const SumCodebook& sum) {
  CvpConstraints cons;
  cons.box = &sum.coeff_box;
  cons.accept = [&sum](const IntVec& u) { return sum.find(u) >= 0; };
  return closest_point(basis, target, cons);
}

const Vec& resolve(const SumCodebook& sum, const IntVec& coeffs,
                   IntVec* coeffs_out) {
  const std::ptrdiff_t idx = sum.find(coeffs);
  if (idx < 0) throw Error("internal: decoder left the support");
  if (coeffs_out) *coeffs_out = coeffs;
  return sum.points[static_cast<std::size_t>(idx)];
}

}  // namespace

const Vec& map_decode_augmented(const Vec& y, const SumCodebook& sum,
                                double beta, IntVec* coeffs_out) {
  const Mat& m = sum.code->fine.basis;
  const Eigen::Index n = m.rows();
  Mat aug(2 * n, n);
  aug.topRows(n) = m;
  aug.bottomRows(n) = beta * m;
  Vec target = Vec::Zero(2 * n);
  target.head(n) = y;
  return resolve(sum, support_cvp(aug, target, sum).coeffs, coeffs_out);
}

GdfeFilters mmse_gdfe_filters(double beta, Eigen::Index n) {
  const double root = std::sqrt(1.0 + beta * beta);
  GdfeFilters f;
  f.forward = Mat::Identity(n, n) / root;
  f.backward = Mat::Identity(n, n) * root;
  f.beta = beta;
  return f;
}

const Vec& map_decode_gdfe(const Vec& y, const SumCodebook& sum,
                           const GdfeFilters& filters, IntVec* coeffs_out) {
  const Mat filtered_basis = filters.backward * sum.code->fine.basis;
  const Vec filtered_target = filters.forward * y;
  return resolve(sum, support_cvp(filtered_basis, filtered_target, sum).coeffs,
                 coeffs_out);
}

double gamma_term(const Vec& y, double beta) {
  const double b2 = beta * beta;
  return b2 / (1.0 + b2) * y.squaredNorm();
}

const Vec& exhaustive_map_decode(const Vec& y, const SumCodebook& sum,
                                 double sigma2, IntVec* coeffs_out) {
  if (!(sigma2 > 0.0)) throw Error("noise variance must be positive");
  if (sum.points.empty()) throw EmptyCodebook("empty sum codebook");
  const double inv2s = 1.0 / (2.0 * sigma2);
  double best = 0.0;
  std::size_t best_idx = 0;
  bool found = false;
  for (std::size_t i = 0; i < sum.points.size(); ++i) {
    const double metric =
        -std::log(sum.pmf[i]) + (y - sum.points[i]).squaredNorm() * inv2s;
    const double window =
        kMetricSlack * std::max(std::abs(metric), std::abs(best));
    if (!found || metric < best - window) {
      best = metric;
      best_idx = i;
      found = true;
    } else if (metric <= best + window &&
               tie_less(sum.coeffs[i], sum.coeffs[best_idx])) {
      best_idx = i;
      best = std::min(best, metric);
    }
  }
  if (coeffs_out) *coeffs_out = sum.coeffs[best_idx];
  return sum.points[best_idx];
}

Vec conventional_decode(const Vec& y, const SumCodebook& sum, double beta,
                        bool constrain_to_support, IntVec* coeffs_out) {
  const double alpha = 1.0 / (1.0 + beta * beta);
  const Vec target = alpha * y;
  const Lattice& fine = sum.code->fine;
  CvpResult r;
  if (constrain_to_support) {
    r = support_cvp(fine.basis, target, sum);
  } else {
    r = closest_point(fine, target);
  }
  if (coeffs_out) *coeffs_out = r.coeffs;
  return r.point;
}

double pairwise_error_prob(const Vec& point, double prior, const Vec& other,
                           double other_prior, double sigma) {
  if (!(prior > 0.0) || !(other_prior > 0.0)) {
    throw ZeroProbability("pairwise error needs positive priors");
  }
  const double d = (point - other).norm();
  if (d <= 0.0) throw EmptyConstraint("pairwise error of identical points");
  const double arg = d / (2.0 * sigma) + sigma / d * std::log(prior / other_prior);
  return 0.5 * std::erfc(arg / std::sqrt(2.0));
}

double union_bound(const SumCodebook& sum, double d_min, double sigma) {
  const double a = d_min * d_min / (8.0 * sigma * sigma);
  const double sqrt_a = std::sqrt(a);
  double acc = 0.0;
  const std::size_t k = sum.pmf.size();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const double b = 0.25 * std::log(sum.pmf[i] / sum.pmf[j]);
      acc += sum.pmf[i] * std::erfc(sqrt_a + b / sqrt_a);
    }
  }
  return 0.5 * acc;
}

}  // namespace cfl
