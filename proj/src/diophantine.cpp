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

#include "cfl/diophantine.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "exact_hnf.hpp"

namespace cfl {

GcdResult extended_gcd(long long a1, long long a2) {
  if (a1 == 0 && a2 == 0) throw BothZero("gcd(0, 0) is undefined");
  long long old_r = a1, r = a2;
  long long old_s = 1, s = 0;
  long long old_t = 0, t = 1;
  while (r != 0) {
    const long long q = old_r / r;
    long long tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
    tmp = old_t - q * t;
    old_t = t;
    t = tmp;
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  GcdResult res{old_r, old_s, old_t};
  // Canonical representative: u1 is unique modulo a2/g; pick minimal |u1|,
  // preferring the nonnegative one on an exact tie.
  if (a2 != 0) {
    const long long step = std::llabs(a2 / res.g);
    long long m = res.u1 % step;
    if (m < 0) m += step;
    const long long u1c = (2 * m <= step) ? m : m - step;
    const long long j = (u1c - res.u1) / (a2 / res.g);
    res.u1 = u1c;
    res.u2 -= j * (a1 / res.g);
  }
  if (a1 * res.u1 + a2 * res.u2 != res.g) {
    throw Error("internal: Bezout identity violated");
  }
  return res;
}

PairSolutionFamily solve_pair(long long a1, long long a2, long long t) {
  const GcdResult g = extended_gcd(a1, a2);
  if (t % g.g != 0) {
    std::ostringstream os;
    os << "gcd " << g.g << " does not divide " << t;
    throw NoSolution(os.str());
  }
  return PairSolutionFamily{a1, a2, g.g, g.u1, g.u2, t};
}

namespace {

long long floor_div_ll(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

long long ceil_div_ll(long long a, long long b) {
  return -floor_div_ll(-a, b);
}

// Clamp the k-interval by lo <= b + c*k <= hi.  Returns false when the
// constraint is infeasible.
bool clamp_interval(long long b, long long c, long long lo, long long hi,
                    long long& klo, long long& khi) {
  if (c == 0) return b >= lo && b <= hi;
  if (c > 0) {
    klo = std::max(klo, ceil_div_ll(lo - b, c));
    khi = std::min(khi, floor_div_ll(hi - b, c));
  } else {
    klo = std::max(klo, ceil_div_ll(hi - b, c));
    khi = std::min(khi, floor_div_ll(lo - b, c));
  }
  return true;
}

}  // namespace

bool family_k_interval(const PairSolutionFamily& family, const IntegerBox& box,
                       long long& k_lo, long long& k_hi) {
  box.validate(2);
  const long long tp = family.t / family.g;
  const long long b1 = family.u1 * tp, c1 = family.a2 / family.g;
  const long long b2 = family.u2 * tp, c2 = -(family.a1 / family.g);
  if (c1 == 0 && c2 == 0) throw Error("internal: k-free solution family");
  k_lo = std::numeric_limits<long long>::min() / 4;
  k_hi = std::numeric_limits<long long>::max() / 4;
  if (!clamp_interval(b1, c1, box.lo(0), box.hi(0), k_lo, k_hi)) return false;
  if (!clamp_interval(b2, c2, box.lo(1), box.hi(1), k_lo, k_hi)) return false;
  return k_lo <= k_hi;
}

std::vector<BoundedSolution> bounded_family(const PairSolutionFamily& family,
                                            const IntegerBox& box) {
  long long klo = 0, khi = -1;
  if (!family_k_interval(family, box, klo, khi)) return {};
  std::vector<BoundedSolution> out;
  out.reserve(static_cast<std::size_t>(khi - klo + 1));
  for (long long k = klo; k <= khi; ++k) {
    out.push_back(BoundedSolution{k, family.x1(k), family.x2(k)});
  }
  return out;
}

namespace {

using detail::BigInt;
using detail::BigMat;

BigMat to_big_integer_matrix(const Mat& m) {
  BigMat out(static_cast<std::size_t>(m.rows()),
             std::vector<BigInt>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double rounded = std::round(m(i, j));
      if (std::abs(m(i, j) - rounded) > 1e-9) {
        throw Error("generator matrix entries must be integers");
      }
      out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          static_cast<long long>(rounded);
    }
  }
  return out;
}

BigMat big_matmul(const BigMat& a, const BigMat& b) {
  const std::size_t rows = a.size();
  const std::size_t inner = b.size();
  const std::size_t cols = inner == 0 ? 0 : b[0].size();
  BigMat out(rows, std::vector<BigInt>(cols, 0));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < inner; ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < cols; ++j) {
        out[i][j] += a[i][k] * b[k][j];
      }
    }
  }
  return out;
}

BigMat block(const BigMat& m, std::size_t row0, std::size_t col0,
             std::size_t rows, std::size_t cols) {
  BigMat out(rows, std::vector<BigInt>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out[i][j] = m[row0 + i][col0 + j];
  }
  return out;
}

// Exact solve A x = b by rational Gaussian elimination.
RationalVec solve_linear_rational(const BigMat& a,
                                  const std::vector<BigInt>& b) {
  const std::size_t n = a.size();
  std::vector<std::vector<BigRational>> m(n,
                                          std::vector<BigRational>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = BigRational(a[i][j]);
    m[i][n] = BigRational(b[i]);
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = n;
    for (std::size_t i = col; i < n; ++i) {
      if (m[i][col] != BigRational(0)) {
        pivot = i;
        break;
      }
    }
    if (pivot == n) throw RankDeficient("singular system in exact solve");
    std::swap(m[col], m[pivot]);
    for (std::size_t i = col + 1; i < n; ++i) {
      if (m[i][col] == BigRational(0)) continue;
      const BigRational f = m[i][col] / m[col][col];
      for (std::size_t j = col; j <= n; ++j) m[i][j] -= f * m[col][j];
    }
  }
  RationalVec x(n);
  for (std::size_t i = n; i-- > 0;) {
    BigRational acc = m[i][n];
    for (std::size_t j = i + 1; j < n; ++j) acc -= m[i][j] * x[j];
    x[i] = acc / m[i][i];
  }
  return x;
}

}  // namespace

HnfSolution hnf_solve(const Mat& m, const IntVec& a, const IntVec& t) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n || n == 0) throw RankDeficient("generator must be square");
  if (a.size() == 0 || a.isZero()) {
    throw EmptyConstraint("zero coefficient vector");
  }
  if (t.size() != n) throw NotInLattice("target dimension mismatch");
  const int N = static_cast<int>(a.size());
  const std::size_t un = static_cast<std::size_t>(n);

  BigMat mbig = to_big_integer_matrix(m);
  if (detail::bareiss_det(mbig) == 0) {
    throw RankDeficient("generator matrix is singular");
  }

  // Exact membership check: M s = t must have an integer solution.
  std::vector<BigInt> tbig(un);
  for (Eigen::Index i = 0; i < n; ++i) tbig[static_cast<std::size_t>(i)] = t(i);
  for (const BigRational& si : solve_linear_rational(mbig, tbig)) {
    if (si.denominator() != 1) {
      throw NotInLattice("target is not a fine-lattice point");
    }
  }

  HnfSolution sol;
  sol.n = static_cast<int>(n);
  sol.N = N;
  const std::size_t total = un * static_cast<std::size_t>(N);
  const std::size_t zero_cols = total - un;

  sol.mtilde.assign(un, std::vector<BigInt>(total, 0));
  for (int blk = 0; blk < N; ++blk) {
    for (std::size_t i = 0; i < un; ++i) {
      for (std::size_t j = 0; j < un; ++j) {
        sol.mtilde[i][static_cast<std::size_t>(blk) * un + j] =
            BigInt(a(blk)) * mbig[i][j];
      }
    }
  }

  // Left-pivot column reduction gives [B | 0]; a column rotation moves the
  // zero block to the front to match the [0 | B] layout used for the
  // positional U/V extraction below.
  detail::ColumnHnf hnf = detail::column_hnf(sol.mtilde);
  sol.u.assign(total, std::vector<BigInt>(total));
  BigMat reduced(un, std::vector<BigInt>(total));
  for (std::size_t j = 0; j < total; ++j) {
    const std::size_t src = (j < zero_cols) ? j + un : j - zero_cols;
    for (std::size_t i = 0; i < total; ++i) sol.u[i][j] = hnf.u[i][src];
    for (std::size_t i = 0; i < un; ++i) reduced[i][j] = hnf.reduced[i][src];
  }

  // Runtime invariants: Mtilde * U = [0 | B] entry-exact; |det U| = 1.
  sol.b = block(reduced, 0, zero_cols, un, un);
  const BigMat check = big_matmul(sol.mtilde, sol.u);
  for (std::size_t i = 0; i < un; ++i) {
    for (std::size_t j = 0; j < total; ++j) {
      const BigInt expect = (j < zero_cols) ? BigInt(0) : sol.b[i][j - zero_cols];
      if (check[i][j] != expect) {
        throw Error("internal: Hermite reduction identity violated");
      }
    }
  }
  BigInt udet = detail::bareiss_det(sol.u);
  if (udet != 1 && udet != -1) {
    throw Error("internal: transform is not unimodular");
  }
  if (detail::bareiss_det(sol.b) == 0) {
    throw Error("internal: right block is singular");
  }

  // s = B^-1 t (exact rationals); integral iff integer solutions exist.
  std::vector<BigRational> s = solve_linear_rational(sol.b, tbig);
  sol.integral = true;
  for (const BigRational& si : s) {
    if (si.denominator() != 1) sol.integral = false;
  }

  for (int blk = 0; blk < N; ++blk) {
    const std::size_t row0 = static_cast<std::size_t>(blk) * un;
    BigMat ug = block(sol.u, row0, 0, un, zero_cols);
    BigMat vg = block(sol.u, row0, zero_cols, un, un);
    sol.homogeneous.push_back(big_matmul(mbig, ug));
    // v_i = M * Vg_i * s
    RationalVec w(un, BigRational(0));
    for (std::size_t i = 0; i < un; ++i) {
      for (std::size_t j = 0; j < un; ++j) w[i] += BigRational(vg[i][j]) * s[j];
    }
    RationalVec v(un, BigRational(0));
    for (std::size_t i = 0; i < un; ++i) {
      for (std::size_t j = 0; j < un; ++j) v[i] += BigRational(mbig[i][j]) * w[j];
    }
    sol.u_blocks.push_back(std::move(ug));
    sol.v_blocks.push_back(std::move(vg));
    sol.particular.push_back(std::move(v));
  }
  return sol;
}

}  // namespace cfl
