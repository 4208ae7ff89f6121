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
//
// Exact integer matrix helpers (column Hermite reduction, determinants) on
// arbitrary-precision integers.  Internal to the library; not installed.

#ifndef CFL_EXACT_HNF_HPP
#define CFL_EXACT_HNF_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <vector>

#include "cfl/errors.hpp"

namespace cfl::detail {

using BigInt = boost::multiprecision::cpp_int;
using BigMat = std::vector<std::vector<BigInt>>;  // row-major

inline BigMat big_identity(std::size_t n) {
  BigMat id(n, std::vector<BigInt>(n, 0));
  for (std::size_t i = 0; i < n; ++i) id[i][i] = 1;
  return id;
}

inline void swap_columns(BigMat& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (auto& row : m) std::swap(row[a], row[b]);
}

inline void negate_column(BigMat& m, std::size_t c) {
  for (auto& row : m) row[c] = -row[c];
}

// col[a] -= q * col[b]
inline void shear_column(BigMat& m, std::size_t a, std::size_t b,
                         const BigInt& q) {
  if (q == 0) return;
  for (auto& row : m) row[a] -= q * row[b];
}

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;  // truncates toward zero
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

struct ColumnHnf {
  BigMat reduced;  // a * u, lower triangular in the first rank columns
  BigMat u;        // unimodular column transform, cols(a) x cols(a)
};

// Column-style Hermite reduction of an integer matrix with full row rank:
// reduced = a * u with reduced = [H | 0], H lower triangular, positive
// diagonal, and off-diagonal row entries reduced into [0, H_ii).
// Throws RankDeficient when some pivot row cannot be cleared.
inline ColumnHnf column_hnf(BigMat a) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows == 0 ? 0 : a[0].size();
  BigMat u = big_identity(cols);

  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t p = r;
    if (p >= cols) throw RankDeficient("more pivot rows than columns");
    // Euclidean gcd sweep across columns p..cols-1 on row r.
    for (;;) {
      std::size_t best = cols;
      for (std::size_t j = p; j < cols; ++j) {
        if (a[r][j] == 0) continue;
        if (best == cols || abs(a[r][j]) < abs(a[r][best])) best = j;
      }
      if (best == cols) throw RankDeficient("zero pivot row in Hermite reduction");
      swap_columns(a, p, best);
      swap_columns(u, p, best);
      bool cleared = true;
      for (std::size_t j = p + 1; j < cols; ++j) {
        if (a[r][j] == 0) continue;
        BigInt q = a[r][j] / a[r][p];
        shear_column(a, j, p, q);
        shear_column(u, j, p, q);
        if (a[r][j] != 0) cleared = false;
      }
      if (cleared) break;
    }
    if (a[r][p] < 0) {
      negate_column(a, p);
      negate_column(u, p);
    }
    for (std::size_t j = 0; j < p; ++j) {
      BigInt q = floor_div(a[r][j], a[r][p]);
      shear_column(a, j, p, q);
      shear_column(u, j, p, q);
    }
  }
  return {std::move(a), std::move(u)};
}

// Exact determinant by fraction-free Gaussian elimination (Bareiss).
inline BigInt bareiss_det(BigMat m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  BigInt sign = 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t swap_row = n;
      for (std::size_t i = k + 1; i < n; ++i) {
        if (m[i][k] != 0) {
          swap_row = i;
          break;
        }
      }
      if (swap_row == n) return 0;
      std::swap(m[k], m[swap_row]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
      }
      m[i][k] = 0;
    }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

}  // namespace cfl::detail

#endif  // CFL_EXACT_HNF_HPP
