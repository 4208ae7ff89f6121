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

#ifndef CFL_DIOPHANTINE_HPP
#define CFL_DIOPHANTINE_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>
#include <cstdint>
#include <vector>

#include "cfl/lattice.hpp"

namespace cfl {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::rational<BigInt>;
using BigIntMatrix = std::vector<std::vector<BigInt>>;        // row-major
using RationalVec = std::vector<BigRational>;

// Exact integer machinery for solving t = sum_i a_i x_i: extended gcd, the
// two-variable solution family, and the Hermite-normal-form solver for the
// general n-dimensional system.

struct GcdResult {
  long long g;   // gcd >= 1
  long long u1;  // a1*u1 + a2*u2 = g
  long long u2;
};

// Extended Euclid with a canonical representative: among all Bezout pairs,
// the one minimizing |u1| (on the rare exact tie, the positive u1).
// Throws BothZero on (0, 0).
GcdResult extended_gcd(long long a1, long long a2);

// All integer solutions of a1*x1 + a2*x2 = t:
//   x1(k) = u1*(t/g) + (a2/g)*k,   x2(k) = u2*(t/g) - (a1/g)*k,  k in Z.
struct PairSolutionFamily {
  long long a1, a2;
  long long g;       // gcd(a1, a2)
  long long u1, u2;  // canonical Bezout pair
  long long t;       // right-hand side; g | t guaranteed

  long long x1(long long k) const { return u1 * (t / g) + (a2 / g) * k; }
  long long x2(long long k) const { return u2 * (t / g) - (a1 / g) * k; }
};

// Throws BothZero when a1 = a2 = 0, NoSolution when gcd does not divide t.
PairSolutionFamily solve_pair(long long a1, long long a2, long long t);

struct BoundedSolution {
  long long k;
  long long x1;
  long long x2;
};

// Exactly the k whose (x1(k), x2(k)) fall inside the box (2-dimensional,
// inclusive).  The k-interval is derived analytically from the two linear
// constraints with exact integer floor/ceil division, then intersected; the
// result lists consecutive k in increasing order (possibly empty).
std::vector<BoundedSolution> bounded_family(const PairSolutionFamily& family,
                                            const IntegerBox& box);

// The admissible k-interval itself (allocation-free form of bounded_family
// for hot loops).  Returns false when no k is admissible.
bool family_k_interval(const PairSolutionFamily& family, const IntegerBox& box,
                       long long& k_lo, long long& k_hi);

// Hermite-normal-form solution of t = sum_i a_i M u_i (x_i = M u_i in the
// lattice generated by integer matrix M, i = 1..N):
// stack the blocks a_i*M into Mtilde (n x nN), column-reduce with unimodular
// U so that Mtilde * U = [0 | B] with B (n x n) invertible lower triangular.
// Row block i of U splits as [Ug_i | Vg_i] with Ug_i (n x (N-1)n) generating
// the homogeneous solutions and Vg_i giving the particular solution
// v_i = M Vg_i B^-1 t (exact rationals).
struct HnfSolution {
  int n = 0;  // lattice dimension
  int N = 0;  // number of sources
  BigIntMatrix mtilde;              // n x nN input
  BigIntMatrix u;                   // nN x nN unimodular
  BigIntMatrix b;                   // n x n invertible
  std::vector<BigIntMatrix> u_blocks;      // per source: n x (N-1)n
  std::vector<BigIntMatrix> v_blocks;      // per source: n x n
  std::vector<BigIntMatrix> homogeneous;   // per source: M * Ug_i, n x (N-1)n
  std::vector<RationalVec> particular;     // per source: v_i, length n
  bool integral = false;  // true iff B^-1 t is integral (integer solutions exist)
};

// M integer n x n full rank (NotInLattice if entries are not integers within
// 1e-9, RankDeficient if singular); a nonzero length-N; t integer length n.
// Verifies Mtilde*U = [0|B] entry-exact and |det U| = 1, throwing on any
// violation.  The reconstruction sum_i a_i v_i = t holds exactly (rational
// arithmetic) whether or not integer solutions exist; `integral` reports
// their existence.
HnfSolution hnf_solve(const Mat& m, const IntVec& a, const IntVec& t);

}  // namespace cfl

#endif  // CFL_DIOPHANTINE_HPP
