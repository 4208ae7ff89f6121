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

#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include <doctest.h>

#include "cfl/diophantine.hpp"

namespace {

using cfl::BigInt;
using cfl::BigRational;
using cfl::IntegerBox;
using cfl::IntVec;
using cfl::Mat;

IntVec iv(std::initializer_list<long long> vals) {
  IntVec v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (long long x : vals) v(i++) = x;
  return v;
}

IntegerBox square_box(long long s) {
  IntegerBox box;
  box.lo = iv({-s, -s});
  box.hi = iv({s, s});
  return box;
}

// All k in a generous scan window whose family member lands inside the box.
std::vector<long long> scan_admissible(const cfl::PairSolutionFamily& fam,
                                       const IntegerBox& box) {
  std::vector<long long> ks;
  for (long long k = -2000; k <= 2000; ++k) {
    IntVec x = iv({fam.x1(k), fam.x2(k)});
    if (box.contains(x)) ks.push_back(k);
  }
  return ks;
}

Mat random_integer_invertible(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> entry(-5, 5);
  Mat m(n, n);
  while (true) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = entry(rng);
    if (std::abs(m.determinant()) > 0.5) return m;
  }
}

}  // namespace

TEST_CASE("extended gcd canonical representatives") {
  const auto check = [](long long a1, long long a2, long long g, long long u1,
                        long long u2) {
    const cfl::GcdResult r = cfl::extended_gcd(a1, a2);
    CHECK(r.g == g);
    CHECK(r.u1 == u1);
    CHECK(r.u2 == u2);
    CHECK(a1 * r.u1 + a2 * r.u2 == r.g);
  };
  check(3, 5, 1, 2, -1);
  check(-1, 1, 1, 0, 1);
  check(12, 18, 6, -1, 1);
  check(0, 7, 7, 0, 1);
  check(7, 0, 7, 1, 0);
  check(-3, -5, 1, -2, 1);
  // |u1| = 1 on both branches: the tie goes to the nonnegative u1.
  check(2, 4, 2, 1, 0);
  CHECK_THROWS_AS(cfl::extended_gcd(0, 0), cfl::BothZero);
}

TEST_CASE("extended gcd minimizes |u1| among all Bezout pairs") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long long> entry(-50, 50);
  int done = 0;
  while (done < 500) {
    const long long a1 = entry(rng), a2 = entry(rng);
    if (a1 == 0 && a2 == 0) continue;
    const cfl::GcdResult r = cfl::extended_gcd(a1, a2);
    CHECK(r.g >= 1);
    CHECK(a1 % r.g == 0);
    CHECK(a2 % r.g == 0);
    CHECK(a1 * r.u1 + a2 * r.u2 == r.g);
    // Every Bezout u1 differs by multiples of a2/g; scan one period each way.
    const long long step = std::abs(a2 / r.g);
    if (step > 0) {
      for (long long u1 = r.u1 - step; u1 <= r.u1 + step; ++u1) {
        if ((r.g - a1 * u1) % a2 != 0) continue;
        const bool smaller = std::llabs(u1) < std::llabs(r.u1);
        const bool tie_negative =
            std::llabs(u1) == std::llabs(r.u1) && u1 >= 0 && r.u1 < 0;
        CHECK_FALSE(smaller);
        CHECK_FALSE(tie_negative);
      }
    }
    ++done;
  }
}

TEST_CASE("pair solver produces the full solution line") {
  CHECK_THROWS_AS(cfl::solve_pair(2, 4, 3), cfl::NoSolution);
  CHECK_THROWS_AS(cfl::solve_pair(0, 0, 1), cfl::BothZero);

  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long long> entry(-9, 9);
  std::uniform_int_distribution<long long> mult(-6, 6);
  int done = 0;
  while (done < 400) {
    const long long a1 = entry(rng), a2 = entry(rng);
    if (a1 == 0 && a2 == 0) continue;
    const long long g = cfl::extended_gcd(a1, a2).g;
    const long long t = g * mult(rng);
    const cfl::PairSolutionFamily fam = cfl::solve_pair(a1, a2, t);
    for (long long k = -10; k <= 10; ++k) {
      CHECK(a1 * fam.x1(k) + a2 * fam.x2(k) == t);
    }
    // Consecutive k give distinct pairs (the family never collapses).
    CHECK((fam.x1(1) != fam.x1(0) || fam.x2(1) != fam.x2(0)));
    ++done;
  }
}

TEST_CASE("bounded family golden: ten admissible members") {
  const cfl::PairSolutionFamily fam = cfl::solve_pair(-1, 1, 1);
  const auto members = cfl::bounded_family(fam, square_box(5));
  REQUIRE(members.size() == 10);
  CHECK(members.front().k == -5);
  CHECK(members.back().k == 4);
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& m = members[i];
    CHECK(-m.x1 + m.x2 == 1);
    CHECK(std::llabs(m.x1) <= 5);
    CHECK(std::llabs(m.x2) <= 5);
    if (i > 0) CHECK(m.k == members[i - 1].k + 1);
  }
}

TEST_CASE("bounded family is empty when a coordinate is pinned out of range") {
  // a = (1, 0) forces x1 = t; t = 7 falls outside the box.
  const cfl::PairSolutionFamily fam = cfl::solve_pair(1, 0, 7);
  CHECK(cfl::bounded_family(fam, square_box(5)).empty());
  long long k_lo = 0, k_hi = 0;
  CHECK_FALSE(cfl::family_k_interval(fam, square_box(5), k_lo, k_hi));
}

TEST_CASE("bounded family matches a direct scan on random instances") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<long long> entry(-7, 7);
  std::uniform_int_distribution<long long> mult(-5, 5);
  std::uniform_int_distribution<long long> radius(1, 9);
  int done = 0;
  while (done < 400) {
    const long long a1 = entry(rng), a2 = entry(rng);
    if (a1 == 0 && a2 == 0) continue;
    const long long g = cfl::extended_gcd(a1, a2).g;
    const long long t = g * mult(rng);
    const IntegerBox box = square_box(radius(rng));
    const cfl::PairSolutionFamily fam = cfl::solve_pair(a1, a2, t);

    const auto got = cfl::bounded_family(fam, box);
    const auto want = scan_admissible(fam, box);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].k == want[i]);
      CHECK(got[i].x1 == fam.x1(want[i]));
      CHECK(got[i].x2 == fam.x2(want[i]));
    }

    long long k_lo = 0, k_hi = 0;
    const bool nonempty = cfl::family_k_interval(fam, box, k_lo, k_hi);
    CHECK(nonempty == !want.empty());
    if (nonempty) {
      CHECK(k_lo == want.front());
      CHECK(k_hi == want.back());
      CHECK(k_hi - k_lo + 1 == static_cast<long long>(want.size()));
    }
    ++done;
  }
}

TEST_CASE("exact solver: single-source case divides out the coefficient") {
  // 3 * I2 * u = (6, -9) -> u = (2, -3).
  const cfl::HnfSolution sol =
      cfl::hnf_solve(Mat::Identity(2, 2), iv({3}), iv({6, -9}));
  CHECK(sol.integral);
  REQUIRE(sol.particular.size() == 1);
  CHECK(sol.particular[0][0] == BigRational(2));
  CHECK(sol.particular[0][1] == BigRational(-3));
  // No homogeneous directions with a single source.
  CHECK(sol.u_blocks[0].at(0).empty());
}

TEST_CASE("exact solver: scalar lattice reduces to the gcd equation") {
  Mat m(1, 1);
  m << 2;
  // 6 u1 + 10 u2 = 2 <=> 3 u1 + 5 u2 = 1: solvable.
  const cfl::HnfSolution sol = cfl::hnf_solve(m, iv({3, 5}), iv({2}));
  CHECK(sol.integral);
  BigRational recon(0);
  recon += BigRational(3) * sol.particular[0][0];
  recon += BigRational(5) * sol.particular[1][0];
  CHECK(recon == BigRational(2));
  // The kernel of [6 10] is generated by the primitive vector +-(5, -3).
  const BigInt k1 = sol.u_blocks[0][0][0];
  const BigInt k2 = sol.u_blocks[1][0][0];
  CHECK(((k1 == 5 && k2 == -3) || (k1 == -5 && k2 == 3)));
}

TEST_CASE("exact solver reports when no integer solution exists") {
  Mat m(1, 1);
  m << 2;
  // 4 u1 + 8 u2 = 2 <=> 2 u1 + 4 u2 = 1: no integer solution, but the
  // rational reconstruction identity still holds exactly.
  const cfl::HnfSolution sol = cfl::hnf_solve(m, iv({2, 4}), iv({2}));
  CHECK_FALSE(sol.integral);
  BigRational recon(0);
  recon += BigRational(2) * sol.particular[0][0];
  recon += BigRational(4) * sol.particular[1][0];
  CHECK(recon == BigRational(2));
}

TEST_CASE("exact solver invariants on random solvable systems") {
  std::mt19937_64 rng(37);
  std::uniform_int_distribution<int> dim(1, 3);
  std::uniform_int_distribution<int> sources(1, 3);
  std::uniform_int_distribution<long long> coeff(-5, 5);
  std::uniform_int_distribution<long long> uval(-4, 4);
  int done = 0;
  while (done < 150) {
    const int n = dim(rng);
    const int N = sources(rng);
    const Mat m = random_integer_invertible(rng, n);
    IntVec a(N);
    bool all_zero = true;
    for (int i = 0; i < N; ++i) {
      a(i) = coeff(rng);
      all_zero = all_zero && a(i) == 0;
    }
    if (all_zero) continue;
    // Build t from a known integer solution so one must exist.
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < N; ++i) {
      Eigen::VectorXd u(n);
      for (int j = 0; j < n; ++j) u(j) = static_cast<double>(uval(rng));
      acc += static_cast<double>(a(i)) * (m * u);
    }
    IntVec t(n);
    for (int j = 0; j < n; ++j) t(j) = std::llround(acc(j));

    const cfl::HnfSolution sol = cfl::hnf_solve(m, a, t);
    CHECK(sol.integral);
    // Exact reconstruction: sum_i a_i v_i = t, coordinate by coordinate.
    for (int j = 0; j < n; ++j) {
      BigRational recon(0);
      for (int i = 0; i < N; ++i) {
        recon += BigRational(BigInt(a(i))) * sol.particular[i][j];
      }
      CHECK(recon == BigRational(BigInt(t(j))));
      // Solvable system: the particular solution is itself integral.
      for (int i = 0; i < N; ++i) {
        CHECK(sol.particular[i][j].denominator() == 1);
      }
    }
    // Homogeneous directions cancel exactly: sum_i a_i (M Ug_i) = 0.
    const std::size_t hom_cols = sol.homogeneous[0][0].size();
    CHECK(hom_cols == static_cast<std::size_t>((N - 1) * n));
    for (std::size_t c = 0; c < hom_cols; ++c) {
      for (int j = 0; j < n; ++j) {
        BigInt s(0);
        for (int i = 0; i < N; ++i) {
          s += BigInt(a(i)) * sol.homogeneous[i][static_cast<std::size_t>(j)][c];
        }
        CHECK(s == 0);
      }
    }
    ++done;
  }
}

TEST_CASE("exact solver kernel reaches every bounded solution") {
  // Scalar lattice, two sources: every (u1, u2) solving the system inside a
  // box must be the particular solution plus an integer kernel multiple.
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<long long> coeff(-5, 5);
  std::uniform_int_distribution<long long> scale(1, 4);
  std::uniform_int_distribution<long long> mult(-3, 3);
  int done = 0;
  while (done < 200) {
    const long long a1 = coeff(rng), a2 = coeff(rng);
    if (a1 == 0 || a2 == 0) continue;  // keep both directions active
    const long long mm = scale(rng);
    Mat m(1, 1);
    m << static_cast<double>(mm);
    const long long g = cfl::extended_gcd(a1, a2).g;
    const long long t = mm * g * mult(rng);
    const cfl::HnfSolution sol = cfl::hnf_solve(m, iv({a1, a2}), iv({t}));
    REQUIRE(sol.integral);
    const BigInt k1 = sol.u_blocks[0][0][0];
    const BigInt k2 = sol.u_blocks[1][0][0];
    const BigRational v1 = sol.particular[0][0] / BigRational(BigInt(mm));
    const BigRational v2 = sol.particular[1][0] / BigRational(BigInt(mm));
    REQUIRE(v1.denominator() == 1);
    REQUIRE(v2.denominator() == 1);
    int found = 0;
    for (long long u1 = -8; u1 <= 8; ++u1) {
      for (long long u2 = -8; u2 <= 8; ++u2) {
        if (a1 * mm * u1 + a2 * mm * u2 != t) continue;
        ++found;
        const BigInt d1 = BigInt(u1) - v1.numerator();
        const BigInt d2 = BigInt(u2) - v2.numerator();
        // (d1, d2) must be an exact integer multiple of (k1, k2).
        CHECK(d1 * k2 == d2 * k1);
        if (k1 != 0) {
          CHECK(d1 % k1 == 0);
        } else {
          CHECK(d1 == 0);
          CHECK(d2 % k2 == 0);
        }
      }
    }
    if (found > 0) ++done;
  }
}

TEST_CASE("exact solver input validation") {
  const Mat id = Mat::Identity(2, 2);
  CHECK_THROWS_AS(cfl::hnf_solve(id, iv({0, 0}), iv({1, 1})),
                  cfl::EmptyConstraint);
  CHECK_THROWS_AS(cfl::hnf_solve(id, iv({1}), iv({1})), cfl::NotInLattice);
  Mat singular(2, 2);
  singular << 1, 2, 2, 4;
  CHECK_THROWS_AS(cfl::hnf_solve(singular, iv({1}), iv({1, 1})),
                  cfl::RankDeficient);
  Mat fractional(2, 2);
  fractional << 1, 0.5, 0, 1;
  CHECK_THROWS_AS(cfl::hnf_solve(fractional, iv({1}), iv({1, 1})), cfl::Error);
  Mat doubled = 2.0 * Mat::Identity(2, 2);
  CHECK_THROWS_AS(cfl::hnf_solve(doubled, iv({1}), iv({1, 1})),
                  cfl::NotInLattice);
}
