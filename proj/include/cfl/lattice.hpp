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

#ifndef CFL_LATTICE_HPP
#define CFL_LATTICE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cfl/errors.hpp"

namespace cfl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using IntVec = Eigen::Matrix<long long, Eigen::Dynamic, 1>;

// Relative slack used everywhere a floating-point metric decides between
// candidates: values within this relative window count as tied and fall
// through to the canonical integer tie-break.
inline constexpr double kMetricSlack = 1e-12;

// Canonical order on integer coefficient vectors: compare coordinate-wise
// starting from the LAST coordinate, smaller value first.  All decoders and
// enumerators break exact metric ties with this order so results are
// reproducible across platforms and traversal orders.
bool tie_less(const IntVec& a, const IntVec& b);

// Sign normalization for +/-v equivalence classes (shortest-vector results):
// flips v so its first nonzero coordinate is positive.
IntVec sign_normalize(IntVec v);

// Inclusive per-coordinate integer bounds for constrained searches.
struct IntegerBox {
  IntVec lo;
  IntVec hi;

  bool contains(const IntVec& u) const;
  // Throws EmptyConstraint if some coordinate has lo > hi, RankDeficient-free.
  void validate(Eigen::Index dim) const;
};

// Full-rank real lattice given by basis columns.
struct Lattice {
  Mat basis;        // n x n, columns generate the lattice
  double abs_det;   // |det(basis)|

  Eigen::Index dim() const { return basis.rows(); }
};

// Throws RankDeficient when |det| <= tol * scale of the basis.
Lattice make_lattice(const Mat& basis);

struct CvpResult {
  IntVec coeffs;        // integer coordinates in the basis
  Vec point;            // basis * coeffs
  double distance2;     // squared Euclidean distance to the target
  std::uint64_t nodes;  // search-tree nodes visited (diagnostics)
};

// Optional restrictions applied during closest-point search.
struct CvpConstraints {
  const IntegerBox* box = nullptr;  // per-coordinate bounds on coeffs
  // Leaf filter: a candidate is eligible only if accept(coeffs) is true.
  // Rejected leaves never shrink the search radius, so the search stays
  // exact for arbitrary membership predicates.
  std::function<bool(const IntVec&)> accept;
};

// Exact closest lattice point by depth-first sphere enumeration over the
// QR-triangularized basis, visiting candidates per level in distance order
// (zigzag around the unconstrained center, clipped to the box).  The first
// leaf reached is the (constrained) rounding estimate, which seeds the
// radius; afterwards the radius shrinks on every accepted leaf.  Tied leaves
// (within kMetricSlack relative) resolve by tie_less on the coefficients.
//
// Throws EmptyConstraint when the box is empty or the filter rejects every
// point in it.
CvpResult closest_point(const Lattice& lat, const Vec& target,
                        const CvpConstraints& cons = {});

// Same search for a tall generator (rows >= cols, full column rank), as
// arises from stacked/augmented constructions: the component of the target
// orthogonal to the column span contributes a constant included in
// distance2.
CvpResult closest_point(const Mat& basis, const Vec& target,
                        const CvpConstraints& cons = {});

struct SvpResult {
  IntVec coeffs;  // sign-normalized: first nonzero coordinate positive
  double norm2;   // value of the quadratic form at coeffs
};

// Shortest nonzero vector of the quadratic form u^T G u, G symmetric
// positive definite (Cholesky + sphere enumeration, zero excluded).
// Ties resolve by tie_less on sign-normalized coefficients, so for G = I
// the result is the first standard basis vector.  When box is given the
// search is restricted to coefficient vectors inside it (the box must
// contain a nonzero point).
// Throws NotPositiveDefinite if the Cholesky factorization fails,
// EmptyConstraint when the box excludes every nonzero vector.
SvpResult shortest_vector(const Mat& gram, const IntegerBox* box = nullptr);

// Euclidean minimum distance of the lattice (length of its shortest vector).
// Enumeration-based; throws TooLarge beyond max_dim dimensions.
double minimum_distance(const Lattice& lat, Eigen::Index max_dim = 16);

// Reduction of x modulo the lattice: x minus its closest lattice point.
// Points on Voronoi boundaries resolve deterministically via the canonical
// tie-break, so mod_lattice is a pure function.
Vec mod_lattice(const Vec& x, const Lattice& lat);

// A pair of nested lattices and the finite codebook of fine-lattice points
// inside the Voronoi region of the coarse lattice.
struct NestedLatticeCode {
  Lattice fine;
  Lattice coarse;
  std::uint64_t index;              // |fine / coarse|, exact
  std::vector<IntVec> coeffs;       // codeword coordinates in the fine basis
  std::vector<Vec> codewords;       // the points themselves, canonical order
  double second_moment_per_dim;     // average ||x||^2 / n over the codebook

  Eigen::Index dim() const { return fine.dim(); }
};

// Builds the codebook by exact coset enumeration: checks nesting
// (fine^-1 * coarse integral to 1e-9, else NotNested), computes the index
// as an exact integer determinant, enumerates one representative per coset
// via the Hermite normal form of the quotient, and reduces each modulo the
// coarse lattice.  Throws TooLarge when the index exceeds max_index.
NestedLatticeCode build_nested_code(const Mat& fine_basis,
                                    const Mat& coarse_basis,
                                    std::uint64_t max_index = 1000000);

// Average energy per dimension of a finite set of points.
// Throws EmptyCodebook on an empty set.
double second_moment(const std::vector<Vec>& points);

}  // namespace cfl

#endif  // CFL_LATTICE_HPP
