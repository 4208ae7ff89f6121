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

#include "cfl/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "exact_hnf.hpp"

namespace cfl {

bool tie_less(const IntVec& a, const IntVec& b) {
  const Eigen::Index n = std::min(a.size(), b.size());
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    if (a(i) != b(i)) return a(i) < b(i);
  }
  return a.size() < b.size();
}

IntVec sign_normalize(IntVec v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) != 0) {
      if (v(i) < 0) v = -v;
      return v;
    }
  }
  return v;
}

bool IntegerBox::contains(const IntVec& u) const {
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u(i) < lo(i) || u(i) > hi(i)) return false;
  }
  return true;
}

void IntegerBox::validate(Eigen::Index dim) const {
  if (lo.size() != dim || hi.size() != dim) {
    throw EmptyConstraint("box dimension mismatch");
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (lo(i) > hi(i)) {
      std::ostringstream os;
      os << "box coordinate " << i << " has lo " << lo(i) << " > hi " << hi(i);
      throw EmptyConstraint(os.str());
    }
  }
}

Lattice make_lattice(const Mat& basis) {
  if (basis.rows() != basis.cols() || basis.rows() == 0) {
    throw RankDeficient("basis must be square and nonempty");
  }
  Eigen::FullPivLU<Mat> lu(basis);
  const double det = lu.determinant();
  if (!lu.isInvertible() || std::abs(det) <= 1e-10) {
    throw RankDeficient("basis is singular or near-singular");
  }
  return Lattice{basis, std::abs(det)};
}

namespace {

constexpr long long kNoBound = std::numeric_limits<long long>::max() / 4;

// One level of the depth-first sphere search.  Candidates are produced by
// two marchers walking away from the real-valued center, merged in distance
// order, clipped to the per-coordinate bounds; the resulting per-level
// sequence is non-decreasing in contribution, which makes "first candidate
// over the radius" a valid level cutoff.
struct LevelState {
  double center = 0.0;
  double partial = 0.0;  // squared distance accumulated at outer levels
  long long next_up = 0;
  long long next_down = 0;
  long long lo = -kNoBound;
  long long hi = kNoBound;
  bool prefer_up = true;  // deterministic preference on exact half ties

  void reset(double c, double partial_in, long long lo_in, long long hi_in) {
    center = c;
    partial = partial_in;
    lo = lo_in;
    hi = hi_in;
    const long long base = std::llround(c);
    next_up = std::max(base, lo);
    next_down = std::min(base - 1, hi);
    prefer_up = static_cast<double>(base) >= c;
  }

  bool next(long long& out) {
    const bool up_ok = next_up <= hi;
    const bool down_ok = next_down >= lo;
    if (!up_ok && !down_ok) return false;
    bool take_up;
    if (up_ok && down_ok) {
      const double du = std::abs(static_cast<double>(next_up) - center);
      const double dd = std::abs(center - static_cast<double>(next_down));
      take_up = (du < dd) || (du == dd && prefer_up);
    } else {
      take_up = up_ok;
    }
    if (take_up) {
      out = next_up++;
    } else {
      out = next_down--;
    }
    return true;
  }
};

struct EnumResult {
  bool found = false;
  double best2 = std::numeric_limits<double>::infinity();
  IntVec best;
  std::uint64_t nodes = 0;
};

// Depth-first enumeration of integer vectors u minimizing ||R u - y||^2 for
// upper-triangular R, subject to optional per-coordinate bounds, a leaf
// acceptance predicate, and optional exclusion of u = 0.  The radius shrinks
// only on accepted leaves; ties within kMetricSlack relative resolve by
// tie_less (after sign normalization when requested).
EnumResult enumerate_sphere(const Mat& R, const Vec& y, const IntegerBox* box,
                            bool exclude_zero, bool sign_norm,
                            const std::function<bool(const IntVec&)>& accept) {
  const Eigen::Index n = R.cols();
  std::vector<LevelState> st(static_cast<std::size_t>(n));
  IntVec u = IntVec::Zero(n);
  EnumResult out;
  double bound = std::numeric_limits<double>::infinity();

  auto level_lo = [&](Eigen::Index k) { return box ? box->lo(k) : -kNoBound; };
  auto level_hi = [&](Eigen::Index k) { return box ? box->hi(k) : kNoBound; };

  auto init_level = [&](Eigen::Index k, double partial) {
    double resid = y(k);
    for (Eigen::Index j = k + 1; j < n; ++j) resid -= R(k, j) * static_cast<double>(u(j));
    st[static_cast<std::size_t>(k)].reset(resid / R(k, k), partial, level_lo(k),
                                          level_hi(k));
  };

  Eigen::Index k = n - 1;
  init_level(k, 0.0);
  while (true) {
    LevelState& lvl = st[static_cast<std::size_t>(k)];
    long long cand;
    bool have = lvl.next(cand);
    double total = 0.0;
    if (have) {
      const double diff = R(k, k) * (static_cast<double>(cand) - lvl.center);
      total = lvl.partial + diff * diff;
      if (total > bound) have = false;  // monotone per level: cut the level
    }
    if (!have) {
      ++k;
      if (k >= n) break;
      continue;
    }
    u(k) = cand;
    ++out.nodes;
    if (k > 0) {
      --k;
      init_level(k, total);
      continue;
    }
    // Leaf.
    if (exclude_zero && u.isZero()) continue;
    if (accept && !accept(u)) continue;
    IntVec v = sign_norm ? sign_normalize(u) : u;
    if (!out.found) {
      out.found = true;
      out.best2 = total;
      out.best = v;
      bound = out.best2 * (1.0 + kMetricSlack);
      continue;
    }
    const double window = kMetricSlack * std::max(out.best2, total);
    if (total < out.best2 - window) {
      out.best2 = total;
      out.best = v;
      bound = out.best2 * (1.0 + kMetricSlack);
    } else if (total <= out.best2 + window) {
      if (tie_less(v, out.best)) out.best = v;
      if (total < out.best2) {
        out.best2 = total;
        bound = out.best2 * (1.0 + kMetricSlack);
      }
    }
  }
  return out;
}

// Triangularize the (possibly tall) basis: returns upper-triangular R with
// positive diagonal and the target split into R-coordinates plus the squared
// norm of its out-of-span component, so
// ||B u - t||^2 = ||R u - y||^2 + offset2.
void triangularize(const Mat& basis, const Vec& target, Mat& R, Vec& y,
                   double& offset2) {
  const Eigen::Index n = basis.cols();
  Eigen::HouseholderQR<Mat> qr(basis);
  Mat full = qr.matrixQR().triangularView<Eigen::Upper>();
  R = full.topRows(n);
  Vec rotated = qr.householderQ().transpose() * target;
  y = rotated.head(n);
  offset2 = rotated.tail(rotated.size() - n).squaredNorm();
  const double scale = std::max(1.0, R.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(R(i, i)) <= 1e-12 * scale) {
      throw RankDeficient("triangular factor has a vanishing pivot");
    }
    if (R(i, i) < 0) {
      R.row(i) = -R.row(i);
      y(i) = -y(i);
    }
  }
}

CvpResult closest_point_impl(const Mat& basis, const Vec& target,
                             const CvpConstraints& cons) {
  const Eigen::Index n = basis.cols();
  if (target.size() != basis.rows()) throw Error("target dimension mismatch");
  if (cons.box) cons.box->validate(n);
  Mat R;
  Vec y;
  double offset2 = 0.0;
  triangularize(basis, target, R, y, offset2);
  EnumResult r = enumerate_sphere(R, y, cons.box, /*exclude_zero=*/false,
                                  /*sign_norm=*/false, cons.accept);
  if (!r.found) {
    throw EmptyConstraint("no lattice point satisfies the search constraints");
  }
  CvpResult res;
  res.coeffs = r.best;
  res.point = basis * r.best.cast<double>();
  res.distance2 = (res.point - target).squaredNorm();
  res.nodes = r.nodes;
  return res;
}

}  // namespace

CvpResult closest_point(const Lattice& lat, const Vec& target,
                        const CvpConstraints& cons) {
  return closest_point_impl(lat.basis, target, cons);
}

CvpResult closest_point(const Mat& basis, const Vec& target,
                        const CvpConstraints& cons) {
  if (basis.rows() < basis.cols()) {
    throw RankDeficient("generator must have at least as many rows as columns");
  }
  return closest_point_impl(basis, target, cons);
}

SvpResult shortest_vector(const Mat& gram, const IntegerBox* box) {
  if (gram.rows() != gram.cols() || gram.rows() == 0) {
    throw NotPositiveDefinite("Gram matrix must be square and nonempty");
  }
  if (box) box->validate(gram.rows());
  const Mat sym = 0.5 * (gram + gram.transpose());
  Eigen::LLT<Mat> llt(sym);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("Cholesky factorization failed");
  }
  Mat R = llt.matrixU();
  const double scale = std::max(1.0, sym.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < R.rows(); ++i) {
    if (!(R(i, i) > 1e-150) || !std::isfinite(R(i, i)) ||
        R(i, i) * R(i, i) <= 1e-300 * scale) {
      throw NotPositiveDefinite("Gram matrix is numerically semidefinite");
    }
  }
  Vec y = Vec::Zero(R.cols());
  EnumResult r = enumerate_sphere(R, y, box, /*exclude_zero=*/true,
                                  /*sign_norm=*/true, nullptr);
  if (!r.found) {
    if (box) throw EmptyConstraint("box excludes every nonzero vector");
    throw NotPositiveDefinite("no nonzero vector found");
  }
  return SvpResult{r.best, r.best2};
}

double minimum_distance(const Lattice& lat, Eigen::Index max_dim) {
  if (lat.dim() > max_dim) {
    throw TooLarge("minimum_distance: dimension exceeds enumeration cap");
  }
  const Mat gram = lat.basis.transpose() * lat.basis;
  return std::sqrt(shortest_vector(gram).norm2);
}

Vec mod_lattice(const Vec& x, const Lattice& lat) {
  return x - closest_point(lat, x).point;
}

NestedLatticeCode build_nested_code(const Mat& fine_basis,
                                    const Mat& coarse_basis,
                                    std::uint64_t max_index) {
  NestedLatticeCode code;
  code.fine = make_lattice(fine_basis);
  code.coarse = make_lattice(coarse_basis);
  const Eigen::Index n = code.fine.dim();
  if (code.coarse.dim() != n) throw NotNested("dimension mismatch");

  // Nesting check: fine^-1 * coarse must be integral.
  Eigen::FullPivLU<Mat> lu(fine_basis);
  const Mat t_real = lu.solve(coarse_basis);
  detail::BigMat t(static_cast<std::size_t>(n),
                   std::vector<detail::BigInt>(static_cast<std::size_t>(n)));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double rounded = std::round(t_real(i, j));
      if (std::abs(t_real(i, j) - rounded) > 1e-9) {
        std::ostringstream os;
        os << "coarse basis column " << j
           << " is not an integer combination of the fine basis (entry " << i
           << " = " << t_real(i, j) << ")";
        throw NotNested(os.str());
      }
      t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          static_cast<long long>(rounded);
    }
  }

  detail::BigInt det = detail::bareiss_det(t);
  if (det == 0) throw NotNested("quotient matrix is singular");
  detail::BigInt index = abs(det);
  if (index > max_index) {
    std::ostringstream os;
    os << "codebook size " << index << " exceeds cap " << max_index;
    throw TooLarge(os.str());
  }
  code.index = index.convert_to<std::uint64_t>();

  // One representative per coset of fine/coarse from the Hermite form of the
  // quotient: mixed-radix counter over the diagonal.
  detail::ColumnHnf hnf = detail::column_hnf(t);
  std::vector<long long> radix(static_cast<std::size_t>(n));
  std::uint64_t prod = 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    radix[static_cast<std::size_t>(i)] =
        hnf.reduced[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)]
            .convert_to<long long>();
    prod *= static_cast<std::uint64_t>(radix[static_cast<std::size_t>(i)]);
  }
  if (prod != code.index) throw Error("internal: Hermite diagonal mismatch");

  std::vector<std::pair<IntVec, Vec>> words;
  words.reserve(code.index);
  IntVec rep = IntVec::Zero(n);
  for (std::uint64_t count = 0; count < code.index; ++count) {
    const Vec point = fine_basis * rep.cast<double>();
    const Vec word = mod_lattice(point, code.coarse);
    Vec coeff_real = lu.solve(word);
    IntVec coeff(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      coeff(i) = std::llround(coeff_real(i));
      if (std::abs(coeff_real(i) - static_cast<double>(coeff(i))) > 1e-6) {
        throw Error("internal: codeword left the fine lattice");
      }
    }
    words.emplace_back(coeff, fine_basis * coeff.cast<double>());
    for (Eigen::Index i = 0; i < n; ++i) {
      if (++rep(i) < radix[static_cast<std::size_t>(i)]) break;
      rep(i) = 0;
    }
  }
  std::sort(words.begin(), words.end(),
            [](const auto& a, const auto& b) { return tie_less(a.first, b.first); });
  for (std::size_t i = 1; i < words.size(); ++i) {
    if (!tie_less(words[i - 1].first, words[i].first)) {
      throw Error("internal: duplicate coset representative");
    }
  }
  code.coeffs.reserve(words.size());
  code.codewords.reserve(words.size());
  for (auto& w : words) {
    code.coeffs.push_back(std::move(w.first));
    code.codewords.push_back(std::move(w.second));
  }
  code.second_moment_per_dim = second_moment(code.codewords);
  return code;
}

double second_moment(const std::vector<Vec>& points) {
  if (points.empty()) throw EmptyCodebook("second moment of an empty set");
  double sum = 0.0;
  for (const Vec& p : points) sum += p.squaredNorm();
  return sum / (static_cast<double>(points.size()) *
                static_cast<double>(points.front().size()));
}

}  // namespace cfl
