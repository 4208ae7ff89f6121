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

#ifndef CFL_ERRORS_HPP
#define CFL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cfl {

// Base class for all library errors so callers can catch the whole family.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define CFL_DEFINE_ERROR(Name)                                    \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

// A search box or candidate set turned out empty.
CFL_DEFINE_ERROR(EmptyConstraint);
// A basis matrix is singular or numerically rank deficient.
CFL_DEFINE_ERROR(RankDeficient);
// A Gram matrix is not positive definite.
CFL_DEFINE_ERROR(NotPositiveDefinite);
// The coarse lattice is not a sublattice of the fine lattice.
CFL_DEFINE_ERROR(NotNested);
// An enumeration would exceed the configured size cap.
CFL_DEFINE_ERROR(TooLarge);
// A codebook or support set is empty.
CFL_DEFINE_ERROR(EmptyCodebook);
// gcd(0, 0) requested.
CFL_DEFINE_ERROR(BothZero);
// A linear diophantine equation has no integer solution.
CFL_DEFINE_ERROR(NoSolution);
// The effective channel coefficient is (numerically) zero.
CFL_DEFINE_ERROR(DegenerateGeometry);
// A point expected to lie in a lattice does not.
CFL_DEFINE_ERROR(NotInLattice);
// A probability that must be positive is zero.
CFL_DEFINE_ERROR(ZeroProbability);
// A simulation/CLI configuration file is invalid.
CFL_DEFINE_ERROR(ConfigError);

#undef CFL_DEFINE_ERROR

}  // namespace cfl

#endif  // CFL_ERRORS_HPP
