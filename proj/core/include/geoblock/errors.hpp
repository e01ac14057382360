// Copyright 2026 The Geoblock Authors
//
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

#ifndef GEOBLOCK_ERRORS_HPP_
#define GEOBLOCK_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace geoblock {

// Argument outside the mathematical domain of an operation (t <= 0, singular
// basis, point off the upper half-plane, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Evaluation outside the sampled or supported range.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input the engines deliberately do not model (billiard boundary endpoints,
// rigorous bounds on infinite-covolume groups).
class UnsupportedInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An enumeration ran out of its word-length budget before its completeness
// certificate held. `certified_t` is the largest radius that is still exact.
class BudgetExceededError : public std::runtime_error {
 public:
  BudgetExceededError(const std::string& what, double certified_t)
      : std::runtime_error(what), certified_t_(certified_t) {}
  double certified_t() const { return certified_t_; }

 private:
  double certified_t_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace geoblock

#endif  // GEOBLOCK_ERRORS_HPP_
