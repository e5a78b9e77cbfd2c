// Copyright 2026 The apselect Authors.
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

#ifndef AP_FREQUENCY_HPP
#define AP_FREQUENCY_HPP

#include <cstddef>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "ap/types.hpp"

namespace ap {

/// Real numbers beta_1..beta_m against which every frequency is written as an
/// integer vector. Rational independence is configuration, not something we
/// can check; only pairs explicitly declared dependent are rejected.
class FrequencyBasis {
 public:
  FrequencyBasis(std::vector<double> reals, bool independent = true,
                 std::vector<std::pair<std::size_t, std::size_t>> dependent_pairs = {},
                 std::int64_t scale_num = 1, std::int64_t scale_den = 1);

  std::size_t size() const noexcept { return reals_.size(); }
  /// Real value of basis element i, including the common rational scale.
  double element(std::size_t i) const { return scale_ * reals_.at(i); }
  const std::vector<double>& reals() const noexcept { return reals_; }
  bool independent() const noexcept { return independent_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& dependent_pairs() const noexcept {
    return dependent_pairs_;
  }
  std::int64_t scale_num() const noexcept { return scale_num_; }
  std::int64_t scale_den() const noexcept { return scale_den_; }

  /// Real value of sum_i k_i beta_i.
  double value(const IntVec& k) const;

  /// If x equals n * beta_i for a positive integer n (relative tolerance
  /// 1e-12), the integer vector n * e_i.
  std::optional<IntVec> express(double x) const;

  friend bool operator==(const FrequencyBasis& a, const FrequencyBasis& b);

 private:
  std::vector<double> reals_;
  bool independent_;
  std::vector<std::pair<std::size_t, std::size_t>> dependent_pairs_;
  std::int64_t scale_num_, scale_den_;
  double scale_;
};

using BasisPtr = std::shared_ptr<const FrequencyBasis>;

/// Finitely generated subgroup of the frequencies over a basis. Membership is
/// exact: generators are brought to Hermite normal form once.
class FrequencyModule {
 public:
  FrequencyModule(BasisPtr basis, std::vector<IntVec> generators);

  const BasisPtr& basis() const noexcept { return basis_; }
  const std::vector<IntVec>& generators() const noexcept { return generators_; }
  /// Rows of the Hermite normal form (pivots strictly increasing, positive).
  const std::vector<IntVec>& hermite_rows() const noexcept { return hnf_; }
  bool is_zero() const noexcept { return hnf_.empty(); }

  bool contains(const IntVec& lambda) const;
  /// True iff every generator of `other` lies in this module.
  bool contains(const FrequencyModule& other) const;

  FrequencyModule operator+(const FrequencyModule& other) const;

 private:
  BasisPtr basis_;
  std::vector<IntVec> generators_;
  std::vector<IntVec> hnf_;
};

/// Row-reduce integer generators to Hermite normal form. Throws on int64
/// overflow.
std::vector<IntVec> hermite_normal_form(std::vector<IntVec> rows, std::size_t width);

}  // namespace ap

#endif  // AP_FREQUENCY_HPP
