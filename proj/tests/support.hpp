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

// Shared builders for the unit tests.

#ifndef AP_TESTS_SUPPORT_HPP
#define AP_TESTS_SUPPORT_HPP

#include <cmath>
#include <numbers>
#include <random>

#include "ap/expr.hpp"

namespace ap::testing {

inline BasisPtr basis_1_sqrt2() {
  return std::make_shared<const FrequencyBasis>(std::vector<double>{1.0, std::sqrt(2.0)});
}

inline BasisPtr basis_1_sqrt2_pi() {
  return std::make_shared<const FrequencyBasis>(
      std::vector<double>{1.0, std::sqrt(2.0), std::numbers::pi});
}

/// Real scalar trig polynomial with `terms` distinct nonzero frequencies in
/// [-3, 3]^width, coefficients uniform in the unit square, plus a constant.
inline FuncExpr random_trig(std::mt19937_64& rng, const BasisPtr& basis, int terms, std::size_t dim = 1) {
  std::uniform_int_distribution<int> fd(-3, 3);
  std::uniform_real_distribution<double> cd(-1.0, 1.0);
  std::vector<std::pair<CPoint, IntVec>> out;
  std::vector<IntVec> used;
  CPoint c0(dim);
  for (auto& c : c0) c = {cd(rng), 0.0};
  out.emplace_back(c0, IntVec(basis->size(), 0));
  used.push_back(IntVec(basis->size(), 0));
  while (static_cast<int>(used.size()) < 2 * terms + 1) {
    IntVec k(basis->size());
    for (auto& x : k) x = fd(rng);
    IntVec mk(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) mk[i] = -k[i];
    if (std::find(used.begin(), used.end(), k) != used.end()) continue;
    if (std::find(used.begin(), used.end(), mk) != used.end()) continue;
    CPoint c(dim), cc(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      c[d] = {0.5 * cd(rng), 0.5 * cd(rng)};
      cc[d] = std::conj(c[d]);
    }
    out.emplace_back(c, k);
    out.emplace_back(cc, mk);
    used.push_back(k);
    used.push_back(mk);
  }
  return trig_poly(basis, dim, std::move(out));
}

}  // namespace ap::testing

#endif  // AP_TESTS_SUPPORT_HPP
