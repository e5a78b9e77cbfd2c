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

#ifndef AP_SPACE_HPP
#define AP_SPACE_HPP

#include <cstddef>
#include <span>
#include <string_view>

#include "ap/types.hpp"

namespace ap {

/// How distances in the value space are measured.
///  - euclidean:  rho(x, y) = |x - y|
///  - capped:     rho'(x, y) = min{1, |x - y|}
///  - block_max:  max over consecutive blocks of `block` coordinates of the
///                block Euclidean distance (product of copies of R^block).
enum class MetricKind { euclidean, capped, block_max };

MetricKind parse_metric_kind(std::string_view name);
std::string_view to_string(MetricKind kind);

struct MetricSpaceCfg {
  std::size_t dim = 1;
  MetricKind metric = MetricKind::euclidean;
  Point base_point{0.0};
  std::size_t block = 0;  // block_max only; must divide dim

  MetricSpaceCfg() = default;
  MetricSpaceCfg(std::size_t dim, MetricKind metric, Point base = {}, std::size_t block = 0);

  void validate() const;
  double distance(std::span<const double> x, std::span<const double> y) const;
  /// Distance of the displacement d = x - y.
  double norm_of_difference(std::span<const double> d) const;
  double distance(const Point& x, const Point& y) const { return distance(view(x), view(y)); }
  double norm_of_difference(const Point& d) const { return norm_of_difference(view(d)); }
};

double euclidean_norm(std::span<const double> v);
inline double euclidean_norm(const Point& v) { return euclidean_norm(view(v)); }

}  // namespace ap

#endif  // AP_SPACE_HPP
