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

#include "ap/space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ap {

MetricKind parse_metric_kind(std::string_view name) {
  if (name == "euclidean") return MetricKind::euclidean;
  if (name == "capped") return MetricKind::capped;
  if (name == "block_max" || name == "max") return MetricKind::block_max;
  throw InvalidArgument("unknown metric kind '" + std::string(name) + "'");
}

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::euclidean: return "euclidean";
    case MetricKind::capped: return "capped";
    case MetricKind::block_max: return "block_max";
  }
  return "?";
}

MetricSpaceCfg::MetricSpaceCfg(std::size_t dim_, MetricKind metric_, Point base, std::size_t block_)
    : dim(dim_), metric(metric_), base_point(std::move(base)), block(block_) {
  if (base_point.empty()) base_point.assign(dim, 0.0);
  validate();
}

void MetricSpaceCfg::validate() const {
  require(dim >= 1, "space: dim must be >= 1");
  require(base_point.size() == dim, "space: base_point must have dim components");
  for (double x : base_point) require(std::isfinite(x), "space: base_point must be finite");
  if (metric == MetricKind::block_max)
    require(block >= 1 && dim % block == 0, "space: block_max needs a block size dividing dim");
}

double euclidean_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double MetricSpaceCfg::norm_of_difference(std::span<const double> d) const {
  switch (metric) {
    case MetricKind::euclidean: return euclidean_norm(d);
    case MetricKind::capped: return std::min(1.0, euclidean_norm(d));
    case MetricKind::block_max: {
      double m = 0.0;
      for (std::size_t i = 0; i < d.size(); i += block)
        m = std::max(m, euclidean_norm(d.subspan(i, std::min(block, d.size() - i))));
      return m;
    }
  }
  return 0.0;
}

double MetricSpaceCfg::distance(std::span<const double> x, std::span<const double> y) const {
  require(x.size() == y.size(), "distance: dimension mismatch");
  Point d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
  return norm_of_difference(d);
}

}  // namespace ap
