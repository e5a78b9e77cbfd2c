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

// Covering points, almost periodic partitions of the line, and level splits.

#ifndef AP_PARTITION_HPP
#define AP_PARTITION_HPP

#include <cstddef>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "ap/expr.hpp"
#include "ap/metrics.hpp"
#include "ap/perturb.hpp"

namespace ap {

/// Uniform hash grid over R^dim for radius queries. Correct for any metric
/// whose distance dominates every coordinate difference (euclidean, block
/// max, and the capped metric for radii <= 1).
class PointIndex {
 public:
  PointIndex(std::size_t dim, double cell);

  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<Point>& points() const noexcept { return points_; }
  std::size_t insert(Point p);

  /// Indices of points q with space.distance(p, q) < r, ascending. Cost
  /// grows with (2r / cell + 1)^dim; cell = 2r gives 2^dim cells.
  void within(const Point& p, double r, const MetricSpaceCfg& space, std::vector<std::size_t>& out) const;
  /// Smallest such index.
  std::optional<std::size_t> first_within(const Point& p, double r, const MetricSpaceCfg& space) const;
  /// Indices in the cells meeting the cube of half-width r around p,
  /// unfiltered and unsorted.
  void candidates(const Point& p, double r, std::vector<std::size_t>& out) const;

 private:
  using Key = boost::container::small_vector<std::int64_t, 8>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  Key key_of(const Point& p) const;

  std::size_t dim_;
  double cell_;
  std::vector<Point> points_;
  std::unordered_map<Key, std::vector<std::size_t>, KeyHash> cells_;
};

struct CoverResult {
  std::vector<Point> centers;
  /// kappa~ of {t : f(t) within delta of a returned center}.
  AverageEstimate residual;
  /// Residual with the first n + 1 centers, by the limsup rule.
  std::vector<double> residual_profile;
};

/// Greedy cover of the sampled values of f on the largest-horizon grid: a
/// sample at distance >= delta from all centers becomes a new center. The
/// result is the shortest prefix whose uncovered density is below
/// eps_resid. Throws StageFailure when max_centers is reached first.
CoverResult cover_points(const FuncExpr& f, double delta, double eps_resid, const MetricSpaceCfg& space,
                         const AveragingScheme& scheme, std::size_t max_centers = 100000);

/// Same, over the values of several trajectories; the residual is the
/// fraction of (trajectory, sample) pairs left uncovered.
CoverResult cover_points_bundle(const std::vector<FuncExpr>& trajectories, double delta,
                                double eps_resid, const MetricSpaceCfg& space,
                                const AveragingScheme& scheme, std::size_t max_centers = 100000);

struct PartitionOptions {
  std::size_t depth = 1;  // J of the per-center perturbations
  double resid_target = 0.05;
  std::size_t max_centers = 100000;
  /// Short scheme for the per-center tau0 scans.
  AveragingScheme scan{{20, 40, 80}, 2e-2, 3, "pairwise"};
  double probe_ratio = 1.4142135623730951;
};

struct PartitionFamily {
  std::vector<SetExpr> sets;     // T_j, pairwise disjoint
  std::vector<SetExpr> primed;   // T'_j
  std::vector<Point> points;     // x_j
  double eps = 0.0;
  MetricSpaceCfg space;
  double b = 0.0;
  AverageEstimate residual_density;    // kappa~ of the union
  std::vector<double> residual_profile;  // kappa~ of the union of the first n + 1 sets
  AverageEstimate cover_residual;
  std::optional<FrequencyModule> module_report;
  std::vector<PerturbationSeries> perturbations;
  std::shared_ptr<const CellLocator> locator;
  bool trivial = false;

  /// Index j with t in T_j, through the locator.
  std::optional<std::size_t> member_index(double t) const;
  /// Same through the Diff-chain sets, one by one.
  std::optional<std::size_t> member_index_linear(double t) const;
};

/// Partition {T_j} with rho(f(t), x_j) < eps on T_j. Constant-like f gives
/// a single full-line set.
PartitionFamily build_partition(const FuncExpr& f, double eps, const MetricSpaceCfg& space,
                                const AveragingScheme& scheme, const PartitionOptions& options = {});

/// T with f < a + eps on T and f > a off T, for scalar f.
SetExpr level_split(const FuncExpr& f, double a, double eps, const AveragingScheme& scheme,
                    const PartitionOptions& options = {});

/// True when the capped Besicovitch distance from f to its mean is < 1e-9;
/// the mean is returned through `mean`.
bool constant_like(const FuncExpr& f, const MetricSpaceCfg& space, const AveragingScheme& scheme,
                   Point* mean = nullptr);

/// First generator of freq_module(f), or nullopt for the zero module.
std::optional<IntVec> first_generator(const FuncExpr& f);

}  // namespace ap

#endif  // AP_PARTITION_HPP
