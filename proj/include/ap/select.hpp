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

// Selections of almost periodic multimaps given by finitely many trajectories.

#ifndef AP_SELECT_HPP
#define AP_SELECT_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ap/partition.hpp"

namespace ap {

/// F(t) = {trajectory_k(t)}.
struct MultiMap {
  std::vector<FuncExpr> trajectories;

  std::size_t dim() const;
  void validate(const MetricSpaceCfg& space) const;
  std::vector<Point> values(double t) const;
  /// min_k rho(y, trajectory_k(t)).
  double distance(const Point& y, double t, const MetricSpaceCfg& space) const;
};

struct GammaSchedule {
  std::size_t n_max = 0;
  std::vector<double> gammas;  // gamma_1 .. gamma_{n_max + 1}

  double gamma(std::size_t n) const { return gammas.at(n - 1); }
  /// sum_{n <= n_max} (gamma_n + gamma_{n+1}).
  double partial_sum() const;
  /// 2 sum_{n > n_max} (gamma_n + gamma_{n+1}) eps, in closed form.
  double tail_bound(double eps) const;
};

GammaSchedule gamma_schedule(std::size_t n_max);

struct ChainLevel {
  std::size_t depth = 0;
  std::size_t partition_size = 0;
  std::size_t cells = 0;
  double max_step = 0.0;      // largest rho(f(n-1; t), f(n; t)) over the cells
  double step_bound = 0.0;    // 2 (gamma_{n-1} + gamma_n) eps; 0 at depth 1
  double max_hausdorff = 0.0; // largest capped Hausdorff distance to the parent set
  AverageEstimate residual;   // kappa~ of the union of the partition
};

struct SelectionCell {
  std::vector<std::size_t> indices;  // j_1 .. j_n
  std::size_t parent = 0;            // cell index one level up (unused at depth 1)
  double representative = 0.0;       // t*
  std::size_t trajectory = 0;        // chosen k
  Point point;                       // trajectory_k(t*)
  double step = 0.0;                 // distance to the parent point
};

struct SelectionCertificate {
  double tail_bound = 0.0;
  double membership_threshold = 0.0;  // gamma_1 eps + tail_bound
  AverageEstimate membership;         // density of dist(f(t), F(t)) >= threshold
  AverageEstimate nearness;           // density of rho(f(t), g(t)) >= rho(g(t), F(t)) + eps
  std::size_t gap_samples = 0;        // largest-grid samples outside every observed cell
};

struct SelectionResult {
  FuncExpr selection;
  std::size_t depth = 0;
  double eps = 0.0;
  GammaSchedule gammas;
  std::vector<ChainLevel> chain_log;
  std::vector<std::vector<SelectionCell>> cells;  // per depth
  std::vector<PartitionFamily> partitions;        // per depth
  SelectionCertificate certificate;
  std::vector<std::string> violations;
  std::optional<FrequencyModule> module_report;

  bool ok() const { return violations.empty(); }
  /// Deepest-level cell index at t, or nullopt in a gap.
  std::optional<std::size_t> leaf_at(double t) const;
};

struct SelectOptions {
  std::size_t depth = 0;  // J of the partition perturbations
  double resid_target = 0.01;
  std::size_t max_centers = 100000;
  /// tau0 scans for the per-center perturbations; there are thousands.
  AveragingScheme scan{{10, 20, 40}, 5e-2, 3, "pairwise"};
  double probe_ratio = 2.0;
};

/// Measurable selection f of F with rho(f(t), g(t)) < rho(g(t), F(t)) + eps,
/// truncated at depth n_max.
SelectionResult build_selection(const MultiMap& F, const FuncExpr& g, double eps, std::size_t n_max,
                                const MetricSpaceCfg& space, const AveragingScheme& scheme,
                                const SelectOptions& options = {});

/// Selections towards each anchor with eps = 2^-n, n = 1..budget, anchor
/// major. Anchors default to a cover of the trajectory bundle at radius eps.
std::vector<SelectionResult> dense_selections(const MultiMap& F, double eps, std::size_t n_max,
                                              std::size_t budget, const MetricSpaceCfg& space,
                                              const AveragingScheme& scheme,
                                              std::optional<std::vector<Point>> anchors = std::nullopt,
                                              const SelectOptions& options = {});

}  // namespace ap

#endif  // AP_SELECT_HPP
