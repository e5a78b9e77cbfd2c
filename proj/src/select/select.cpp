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

#include "ap/select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include <boost/container_hash/hash.hpp>

#include "ap/kernels.hpp"

namespace ap {

namespace {

using Tuple = std::vector<std::size_t>;

struct TupleHash {
  std::size_t operator()(const Tuple& t) const noexcept { return boost::hash_range(t.begin(), t.end()); }
};

class SelectionLocator final : public CellLocator {
 public:
  SelectionLocator(std::vector<std::shared_ptr<const CellLocator>> levels,
                   std::unordered_map<Tuple, std::size_t, TupleHash> leaves)
      : levels_(std::move(levels)), leaves_(std::move(leaves)) {}

  // 0 is the gap cell; leaf i sits at i + 1.
  std::optional<std::size_t> locate(Time t) const override {
    Tuple key;
    key.reserve(levels_.size());
    for (const auto& l : levels_) {
      const auto j = l->locate(t);
      if (!j) return 0;
      key.push_back(*j);
    }
    const auto it = leaves_.find(key);
    return it == leaves_.end() ? 0 : it->second + 1;
  }

 private:
  std::vector<std::shared_ptr<const CellLocator>> levels_;
  std::unordered_map<Tuple, std::size_t, TupleHash> leaves_;
};

std::string tuple_string(const Tuple& t) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
  os << ']';
  return os.str();
}

std::size_t nearest(const std::vector<Point>& ys, const Point& target, const MetricSpaceCfg& space) {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ys.size(); ++k) {
    const double d = space.distance(ys[k], target);
    if (d < bd) {
      bd = d;
      best = k;
    }
  }
  return best;
}

MetricSpaceCfg joined_space(const MetricSpaceCfg& space, std::size_t parts) {
  const std::size_t block = space.metric == MetricKind::block_max ? space.block : space.dim;
  return MetricSpaceCfg(space.dim * parts, MetricKind::block_max, Point(space.dim * parts, 0.0), block);
}

}  // namespace

std::size_t MultiMap::dim() const { return trajectories.empty() ? 0 : trajectories.front().dim(); }

void MultiMap::validate(const MetricSpaceCfg& space) const {
  require(!trajectories.empty(), "MultiMap: no trajectories");
  for (const auto& f : trajectories) require(f.dim() == space.dim, "MultiMap: dimension mismatch");
}

std::vector<Point> MultiMap::values(double t) const {
  std::vector<Point> out;
  out.reserve(trajectories.size());
  for (const auto& f : trajectories) out.push_back(f.eval(t));
  return out;
}

double MultiMap::distance(const Point& y, double t, const MetricSpaceCfg& space) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& f : trajectories) d = std::min(d, space.distance(y, f.eval(t)));
  return d;
}

double GammaSchedule::partial_sum() const {
  double s = 0.0;
  for (std::size_t n = 1; n <= n_max; ++n) s += gamma(n) + gamma(n + 1);
  return s;
}

double GammaSchedule::tail_bound(double eps) const {
  // sum_{n > N} (2^-n + 2^-(n+1)) / 10 = 0.15 * 2^-N.
  return 2.0 * 0.15 * std::ldexp(1.0, -static_cast<int>(n_max)) * eps;
}

GammaSchedule gamma_schedule(std::size_t n_max) {
  require(n_max >= 1, "gamma_schedule: n_max must be >= 1");
  GammaSchedule s;
  s.n_max = n_max;
  for (std::size_t n = 1; n <= n_max + 1; ++n) s.gammas.push_back(std::ldexp(1.0, -static_cast<int>(n)) / 10.0);
  return s;
}

std::optional<std::size_t> SelectionResult::leaf_at(double t) const {
  const auto& s = std::get<node::StepCompose>(selection.node().v);
  const auto i = s.locator->locate(Time{t, 0.0});
  if (!i || *i == 0) return std::nullopt;
  return *i - 1;
}

SelectionResult build_selection(const MultiMap& F, const FuncExpr& g, double eps, std::size_t n_max,
                                const MetricSpaceCfg& space, const AveragingScheme& scheme,
                                const SelectOptions& options) {
  space.validate();
  scheme.validate();
  F.validate(space);
  require(g.dim() == space.dim, "build_selection: g has the wrong dimension");
  require(eps > 0.0 && eps <= 1.0, "build_selection: eps must be in (0, 1]");

  SelectionResult r{g, n_max, eps, gamma_schedule(n_max), {}, {}, {}, {}, {}, {}};
  const std::size_t K = F.trajectories.size();

  std::vector<FuncExpr> parts = F.trajectories;
  parts.push_back(g);
  const FuncExpr joined = stack(parts);
  const MetricSpaceCfg jspace = joined_space(space, K + 1);

  PartitionOptions popt;
  popt.depth = options.depth;
  popt.resid_target = options.resid_target;
  popt.max_centers = options.max_centers;
  popt.scan = options.scan;
  popt.probe_ratio = options.probe_ratio;
  for (std::size_t n = 1; n <= n_max; ++n) {
    try {
      r.partitions.push_back(build_partition(joined, r.gammas.gamma(n) * eps, jspace, scheme, popt));
    } catch (const StageFailure& e) {
      throw StageFailure("build_selection depth " + std::to_string(n), e.what());
    }
  }

  // Cell indices of every largest-grid sample, then representatives in t order.
  const auto grid = kernels::midpoint_grid(scheme.b_max(), scheme.step);
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> loc(grid.n * n_max, kNone);
  {
    const std::size_t nb = grid.blocks();
    kernels::detail::ErrorSlot errors(nb);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t bb = 0; bb < static_cast<std::ptrdiff_t>(nb); ++bb) {
      const auto blk = static_cast<std::size_t>(bb);
      try {
        const std::size_t i0 = blk * kernels::kBlock;
        const std::size_t len = std::min(kernels::kBlock, grid.n - i0);
        for (std::size_t i = i0; i < i0 + len; ++i)
          for (std::size_t n = 0; n < n_max; ++n) {
            const auto j = r.partitions[n].locator->locate(Time{grid.at(i), 0.0});
            if (!j) break;
            loc[i * n_max + n] = *j;
          }
      } catch (...) {
        errors.set(blk, std::current_exception());
      }
    }
    errors.rethrow_first();
  }

  r.cells.resize(n_max);
  std::vector<std::unordered_map<Tuple, std::size_t, TupleHash>> index(n_max);
  Tuple key;
  for (std::size_t i = 0; i < grid.n; ++i) {
    key.clear();
    std::size_t parent = 0;
    for (std::size_t n = 0; n < n_max; ++n) {
      const std::size_t j = loc[i * n_max + n];
      if (j == kNone) {
        ++r.certificate.gap_samples;
        break;
      }
      key.push_back(j);
      auto [it, fresh] = index[n].try_emplace(key, r.cells[n].size());
      if (fresh) {
        SelectionCell c;
        c.indices = key;
        c.parent = parent;
        c.representative = grid.at(i);
        r.cells[n].push_back(std::move(c));
      }
      parent = it->second;
    }
  }
  loc.clear();
  loc.shrink_to_fit();
  if (r.cells[n_max - 1].empty()) throw StageFailure("build_selection", "no sampled cell at full depth");

  for (std::size_t n = 1; n <= n_max; ++n) {
    ChainLevel level;
    level.depth = n;
    level.partition_size = r.partitions[n - 1].sets.size();
    level.cells = r.cells[n - 1].size();
    level.residual = r.partitions[n - 1].residual_density;
    if (n > 1) level.step_bound = 2.0 * (r.gammas.gamma(n - 1) + r.gammas.gamma(n)) * eps;
    for (auto& c : r.cells[n - 1]) {
      const auto ys = F.values(c.representative);
      if (n == 1) {
        c.trajectory = nearest(ys, g.eval(c.representative), space);
        c.point = ys[c.trajectory];
        continue;
      }
      const SelectionCell& p = r.cells[n - 2][c.parent];
      c.trajectory = nearest(ys, p.point, space);
      c.point = ys[c.trajectory];
      c.step = space.distance(p.point, c.point);
      const double haus = std::min(1.0, dist_hausdorff(F.values(p.representative), ys, space));
      level.max_step = std::max(level.max_step, c.step);
      level.max_hausdorff = std::max(level.max_hausdorff, haus);
      if (!(c.step <= 2.0 * haus))
        r.violations.push_back("depth " + std::to_string(n) + " cell " + tuple_string(c.indices) +
                               ": step " + std::to_string(c.step) + " > 2 dist " + std::to_string(haus));
      if (!(c.step <= level.step_bound))
        r.violations.push_back("depth " + std::to_string(n) + " cell " + tuple_string(c.indices) +
                               ": step " + std::to_string(c.step) + " > bound " +
                               std::to_string(level.step_bound));
    }
    r.chain_log.push_back(level);
  }

  // Step function over the leaf cells; cell 0 is the gap set and keeps F's first branch.
  const BasisPtr basis = g.basis() ? g.basis() : F.trajectories.front().basis();
  const auto& leaves = r.cells[n_max - 1];
  std::vector<SetExpr> sets;
  std::vector<FuncExpr> branches;
  std::unordered_map<Tuple, std::size_t, TupleHash> leaf_index;
  sets.reserve(leaves.size() + 1);
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    SetExpr s = r.partitions[0].sets[leaves[i].indices[0]];
    for (std::size_t n = 1; n < n_max; ++n) s = set_intersect(s, r.partitions[n].sets[leaves[i].indices[n]]);
    sets.push_back(std::move(s));
    branches.push_back(constant(basis, leaves[i].point));
    leaf_index.emplace(leaves[i].indices, i);
  }
  sets.insert(sets.begin(), set_complement(union_of(sets)));
  branches.insert(branches.begin(), F.trajectories.front());
  std::vector<std::shared_ptr<const CellLocator>> levels;
  for (const auto& p : r.partitions) levels.push_back(p.locator);
  r.selection = step_compose(std::move(sets), std::move(branches),
                             std::make_shared<SelectionLocator>(std::move(levels), std::move(leaf_index)));

  r.certificate.tail_bound = r.gammas.tail_bound(eps);
  r.certificate.membership_threshold = r.gammas.gamma(1) * eps + r.certificate.tail_bound;
  const auto est = average_by_multi(scheme, 2, [&](double t, std::span<double> out) {
    const Point y = r.selection.eval(t);
    const Point gt = g.eval(t);
    out[0] = F.distance(y, t, space) >= r.certificate.membership_threshold ? 1.0 : 0.0;
    out[1] = space.distance(y, gt) >= F.distance(gt, t, space) + eps ? 1.0 : 0.0;
  });
  r.certificate.membership = est[0];
  r.certificate.nearness = est[1];

  FrequencyModule report = freq_module(g);
  for (const auto& f : F.trajectories) report = report + freq_module(f);
  for (const auto& p : r.partitions)
    if (p.module_report) report = report + *p.module_report;
  r.module_report = report;
  return r;
}

std::vector<SelectionResult> dense_selections(const MultiMap& F, double eps, std::size_t n_max,
                                              std::size_t budget, const MetricSpaceCfg& space,
                                              const AveragingScheme& scheme,
                                              std::optional<std::vector<Point>> anchors,
                                              const SelectOptions& options) {
  F.validate(space);
  require(eps > 0.0 && eps <= 1.0, "dense_selections: eps must be in (0, 1]");
  require(budget >= 1, "dense_selections: budget must be >= 1");
  if (!anchors)
    anchors = cover_points_bundle(F.trajectories, eps, options.resid_target, space, scheme,
                                  options.max_centers)
                  .centers;
  const BasisPtr basis = F.trajectories.front().basis();
  std::vector<SelectionResult> out;
  for (const auto& x : *anchors) {
    require(x.size() == space.dim, "dense_selections: anchor has the wrong dimension");
    const FuncExpr g = constant(basis, x);
    for (std::size_t n = 1; n <= budget; ++n)
      out.push_back(build_selection(F, g, std::ldexp(1.0, -static_cast<int>(n)), n_max, space, scheme, options));
  }
  return out;
}

}  // namespace ap
