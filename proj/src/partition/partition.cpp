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

#include "ap/partition.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include <boost/container_hash/hash.hpp>

#include "ap/kernels.hpp"

namespace ap {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

std::atomic<std::uint64_t> next_family{1};

// Per horizon, count how often each index is the first hit. `fn` appends
// one entry per item sampled at t (kNone for no hit). Returns per horizon
// the histogram (size n + 1, last slot kNone) and the item count.
struct Histograms {
  std::vector<std::vector<std::uint64_t>> counts;
  std::vector<std::uint64_t> totals;
};

Histograms first_hit_histograms(const AveragingScheme& scheme, std::size_t n,
                                const std::function<void(double, std::vector<std::size_t>&)>& fn) {
  scheme.validate();
  Histograms h;
  for (double b : scheme.b_list) {
    const auto g = kernels::midpoint_grid(b, scheme.step);
    const std::size_t nb = g.blocks();
    std::vector<std::uint64_t> total(n + 1, 0);
    kernels::detail::ErrorSlot errors(nb);
#pragma omp parallel
    {
      std::vector<std::uint64_t> local(n + 1, 0);
      std::vector<std::size_t> hits;
#pragma omp for schedule(static)
      for (std::ptrdiff_t bb = 0; bb < static_cast<std::ptrdiff_t>(nb); ++bb) {
        const auto blk = static_cast<std::size_t>(bb);
        try {
          const std::size_t i0 = blk * kernels::kBlock;
          const std::size_t len = std::min(kernels::kBlock, g.n - i0);
          for (std::size_t i = 0; i < len; ++i) {
            hits.clear();
            fn(g.at(i0 + i), hits);
            for (std::size_t j : hits) ++local[j == kNone || j >= n ? n : j];
          }
        } catch (...) {
          errors.set(blk, std::current_exception());
        }
      }
#pragma omp critical
      for (std::size_t j = 0; j <= n; ++j) total[j] += local[j];
    }
    errors.rethrow_first();
    std::uint64_t items = 0;
    for (auto c : total) items += c;
    h.counts.push_back(std::move(total));
    h.totals.push_back(items);
  }
  return h;
}

// Residual with the first m indices, for m = 1..n, by the limsup rule.
std::vector<AverageEstimate> residual_profile(const AveragingScheme& scheme, const Histograms& h,
                                              std::size_t n) {
  std::vector<AverageEstimate> out;
  std::vector<std::uint64_t> covered(h.counts.size(), 0);
  for (std::size_t m = 1; m <= n; ++m) {
    std::vector<double> avg;
    for (std::size_t k = 0; k < h.counts.size(); ++k) {
      covered[k] += h.counts[k][m - 1];
      const std::uint64_t tot = h.totals[k];
      avg.push_back(tot == 0 ? 0.0 : static_cast<double>(tot - covered[k]) / static_cast<double>(tot));
    }
    out.push_back(combine_horizons(scheme, std::move(avg)));
  }
  return out;
}

CoverResult finish_cover(const AveragingScheme& scheme, std::vector<Point> centers, double delta,
                         double eps_resid, const MetricSpaceCfg& space, bool exhausted,
                         const std::function<void(double, std::vector<Point>&)>& values) {
  const std::size_t n = centers.size();
  PointIndex index(space.dim, 2.0 * delta);
  for (const auto& c : centers) index.insert(c);
  const auto hist = first_hit_histograms(scheme, n, [&](double t, std::vector<std::size_t>& out) {
    thread_local std::vector<Point> ys;
    ys.clear();
    values(t, ys);
    for (const auto& y : ys) out.push_back(index.first_within(y, delta, space).value_or(kNone));
  });
  const auto profile = residual_profile(scheme, hist, n);

  CoverResult r;
  std::size_t keep = n;
  for (std::size_t m = 1; m <= n; ++m) {
    if (profile[m - 1].value < eps_resid) {
      keep = m;
      break;
    }
  }
  if (profile[keep - 1].value >= eps_resid) {
    throw StageFailure("cover_points",
                       std::string(exhausted ? "center budget exhausted" : "grid exhausted") +
                           " with residual " + std::to_string(profile[keep - 1].value) +
                           " >= " + std::to_string(eps_resid));
  }
  centers.resize(keep);
  r.centers = std::move(centers);
  r.residual = profile[keep - 1];
  for (std::size_t m = 0; m < keep; ++m) r.residual_profile.push_back(profile[m].value);
  return r;
}

CoverResult greedy_cover(const std::vector<FuncExpr>& fs, double delta, double eps_resid,
                         const MetricSpaceCfg& space, const AveragingScheme& scheme,
                         std::size_t max_centers) {
  require(!fs.empty(), "cover_points: empty trajectory list");
  require(delta > 0.0 && std::isfinite(delta), "cover_points: delta must be positive");
  require(eps_resid > 0.0, "cover_points: eps_resid must be positive");
  require(max_centers >= 1, "cover_points: center budget must be >= 1");
  require(space.metric != MetricKind::capped || delta <= 1.0, "cover_points: capped metric needs delta <= 1");
  space.validate();
  scheme.validate();
  for (const auto& f : fs) require(f.dim() == space.dim, "cover_points: dimension mismatch");

  PointIndex index(space.dim, 2.0 * delta);
  bool exhausted = false;
  const auto grid = kernels::midpoint_grid(scheme.b_max(), scheme.step);
  for (std::size_t i = 0; i < grid.n && !exhausted; ++i) {
    const double t = grid.at(i);
    for (const auto& f : fs) {
      Point y = f.eval(t);
      if (index.first_within(y, delta, space)) continue;
      if (index.size() == max_centers) {
        exhausted = true;
        break;
      }
      index.insert(std::move(y));
    }
  }
  return finish_cover(scheme, index.points(), delta, eps_resid, space, exhausted,
                      [&](double t, std::vector<Point>& ys) {
                        for (const auto& f : fs) ys.push_back(f.eval(t));
                      });
}

class PartitionLocator final : public CellLocator {
 public:
  PartitionLocator(FuncExpr f, MetricSpaceCfg space, double eps, const std::vector<Point>& centers,
                   const std::vector<PerturbationSeries>& series)
      : f_(std::move(f)),
        space_(std::move(space)),
        radius_(eps * (1.0 + 1e-9)),
        shift_(-2.0 * eps / 3.0),
        index_(space_.dim, 2.0 * radius_),
        series_(series) {
    for (const auto& c : centers) index_.insert(c);
  }

  // Same arithmetic as the level sets T'_j, with f evaluated once.
  std::optional<std::size_t> locate(Time t) const override {
    const Point y = f_.eval_at(t);
    std::vector<std::size_t> cand;
    // |g_j| < eps/3 puts every T'_j containing t within eps of x_j.
    index_.within(y, radius_, space_, cand);
    for (std::size_t j : cand) {
      double v = space_.distance(y, index_.points()[j]) + shift_;
      v += series_[j].eval(t);
      if (v <= 0.0) return j;
    }
    return std::nullopt;
  }

 private:
  FuncExpr f_;
  MetricSpaceCfg space_;
  double radius_;
  double shift_;
  PointIndex index_;
  std::vector<PerturbationSeries> series_;
};

class ConstantLocator final : public CellLocator {
 public:
  std::optional<std::size_t> locate(Time) const override { return 0; }
};

AverageEstimate zero_estimate(const AveragingScheme& scheme) {
  return combine_horizons(scheme, std::vector<double>(scheme.b_list.size(), 0.0));
}

}  // namespace

PointIndex::PointIndex(std::size_t dim, double cell) : dim_(dim), cell_(cell) {
  require(dim >= 1, "PointIndex: dim must be >= 1");
  require(cell > 0.0 && std::isfinite(cell), "PointIndex: cell must be positive");
}

std::size_t PointIndex::KeyHash::operator()(const Key& k) const noexcept {
  return boost::hash_range(k.begin(), k.end());
}

PointIndex::Key PointIndex::key_of(const Point& p) const {
  Key k(dim_);
  for (std::size_t i = 0; i < dim_; ++i) k[i] = static_cast<std::int64_t>(std::floor(p[i] / cell_));
  return k;
}

std::size_t PointIndex::insert(Point p) {
  require(p.size() == dim_, "PointIndex: dimension mismatch");
  for (double x : p) require(std::isfinite(x), "PointIndex: non-finite coordinate");
  const std::size_t id = points_.size();
  cells_[key_of(p)].push_back(id);
  points_.push_back(std::move(p));
  return id;
}

void PointIndex::candidates(const Point& p, double r, std::vector<std::size_t>& out) const {
  out.clear();
  if (points_.empty()) return;
  Key lo(dim_), hi(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    lo[i] = static_cast<std::int64_t>(std::floor((p[i] - r) / cell_));
    hi[i] = static_cast<std::int64_t>(std::floor((p[i] + r) / cell_));
  }
  // Odometer over the cells meeting the cube of half-width r around p.
  Key k = lo;
  for (;;) {
    if (auto it = cells_.find(k); it != cells_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    std::size_t i = 0;
    while (i < dim_ && k[i] == hi[i]) {
      k[i] = lo[i];
      ++i;
    }
    if (i == dim_) break;
    ++k[i];
  }
}

void PointIndex::within(const Point& p, double r, const MetricSpaceCfg& space,
                        std::vector<std::size_t>& out) const {
  candidates(p, r, out);
  std::erase_if(out, [&](std::size_t j) { return !(space.distance(p, points_[j]) < r); });
  std::sort(out.begin(), out.end());
}

std::optional<std::size_t> PointIndex::first_within(const Point& p, double r,
                                                    const MetricSpaceCfg& space) const {
  thread_local std::vector<std::size_t> cand;
  candidates(p, r, cand);
  std::optional<std::size_t> best;
  for (std::size_t j : cand)
    if ((!best || j < *best) && space.distance(p, points_[j]) < r) best = j;
  return best;
}

CoverResult cover_points(const FuncExpr& f, double delta, double eps_resid, const MetricSpaceCfg& space,
                         const AveragingScheme& scheme, std::size_t max_centers) {
  return greedy_cover({f}, delta, eps_resid, space, scheme, max_centers);
}

CoverResult cover_points_bundle(const std::vector<FuncExpr>& trajectories, double delta,
                                double eps_resid, const MetricSpaceCfg& space,
                                const AveragingScheme& scheme, std::size_t max_centers) {
  return greedy_cover(trajectories, delta, eps_resid, space, scheme, max_centers);
}

std::optional<IntVec> first_generator(const FuncExpr& f) {
  const FrequencyModule m = freq_module(f);
  if (m.generators().empty()) return std::nullopt;
  IntVec g = m.generators().front();
  if (m.basis()->value(g) < 0.0)
    for (auto& x : g) x = -x;
  return g;
}

bool constant_like(const FuncExpr& f, const MetricSpaceCfg& space, const AveragingScheme& scheme,
                   Point* mean) {
  Point c;
  if (auto v = f.constant_value()) {
    c = *v;
  } else {
    const std::size_t d = f.dim();
    const auto avg = average_by_multi(scheme, d, [&](double t, std::span<double> out) {
      const Point y = f.eval(t);
      std::copy(y.begin(), y.end(), out.begin());
    });
    c.resize(d);
    // The mean is the plain limit of horizon averages; take the largest.
    for (std::size_t i = 0; i < d; ++i) c[i] = avg[i].per_horizon.back().second;
  }
  if (mean) *mean = c;
  if (f.constant_value()) return true;
  const auto dist = average_by(scheme, [&](double t) { return std::min(1.0, space.distance(f.eval(t), c)); });
  return dist.value < 1e-9;
}

std::optional<std::size_t> PartitionFamily::member_index(double t) const {
  return locator ? locator->locate(Time{t, 0.0}) : member_index_linear(t);
}

std::optional<std::size_t> PartitionFamily::member_index_linear(double t) const {
  for (std::size_t j = 0; j < sets.size(); ++j)
    if (sets[j].contains(t)) return j;
  return std::nullopt;
}

PartitionFamily build_partition(const FuncExpr& f, double eps, const MetricSpaceCfg& space,
                                const AveragingScheme& scheme, const PartitionOptions& options) {
  require(eps > 0.0 && eps <= 1.0, "build_partition: eps must be in (0, 1]");
  require(f.dim() == space.dim, "build_partition: dimension mismatch");
  space.validate();
  scheme.validate();

  PartitionFamily fam;
  fam.eps = eps;
  fam.space = space;
  const std::uint64_t family_id = next_family++;

  Point mean;
  if (constant_like(f, space, scheme, &mean)) {
    fam.trivial = true;
    fam.sets.push_back(full_line().with_tag({family_id, 0}));
    fam.primed = fam.sets;
    fam.points.push_back(mean);
    fam.residual_density = zero_estimate(scheme);
    fam.cover_residual = fam.residual_density;
    fam.residual_profile = {0.0};
    if (auto basis = f.basis()) fam.module_report = FrequencyModule(basis, {});
    fam.locator = std::make_shared<ConstantLocator>();
    return fam;
  }

  const auto gen = first_generator(f);
  if (!gen) throw StageFailure("build_partition", "no period b with 2pi/b in Mod f");
  const BasisPtr basis = f.basis();
  fam.b = 2.0 * std::numbers::pi / basis->value(*gen);

  CoverResult cover =
      cover_points(f, eps / 3.0, options.resid_target, space, scheme, options.max_centers);
  fam.points = std::move(cover.centers);
  fam.cover_residual = cover.residual;

  const std::size_t n = fam.points.size();
  std::vector<FuncExpr> h;
  for (std::size_t j = 0; j < n; ++j)
    h.push_back(add_constant(distance_to(f, fam.points[j], space), -2.0 * eps / 3.0));
  fam.perturbations.resize(n);
  kernels::detail::ErrorSlot errors(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(n); ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    PerturbOptions popt;
    popt.scan = options.scan;
    popt.probe_ratio = options.probe_ratio;
    popt.lattice = *gen;
    popt.family_tag = "center " + std::to_string(j);
    try {
      fam.perturbations[j] = build_perturbation({h[j]}, eps / 3.0, fam.b, options.depth, popt);
    } catch (const StageFailure& e) {
      errors.set(j, std::make_exception_ptr(StageFailure("build_partition center " + std::to_string(j), e.what())));
    } catch (...) {
      errors.set(j, std::current_exception());
    }
  }
  errors.rethrow_first();
  std::vector<SetExpr> primed;
  for (std::size_t j = 0; j < n; ++j) primed.push_back(level_set(perturbed(h[j], fam.perturbations[j]), 0.0, Relation::le));

  for (std::size_t j = 0; j < primed.size(); ++j) {
    SetExpr tj = j == 0 ? primed[0]
                        : set_diff(primed[j], union_of(std::vector<SetExpr>(primed.begin(), primed.begin() + j)));
    fam.sets.push_back(tj.with_tag({family_id, j}));
  }
  fam.primed = std::move(primed);
  fam.locator = std::make_shared<PartitionLocator>(f, space, eps, fam.points, fam.perturbations);

  const auto hist = first_hit_histograms(scheme, n, [&](double t, std::vector<std::size_t>& out) {
    out.push_back(fam.locator->locate(Time{t, 0.0}).value_or(kNone));
  });
  const auto profile = residual_profile(scheme, hist, n);
  fam.residual_density = profile.back();
  for (const auto& p : profile) fam.residual_profile.push_back(p.value);

  std::vector<IntVec> gens = freq_module(f).generators();
  gens.push_back(*gen);
  fam.module_report = FrequencyModule(basis, std::move(gens));
  return fam;
}

SetExpr level_split(const FuncExpr& f, double a, double eps, const AveragingScheme& scheme,
                    const PartitionOptions& options) {
  require(f.dim() == 1, "level_split: f must be scalar");
  require(eps > 0.0 && eps <= 1.0, "level_split: eps must be in (0, 1]");
  require(std::isfinite(a), "level_split: a must be finite");
  scheme.validate();

  const auto gen = first_generator(f);
  if (f.constant_value() || !gen) {
    const double c = f.eval_scalar(0.0);
    return c < a + eps / 2.0 ? full_line() : empty_set();
  }
  const double b = 2.0 * std::numbers::pi / f.basis()->value(*gen);
  const FuncExpr h = add_constant(f, -a - eps / 2.0);
  PerturbOptions popt;
  popt.scan = options.scan;
  popt.probe_ratio = options.probe_ratio;
  popt.lattice = *gen;
  popt.family_tag = "level split";
  const PerturbationSeries g = build_perturbation({h}, eps / 3.0, b, options.depth, popt);
  return set_intersect(level_set(perturbed(h, g), 0.0, Relation::le), level_set(f, a + eps, Relation::lt));
}

}  // namespace ap
