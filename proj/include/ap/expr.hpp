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

// Symbolic almost periodic functions and measurable-set expressions.
//
// A FuncExpr is an immutable expression tree whose leaves are trigonometric
// polynomials over a FrequencyBasis. Interior nodes are the operations the
// constructions need: gluing along a partition (StepCompose), shifts, the
// truncation F^a, sgn, sums, scalar products, b-periodic perturbations, the
// distance to a fixed point, and stacking into a product space.
//
// A SetExpr is a Boolean combination of level sets of scalar FuncExprs.
// Both types are cheap to copy (shared immutable nodes) and safe to share
// across threads.

#ifndef AP_EXPR_HPP
#define AP_EXPR_HPP

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ap/frequency.hpp"
#include "ap/phase.hpp"
#include "ap/space.hpp"
#include "ap/types.hpp"

namespace ap {

class FuncExpr;
class SetExpr;

/// Counts evaluation events worth reporting. Passed by pointer, may be null.
struct EvalFlags {
  std::size_t gap_hits = 0;  // StepCompose samples that fell in no partition member
};

/// The b-periodic perturbation g(t) = sum_j Delta_j sin(alpha_j t) with
/// alpha_j = multiplier_j * 2 pi / b, plus the schedules that produced it.
struct PerturbationSeries {
  double b = 0.0;
  std::size_t depth = 0;            // J; schedules have J + 1 entries
  std::vector<double> Delta;        // amplitudes Delta_0..Delta_J
  std::vector<double> multiplier;   // integer-valued m_j
  std::vector<double> alpha;        // m_j * 2 pi / b, for reporting
  std::vector<double> delta;        // level thresholds delta_j
  std::vector<double> tau0;         // tau_0 used at each stage
  std::string family_tag;
  std::optional<IntVec> lattice;    // 2 pi / b written in the frequency basis

  std::size_t terms() const noexcept { return Delta.size(); }
  double eval(Time t) const;
  double eval(double t) const { return eval(Time{t, 0.0}); }
  /// g(t + tau) - g(t), accurate for tau far below ulp(t).
  double increment(Time t, double tau) const;
  double amplitude_sum() const;
  double lipschitz_bound() const;
  /// Tail starting at term `from` (g_j), same b and lattice.
  PerturbationSeries tail(std::size_t from) const;
  PerturbationSeries head(std::size_t count) const;
};

/// Optional accelerator for StepCompose: returns the same index as the
/// linear scan over partition members, or nullopt when t lies in none.
class CellLocator {
 public:
  virtual ~CellLocator() = default;
  virtual std::optional<std::size_t> locate(Time t) const = 0;
};

namespace node {

struct TrigTerm {
  CPoint coef;   // in C^dim
  IntVec freq;   // against the basis
  double lambda; // real frequency
};

struct TrigPoly {
  BasisPtr basis;
  std::size_t dim;
  std::vector<TrigTerm> terms;
  bool complex_valued;
  // Real projection in halved form: constant + sum Re(coef e^{i lambda t}).
  Point constant;
  std::vector<TrigTerm> half;
};

struct StepCompose;
struct Shift;
struct Truncate;
struct Sgn;
struct Sum;
struct ScalarProd;
struct PerturbedSum;
struct DistanceTo;
struct Stack;

}  // namespace node

class FuncExpr {
 public:
  struct Node;

  explicit FuncExpr(std::shared_ptr<const Node> n);

  std::size_t dim() const;
  Point eval(double t, EvalFlags* flags = nullptr) const;
  Point eval_at(Time t, EvalFlags* flags = nullptr) const;
  double eval_scalar(double t) const;
  /// Complex values for complex trig polynomials (real values elsewhere).
  CPoint eval_complex(double t) const;
  /// f(t + tau) - f(t) without forming t + tau in floating point where the
  /// node structure allows it.
  Point increment(Time t, double tau) const;

  /// sup_t |f(t + tau) - f(t)| / tau over all t and tau; +inf when the
  /// expression can jump.
  double lipschitz_bound() const;
  /// Upper bound on sup_t |f(t)|.
  double sup_bound() const;

  const Node& node() const noexcept { return *node_; }
  const std::shared_ptr<const Node>& node_ptr() const noexcept { return node_; }
  /// Basis of the first trig leaf.
  BasisPtr basis() const;
  bool is_trig_poly() const;
  /// Constant value when the expression is a trig polynomial with only a
  /// zero-frequency term.
  std::optional<Point> constant_value() const;

 private:
  std::shared_ptr<const Node> node_;
};

enum class Relation { le, lt };

/// Marks a set built by a partition construction; sets sharing `family`
/// are pairwise disjoint by construction.
struct PartitionTag {
  std::uint64_t family = 0;
  std::size_t index = 0;
};

namespace node {
struct LevelSet;
struct Union;
struct Intersect;
struct Diff;
struct Complement;
struct FullLine {};
struct Empty {};
}  // namespace node

class SetExpr {
 public:
  struct Node;

  explicit SetExpr(std::shared_ptr<const Node> n);

  bool contains(double t) const { return contains_at(Time{t, 0.0}); }
  bool contains_at(Time t) const;
  const Node& node() const noexcept { return *node_; }
  const std::optional<PartitionTag>& tag() const noexcept;
  SetExpr with_tag(PartitionTag tag) const;
  bool is_full_line() const;
  bool is_empty_set() const;
  /// Collect generator vectors of all level-set expressions.
  void collect_generators(std::vector<IntVec>& out, BasisPtr& basis) const;

 private:
  std::shared_ptr<const Node> node_;
};

namespace node {

struct StepCompose {
  std::vector<SetExpr> partition;
  std::vector<FuncExpr> branches;  // branch 0 is the default for gaps
  std::shared_ptr<const CellLocator> locator;
};
struct Shift { FuncExpr inner; double tau; };
struct Truncate { FuncExpr inner; double a; };
struct Sgn { FuncExpr inner; };
struct Sum { FuncExpr left, right; };
struct ScalarProd { FuncExpr scalar, vector; };
struct PerturbedSum { FuncExpr inner; std::shared_ptr<const PerturbationSeries> series; };
struct DistanceTo { FuncExpr inner; Point point; MetricSpaceCfg space; };
struct Stack { std::vector<FuncExpr> parts; };

struct LevelSet { FuncExpr expr; double threshold; Relation relation; };
struct Union { SetExpr left, right; };
struct Intersect { SetExpr left, right; };
struct Diff { SetExpr left, right; };
struct Complement { SetExpr inner; };

}  // namespace node

struct FuncExpr::Node {
  std::variant<node::TrigPoly, node::StepCompose, node::Shift, node::Truncate, node::Sgn,
               node::Sum, node::ScalarProd, node::PerturbedSum, node::DistanceTo, node::Stack>
      v;
  std::size_t dim;
};

struct SetExpr::Node {
  std::variant<node::LevelSet, node::Union, node::Intersect, node::Diff, node::Complement,
               node::FullLine, node::Empty>
      v;
  std::optional<PartitionTag> tag;
};

// ---- construction -------------------------------------------------------

/// Terms are (coefficient in C^dim, integer frequency). Unless
/// complex_valued, the terms must be conjugate-symmetric so the function is
/// real; duplicate frequencies are rejected.
FuncExpr trig_poly(BasisPtr basis, std::size_t dim,
                   std::vector<std::pair<CPoint, IntVec>> terms, bool complex_valued = false);
FuncExpr constant(BasisPtr basis, Point value);
/// amplitude * sin(lambda t + phase), lambda = basis.value(freq).
FuncExpr sine(BasisPtr basis, IntVec freq, double amplitude = 1.0, double phase = 0.0);
FuncExpr cosine(BasisPtr basis, IntVec freq, double amplitude = 1.0, double phase = 0.0);
/// Stack scalar trig polynomials into one trig polynomial in R^n.
FuncExpr trig_vector(const std::vector<FuncExpr>& components);

FuncExpr shift(FuncExpr f, double tau);
FuncExpr truncate(FuncExpr f, double a);
FuncExpr sgn_op(FuncExpr f);
FuncExpr sum(FuncExpr f, FuncExpr g);
FuncExpr scalar_prod(FuncExpr scalar, FuncExpr vector);
FuncExpr negate(FuncExpr f);
FuncExpr add_constant(FuncExpr f, double c);
FuncExpr perturbed_sum(FuncExpr inner, std::shared_ptr<const PerturbationSeries> series);
FuncExpr distance_to(FuncExpr f, Point x, MetricSpaceCfg space);
FuncExpr stack(std::vector<FuncExpr> parts);
FuncExpr step_compose(std::vector<SetExpr> partition, std::vector<FuncExpr> branches,
                      std::shared_ptr<const CellLocator> locator = nullptr);

SetExpr level_set(FuncExpr expr, double threshold, Relation relation = Relation::le);
SetExpr set_union(SetExpr a, SetExpr b);
SetExpr set_intersect(SetExpr a, SetExpr b);
SetExpr set_diff(SetExpr a, SetExpr b);
SetExpr set_complement(SetExpr a);
SetExpr full_line();
SetExpr empty_set();
/// Balanced union tree; empty input gives the empty set.
SetExpr union_of(const std::vector<SetExpr>& sets);

/// Superset of Mod f: generators read off trig leaves, level sets, and
/// perturbation lattices. Throws on mixed bases.
FrequencyModule freq_module(const FuncExpr& f);
bool module_contains(const FrequencyModule& m, const IntVec& lambda);

/// Truncation F^a(h) = h if |h| <= a, a h/|h| otherwise.
Point truncate_value(std::span<const double> h, double a);
inline Point truncate_value(const Point& h, double a) { return truncate_value(view(h), a); }
/// sgn h = h/|h|, sgn 0 = 0.
Point sgn_value(std::span<const double> h);
inline Point sgn_value(const Point& h) { return sgn_value(view(h)); }

}  // namespace ap

#endif  // AP_EXPR_HPP
