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

#include "ap/expr.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace ap {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

bool lex_positive(const IntVec& k) {
  for (auto x : k)
    if (x != 0) return x > 0;
  return false;
}

bool is_zero_vec(const IntVec& k) {
  return std::all_of(k.begin(), k.end(), [](std::int64_t x) { return x == 0; });
}

IntVec negated(const IntVec& k) {
  IntVec r(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) r[i] = -k[i];
  return r;
}

// lambda * (base + offset), keeping the two products separate.
inline double phase_of(double lambda, Time t) {
  return t.offset == 0.0 ? lambda * t.base : lambda * t.base + lambda * t.offset;
}

void add_into(Point& acc, const Point& x) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += x[i];
}

FuncExpr make(node::TrigPoly p) {
  const std::size_t d = p.dim;
  return FuncExpr(std::make_shared<const FuncExpr::Node>(FuncExpr::Node{std::move(p), d}));
}

template <class N>
FuncExpr make(N n, std::size_t dim) {
  return FuncExpr(std::make_shared<const FuncExpr::Node>(FuncExpr::Node{std::move(n), dim}));
}

template <class N>
SetExpr make_set(N n) {
  return SetExpr(std::make_shared<const SetExpr::Node>(SetExpr::Node{std::move(n), std::nullopt}));
}

std::optional<std::size_t> locate_linear(const node::StepCompose& s, Time t) {
  for (std::size_t i = 0; i < s.partition.size(); ++i)
    if (s.partition[i].contains_at(t)) return i;
  return std::nullopt;
}

std::size_t step_index(const node::StepCompose& s, Time t, EvalFlags* flags) {
  const auto idx = s.locator ? s.locator->locate(t) : locate_linear(s, t);
  if (idx) return *idx;
  if (flags) ++flags->gap_hits;
  return 0;
}

}  // namespace

// ---- PerturbationSeries ---------------------------------------------------

double PerturbationSeries::eval(Time t) const {
  double s = 0.0;
  for (std::size_t j = 0; j < Delta.size(); ++j) {
    double c = lattice_cycles(multiplier[j], t.base, b);
    if (t.offset != 0.0) c += lattice_cycles(multiplier[j], t.offset, b);
    s += Delta[j] * std::sin(2.0 * std::numbers::pi * c);
  }
  return s;
}

double PerturbationSeries::increment(Time t, double tau) const {
  // sin(x + y) - sin(x) = 2 cos(x + y/2) sin(y/2)
  double s = 0.0;
  for (std::size_t j = 0; j < Delta.size(); ++j) {
    double c = lattice_cycles(multiplier[j], t.base, b);
    if (t.offset != 0.0) c += lattice_cycles(multiplier[j], t.offset, b);
    const double half = lattice_angle(multiplier[j], 0.5 * tau, b);
    s += 2.0 * Delta[j] * std::cos(2.0 * std::numbers::pi * c + half) * std::sin(half);
  }
  return s;
}

double PerturbationSeries::amplitude_sum() const {
  double s = 0.0;
  for (double d : Delta) s += std::abs(d);
  return s;
}

double PerturbationSeries::lipschitz_bound() const {
  double s = 0.0;
  for (std::size_t j = 0; j < Delta.size(); ++j) s += std::abs(Delta[j]) * alpha[j];
  return s;
}

PerturbationSeries PerturbationSeries::tail(std::size_t from) const {
  PerturbationSeries r = *this;
  auto cut = [from](std::vector<double>& v) {
    v.erase(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(std::min(from, v.size())));
  };
  cut(r.Delta);
  cut(r.multiplier);
  cut(r.alpha);
  cut(r.delta);
  cut(r.tau0);
  r.depth = r.Delta.empty() ? 0 : r.Delta.size() - 1;
  return r;
}

PerturbationSeries PerturbationSeries::head(std::size_t count) const {
  PerturbationSeries r = *this;
  auto cut = [count](std::vector<double>& v) { v.resize(std::min(count, v.size())); };
  cut(r.Delta);
  cut(r.multiplier);
  cut(r.alpha);
  cut(r.delta);
  cut(r.tau0);
  r.depth = r.Delta.empty() ? 0 : r.Delta.size() - 1;
  return r;
}

// ---- FuncExpr -------------------------------------------------------------

FuncExpr::FuncExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {
  require(node_ != nullptr, "FuncExpr: null node");
}

std::size_t FuncExpr::dim() const { return node_->dim; }

Point FuncExpr::eval(double t, EvalFlags* flags) const {
  if (!std::isfinite(t)) throw InvalidArgument("eval: non-finite t");
  return eval_at(Time{t, 0.0}, flags);
}

double FuncExpr::eval_scalar(double t) const {
  require(dim() == 1, "eval_scalar: expression is not scalar");
  return eval(t)[0];
}

Point FuncExpr::eval_at(Time t, EvalFlags* flags) const {
  return std::visit(
      overloaded{
          [&](const node::TrigPoly& p) {
            Point v = p.constant;
            const auto& terms = p.complex_valued ? p.terms : p.half;
            for (const auto& term : terms) {
              const double th = phase_of(term.lambda, t);
              const double c = std::cos(th), s = std::sin(th);
              for (std::size_t d = 0; d < p.dim; ++d)
                v[d] += term.coef[d].real() * c - term.coef[d].imag() * s;
            }
            return v;
          },
          [&](const node::StepCompose& s) {
            return s.branches[step_index(s, t, flags)].eval_at(t, flags);
          },
          [&](const node::Shift& s) {
            return s.inner.eval_at(Time{t.base, t.offset + s.tau}, flags);
          },
          [&](const node::Truncate& s) { return truncate_value(s.inner.eval_at(t, flags), s.a); },
          [&](const node::Sgn& s) { return sgn_value(s.inner.eval_at(t, flags)); },
          [&](const node::Sum& s) {
            Point v = s.left.eval_at(t, flags);
            add_into(v, s.right.eval_at(t, flags));
            return v;
          },
          [&](const node::ScalarProd& s) {
            const double k = s.scalar.eval_at(t, flags)[0];
            Point v = s.vector.eval_at(t, flags);
            for (auto& x : v) x *= k;
            return v;
          },
          [&](const node::PerturbedSum& s) {
            Point v = s.inner.eval_at(t, flags);
            v[0] += s.series->eval(t);
            return v;
          },
          [&](const node::DistanceTo& s) {
            return Point{s.space.distance(s.inner.eval_at(t, flags), s.point)};
          },
          [&](const node::Stack& s) {
            Point v;
            v.reserve(node_->dim);
            for (const auto& part : s.parts) {
              const Point x = part.eval_at(t, flags);
              v.insert(v.end(), x.begin(), x.end());
            }
            return v;
          },
      },
      node_->v);
}

CPoint FuncExpr::eval_complex(double t) const {
  if (!std::isfinite(t)) throw InvalidArgument("eval: non-finite t");
  return std::visit(
      overloaded{
          [&](const node::TrigPoly& p) {
            CPoint v(p.dim, {0.0, 0.0});
            for (const auto& term : p.terms) {
              const std::complex<double> e = std::polar(1.0, term.lambda * t);
              for (std::size_t d = 0; d < p.dim; ++d) v[d] += term.coef[d] * e;
            }
            if (!p.complex_valued)
              for (auto& x : v) x = {x.real(), 0.0};
            return v;
          },
          [&](const node::Shift& s) {
            if (s.inner.is_trig_poly()) {
              // Same as evaluating at t + tau, but keeps the exact phase split.
              const auto& p = std::get<node::TrigPoly>(s.inner.node().v);
              CPoint v(p.dim, {0.0, 0.0});
              for (const auto& term : p.terms) {
                const std::complex<double> e =
                    std::polar(1.0, phase_of(term.lambda, Time{t, s.tau}));
                for (std::size_t d = 0; d < p.dim; ++d) v[d] += term.coef[d] * e;
              }
              if (!p.complex_valued)
                for (auto& x : v) x = {x.real(), 0.0};
              return v;
            }
            return s.inner.eval_complex(t + s.tau);
          },
          [&](const node::Sum& s) {
            CPoint v = s.left.eval_complex(t);
            const CPoint w = s.right.eval_complex(t);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] += w[i];
            return v;
          },
          [&](const node::ScalarProd& s) {
            const std::complex<double> k = s.scalar.eval_complex(t)[0];
            CPoint v = s.vector.eval_complex(t);
            for (auto& x : v) x *= k;
            return v;
          },
          [&](const auto&) {
            const Point r = eval(t);
            CPoint v(r.size());
            for (std::size_t i = 0; i < r.size(); ++i) v[i] = {r[i], 0.0};
            return v;
          },
      },
      node_->v);
}

Point FuncExpr::increment(Time t, double tau) const {
  const Time moved{t.base, t.offset + tau};
  auto direct = [&]() {
    Point a = eval_at(moved);
    const Point b = eval_at(t);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
  };
  return std::visit(
      overloaded{
          [&](const node::TrigPoly& p) {
            // e^{i l (t+tau)} - e^{i l t} = 2i sin(l tau / 2) e^{i l (t + tau/2)}
            Point v(p.dim, 0.0);
            const auto& terms = p.complex_valued ? p.terms : p.half;
            for (const auto& term : terms) {
              const double th = phase_of(term.lambda, t) + 0.5 * term.lambda * tau;
              const double s = 2.0 * std::sin(0.5 * term.lambda * tau);
              const double c = std::cos(th), sn = std::sin(th);
              for (std::size_t d = 0; d < p.dim; ++d)
                v[d] -= s * (term.coef[d].real() * sn + term.coef[d].imag() * c);
            }
            return v;
          },
          [&](const node::Shift& s) {
            return s.inner.increment(Time{t.base, t.offset + s.tau}, tau);
          },
          [&](const node::Truncate& s) {
            const Point h0 = s.inner.eval_at(t);
            Point dh = s.inner.increment(t, tau);
            Point h1 = h0;
            add_into(h1, dh);
            if (euclidean_norm(h0) <= s.a && euclidean_norm(h1) <= s.a) return dh;
            Point r = truncate_value(h1, s.a);
            const Point r0 = truncate_value(h0, s.a);
            for (std::size_t i = 0; i < r.size(); ++i) r[i] -= r0[i];
            return r;
          },
          [&](const node::Sum& s) {
            Point v = s.left.increment(t, tau);
            add_into(v, s.right.increment(t, tau));
            return v;
          },
          [&](const node::ScalarProd& s) {
            // s1 v1 - s0 v0 = ds * v1 + s0 * dv
            const double ds = s.scalar.increment(t, tau)[0];
            const double s0 = s.scalar.eval_at(t)[0];
            const Point v1 = s.vector.eval_at(moved);
            Point dv = s.vector.increment(t, tau);
            for (std::size_t i = 0; i < dv.size(); ++i) dv[i] = ds * v1[i] + s0 * dv[i];
            return dv;
          },
          [&](const node::PerturbedSum& s) {
            Point v = s.inner.increment(t, tau);
            v[0] += s.series->increment(t, tau);
            return v;
          },
          [&](const node::DistanceTo& s) {
            Point a = s.inner.eval_at(t);
            for (std::size_t i = 0; i < a.size(); ++i) a[i] -= s.point[i];
            const Point da = s.inner.increment(t, tau);
            Point a1 = a;
            add_into(a1, da);
            const double n0 = euclidean_norm(a), n1 = euclidean_norm(a1);
            const bool plain = s.space.metric == MetricKind::euclidean ||
                               (s.space.metric == MetricKind::capped && n0 <= 1.0 && n1 <= 1.0);
            if (!plain) return Point{s.space.norm_of_difference(a1) - s.space.norm_of_difference(a)};
            // |a + da| - |a| = (2 a.da + |da|^2) / (|a + da| + |a|)
            const double den = n0 + n1;
            if (den == 0.0) return Point{0.0};
            double num = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) num += (2.0 * a[i] + da[i]) * da[i];
            return Point{num / den};
          },
          [&](const node::Stack& s) {
            Point v;
            for (const auto& part : s.parts) {
              const Point x = part.increment(t, tau);
              v.insert(v.end(), x.begin(), x.end());
            }
            return v;
          },
          [&](const auto&) { return direct(); },
      },
      node_->v);
}

double FuncExpr::lipschitz_bound() const {
  return std::visit(
      overloaded{
          [](const node::TrigPoly& p) {
            double s = 0.0;
            for (const auto& term : p.terms) {
              double n = 0.0;
              for (const auto& c : term.coef) n += std::norm(c);
              s += std::sqrt(n) * std::abs(term.lambda);
            }
            return s;
          },
          [](const node::StepCompose&) { return kInf; },
          [](const node::Shift& s) { return s.inner.lipschitz_bound(); },
          [](const node::Truncate& s) { return 2.0 * s.inner.lipschitz_bound(); },
          [](const node::Sgn&) { return kInf; },
          [](const node::Sum& s) { return s.left.lipschitz_bound() + s.right.lipschitz_bound(); },
          [](const node::ScalarProd& s) {
            return s.scalar.lipschitz_bound() * s.vector.sup_bound() +
                   s.scalar.sup_bound() * s.vector.lipschitz_bound();
          },
          [](const node::PerturbedSum& s) {
            return s.inner.lipschitz_bound() + s.series->lipschitz_bound();
          },
          [](const node::DistanceTo& s) { return s.inner.lipschitz_bound(); },
          [](const node::Stack& s) {
            double l = 0.0;
            for (const auto& p : s.parts) l += p.lipschitz_bound();
            return l;
          },
      },
      node_->v);
}

double FuncExpr::sup_bound() const {
  return std::visit(
      overloaded{
          [](const node::TrigPoly& p) {
            double s = 0.0;
            for (const auto& term : p.terms) {
              double n = 0.0;
              for (const auto& c : term.coef) n += std::norm(c);
              s += std::sqrt(n);
            }
            return s;
          },
          [](const node::StepCompose& s) {
            double m = 0.0;
            for (const auto& b : s.branches) m = std::max(m, b.sup_bound());
            return m;
          },
          [](const node::Shift& s) { return s.inner.sup_bound(); },
          [](const node::Truncate& s) { return std::min(s.a, s.inner.sup_bound()); },
          [](const node::Sgn&) { return 1.0; },
          [](const node::Sum& s) { return s.left.sup_bound() + s.right.sup_bound(); },
          [](const node::ScalarProd& s) { return s.scalar.sup_bound() * s.vector.sup_bound(); },
          [](const node::PerturbedSum& s) {
            return s.inner.sup_bound() + s.series->amplitude_sum();
          },
          [](const node::DistanceTo& s) {
            const double b = s.inner.sup_bound() + euclidean_norm(s.point);
            return s.space.metric == MetricKind::capped ? std::min(1.0, b) : b;
          },
          [](const node::Stack& s) {
            double l = 0.0;
            for (const auto& p : s.parts) l += p.sup_bound();
            return l;
          },
      },
      node_->v);
}

BasisPtr FuncExpr::basis() const {
  return std::visit(
      overloaded{
          [](const node::TrigPoly& p) { return p.basis; },
          [](const node::StepCompose& s) { return s.branches.front().basis(); },
          [](const node::Shift& s) { return s.inner.basis(); },
          [](const node::Truncate& s) { return s.inner.basis(); },
          [](const node::Sgn& s) { return s.inner.basis(); },
          [](const node::Sum& s) { return s.left.basis(); },
          [](const node::ScalarProd& s) { return s.vector.basis(); },
          [](const node::PerturbedSum& s) { return s.inner.basis(); },
          [](const node::DistanceTo& s) { return s.inner.basis(); },
          [](const node::Stack& s) { return s.parts.front().basis(); },
      },
      node_->v);
}

bool FuncExpr::is_trig_poly() const { return std::holds_alternative<node::TrigPoly>(node_->v); }

std::optional<Point> FuncExpr::constant_value() const {
  const auto* p = std::get_if<node::TrigPoly>(&node_->v);
  if (!p) return std::nullopt;
  for (const auto& term : p->terms)
    if (!is_zero_vec(term.freq)) return std::nullopt;
  if (p->complex_valued) {
    Point v(p->dim, 0.0);
    for (const auto& term : p->terms)
      for (std::size_t d = 0; d < p->dim; ++d) v[d] += term.coef[d].real();
    return v;
  }
  return p->constant;
}

// ---- SetExpr --------------------------------------------------------------

SetExpr::SetExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {
  require(node_ != nullptr, "SetExpr: null node");
}

bool SetExpr::contains_at(Time t) const {
  return std::visit(
      overloaded{
          [&](const node::LevelSet& s) {
            const double v = s.expr.eval_at(t)[0];
            return s.relation == Relation::le ? v <= s.threshold : v < s.threshold;
          },
          [&](const node::Union& s) { return s.left.contains_at(t) || s.right.contains_at(t); },
          [&](const node::Intersect& s) {
            return s.left.contains_at(t) && s.right.contains_at(t);
          },
          [&](const node::Diff& s) { return s.left.contains_at(t) && !s.right.contains_at(t); },
          [&](const node::Complement& s) { return !s.inner.contains_at(t); },
          [](const node::FullLine&) { return true; },
          [](const node::Empty&) { return false; },
      },
      node_->v);
}

const std::optional<PartitionTag>& SetExpr::tag() const noexcept { return node_->tag; }

SetExpr SetExpr::with_tag(PartitionTag tag) const {
  return SetExpr(std::make_shared<const Node>(Node{node_->v, tag}));
}

bool SetExpr::is_full_line() const { return std::holds_alternative<node::FullLine>(node_->v); }
bool SetExpr::is_empty_set() const { return std::holds_alternative<node::Empty>(node_->v); }

namespace {
void collect(const FuncExpr& f, std::vector<IntVec>& out, BasisPtr& basis);
}

void SetExpr::collect_generators(std::vector<IntVec>& out, BasisPtr& basis) const {
  std::visit(overloaded{
                 [&](const node::LevelSet& s) { collect(s.expr, out, basis); },
                 [&](const node::Union& s) {
                   s.left.collect_generators(out, basis);
                   s.right.collect_generators(out, basis);
                 },
                 [&](const node::Intersect& s) {
                   s.left.collect_generators(out, basis);
                   s.right.collect_generators(out, basis);
                 },
                 [&](const node::Diff& s) {
                   s.left.collect_generators(out, basis);
                   s.right.collect_generators(out, basis);
                 },
                 [&](const node::Complement& s) { s.inner.collect_generators(out, basis); },
                 [](const auto&) {},
             },
             node_->v);
}

namespace {

void check_basis(BasisPtr& basis, const BasisPtr& leaf) {
  if (!basis) {
    basis = leaf;
    return;
  }
  if (basis != leaf && !(*basis == *leaf)) throw InvalidArgument("freq_module: mixed frequency bases");
}

void collect(const FuncExpr& f, std::vector<IntVec>& out, BasisPtr& basis) {
  std::visit(overloaded{
                 [&](const node::TrigPoly& p) {
                   check_basis(basis, p.basis);
                   for (const auto& term : p.terms)
                     if (!is_zero_vec(term.freq)) out.push_back(term.freq);
                 },
                 [&](const node::StepCompose& s) {
                   for (const auto& b : s.branches) collect(b, out, basis);
                   for (const auto& set : s.partition) set.collect_generators(out, basis);
                 },
                 [&](const node::Shift& s) { collect(s.inner, out, basis); },
                 [&](const node::Truncate& s) { collect(s.inner, out, basis); },
                 [&](const node::Sgn& s) { collect(s.inner, out, basis); },
                 [&](const node::Sum& s) {
                   collect(s.left, out, basis);
                   collect(s.right, out, basis);
                 },
                 [&](const node::ScalarProd& s) {
                   collect(s.scalar, out, basis);
                   collect(s.vector, out, basis);
                 },
                 [&](const node::PerturbedSum& s) {
                   collect(s.inner, out, basis);
                   if (s.series->terms() == 0) return;
                   if (!s.series->lattice)
                     throw InvalidArgument(
                         "freq_module: perturbation lattice 2pi/b is not expressed in the basis");
                   require(s.series->lattice->size() == basis->size(),
                           "freq_module: perturbation lattice has wrong width");
                   out.push_back(*s.series->lattice);
                 },
                 [&](const node::DistanceTo& s) { collect(s.inner, out, basis); },
                 [&](const node::Stack& s) {
                   for (const auto& p : s.parts) collect(p, out, basis);
                 },
             },
             f.node().v);
}

}  // namespace

FrequencyModule freq_module(const FuncExpr& f) {
  std::vector<IntVec> gens;
  BasisPtr basis;
  collect(f, gens, basis);
  // Dedupe up to sign.
  std::vector<IntVec> unique;
  for (auto& g : gens) {
    if (!lex_positive(g)) g = negated(g);
    if (std::find(unique.begin(), unique.end(), g) == unique.end()) unique.push_back(g);
  }
  return FrequencyModule(basis, std::move(unique));
}

bool module_contains(const FrequencyModule& m, const IntVec& lambda) { return m.contains(lambda); }

// ---- construction ---------------------------------------------------------

FuncExpr trig_poly(BasisPtr basis, std::size_t dim, std::vector<std::pair<CPoint, IntVec>> terms,
                   bool complex_valued) {
  require(basis != nullptr, "trig_poly: null basis");
  require(dim >= 1, "trig_poly: dim must be >= 1");
  node::TrigPoly p{basis, dim, {}, complex_valued, Point(dim, 0.0), {}};
  std::map<IntVec, std::size_t> index;
  for (auto& [coef, freq] : terms) {
    require(coef.size() == dim, "trig_poly: coefficient dimension mismatch");
    require(freq.size() == basis->size(), "trig_poly: frequency width does not match basis");
    for (const auto& c : coef)
      require(std::isfinite(c.real()) && std::isfinite(c.imag()), "trig_poly: non-finite coefficient");
    require(index.emplace(freq, p.terms.size()).second, "trig_poly: duplicate frequency");
    p.terms.push_back({std::move(coef), freq, basis->value(freq)});
  }
  if (!complex_valued) {
    for (const auto& term : p.terms) {
      double scale = 1.0;
      for (const auto& c : term.coef) scale = std::max(scale, std::abs(c));
      const double tol = 1e-12 * scale;
      if (is_zero_vec(term.freq)) {
        for (std::size_t d = 0; d < dim; ++d) {
          require(std::abs(term.coef[d].imag()) <= tol,
                  "trig_poly: real-valued polynomial needs a real constant term");
          p.constant[d] += term.coef[d].real();
        }
        continue;
      }
      const auto it = index.find(negated(term.freq));
      require(it != index.end(), "trig_poly: real-valued polynomial is not conjugate-symmetric");
      const auto& partner = p.terms[it->second];
      for (std::size_t d = 0; d < dim; ++d)
        require(std::abs(partner.coef[d] - std::conj(term.coef[d])) <= tol,
                "trig_poly: real-valued polynomial is not conjugate-symmetric");
      if (lex_positive(term.freq)) {
        CPoint doubled = term.coef;
        for (auto& c : doubled) c *= 2.0;
        p.half.push_back({std::move(doubled), term.freq, term.lambda});
      }
    }
  }
  return make(std::move(p));
}

FuncExpr constant(BasisPtr basis, Point value) {
  require(basis != nullptr, "constant: null basis");
  const std::size_t dim = value.size();
  CPoint c(dim);
  for (std::size_t d = 0; d < dim; ++d) c[d] = {value[d], 0.0};
  return trig_poly(basis, dim, {{c, IntVec(basis->size(), 0)}});
}

namespace {
FuncExpr harmonic(BasisPtr basis, IntVec freq, std::complex<double> plus) {
  if (is_zero_vec(freq))
    return constant(std::move(basis), Point{2.0 * plus.real()});
  const IntVec minus = negated(freq);
  return trig_poly(basis, 1, {{CPoint{plus}, std::move(freq)}, {CPoint{std::conj(plus)}, minus}});
}
}  // namespace

FuncExpr sine(BasisPtr basis, IntVec freq, double amplitude, double phase) {
  // a sin(x) = a (e^{ix} - e^{-ix}) / 2i
  return harmonic(std::move(basis), std::move(freq),
                  std::complex<double>(0.0, -0.5 * amplitude) * std::polar(1.0, phase));
}

FuncExpr cosine(BasisPtr basis, IntVec freq, double amplitude, double phase) {
  return harmonic(std::move(basis), std::move(freq), 0.5 * amplitude * std::polar(1.0, phase));
}

FuncExpr trig_vector(const std::vector<FuncExpr>& components) {
  require(!components.empty(), "trig_vector: no components");
  const std::size_t n = components.size();
  BasisPtr basis = components.front().basis();
  std::map<IntVec, CPoint> merged;
  bool complex_valued = false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto* p = std::get_if<node::TrigPoly>(&components[i].node().v);
    require(p != nullptr && p->dim == 1, "trig_vector: components must be scalar trig polynomials");
    require(*p->basis == *basis, "trig_vector: components use different bases");
    complex_valued = complex_valued || p->complex_valued;
    for (const auto& term : p->terms) {
      auto& slot = merged.try_emplace(term.freq, CPoint(n, {0.0, 0.0})).first->second;
      slot[i] = term.coef[0];
    }
  }
  std::vector<std::pair<CPoint, IntVec>> terms;
  for (auto& [freq, coef] : merged) terms.emplace_back(coef, freq);
  return trig_poly(basis, n, std::move(terms), complex_valued);
}

FuncExpr shift(FuncExpr f, double tau) {
  require(std::isfinite(tau), "shift: non-finite tau");
  const std::size_t d = f.dim();
  return make(node::Shift{std::move(f), tau}, d);
}

FuncExpr truncate(FuncExpr f, double a) {
  require(a > 0.0 && std::isfinite(a), "truncate: a must be positive");
  const std::size_t d = f.dim();
  return make(node::Truncate{std::move(f), a}, d);
}

FuncExpr sgn_op(FuncExpr f) {
  const std::size_t d = f.dim();
  return make(node::Sgn{std::move(f)}, d);
}

FuncExpr sum(FuncExpr f, FuncExpr g) {
  require(f.dim() == g.dim(), "sum: dimension mismatch");
  const std::size_t d = f.dim();
  return make(node::Sum{std::move(f), std::move(g)}, d);
}

FuncExpr scalar_prod(FuncExpr scalar, FuncExpr vector) {
  require(scalar.dim() == 1, "scalar_prod: scalar factor must have dim 1");
  const std::size_t d = vector.dim();
  return make(node::ScalarProd{std::move(scalar), std::move(vector)}, d);
}

FuncExpr negate(FuncExpr f) {
  auto b = f.basis();
  return scalar_prod(constant(b, Point{-1.0}), std::move(f));
}

FuncExpr add_constant(FuncExpr f, double c) {
  const std::size_t d = f.dim();
  auto b = f.basis();
  return sum(std::move(f), constant(b, Point(d, c)));
}

FuncExpr perturbed_sum(FuncExpr inner, std::shared_ptr<const PerturbationSeries> series) {
  require(inner.dim() == 1, "perturbed_sum: inner function must be scalar");
  require(series != nullptr, "perturbed_sum: null series");
  require(series->Delta.size() == series->multiplier.size() &&
              series->Delta.size() == series->alpha.size(),
          "perturbed_sum: inconsistent series schedules");
  return make(node::PerturbedSum{std::move(inner), std::move(series)}, 1);
}

FuncExpr distance_to(FuncExpr f, Point x, MetricSpaceCfg space) {
  require(x.size() == f.dim(), "distance_to: point dimension mismatch");
  require(space.dim == f.dim(), "distance_to: space dimension mismatch");
  space.validate();
  return make(node::DistanceTo{std::move(f), std::move(x), std::move(space)}, 1);
}

FuncExpr stack(std::vector<FuncExpr> parts) {
  require(!parts.empty(), "stack: no parts");
  std::size_t d = 0;
  for (const auto& p : parts) d += p.dim();
  return make(node::Stack{std::move(parts)}, d);
}

FuncExpr step_compose(std::vector<SetExpr> partition, std::vector<FuncExpr> branches,
                      std::shared_ptr<const CellLocator> locator) {
  require(!branches.empty(), "step_compose: no branches");
  require(partition.size() == branches.size(), "step_compose: one branch per partition member");
  const std::size_t d = branches.front().dim();
  for (const auto& b : branches) require(b.dim() == d, "step_compose: branch dimensions differ");
  return make(node::StepCompose{std::move(partition), std::move(branches), std::move(locator)}, d);
}

SetExpr level_set(FuncExpr expr, double threshold, Relation relation) {
  require(expr.dim() == 1, "level_set: expression must be scalar");
  require(std::isfinite(threshold), "level_set: non-finite threshold");
  return make_set(node::LevelSet{std::move(expr), threshold, relation});
}
SetExpr set_union(SetExpr a, SetExpr b) { return make_set(node::Union{std::move(a), std::move(b)}); }
SetExpr set_intersect(SetExpr a, SetExpr b) {
  return make_set(node::Intersect{std::move(a), std::move(b)});
}
SetExpr set_diff(SetExpr a, SetExpr b) { return make_set(node::Diff{std::move(a), std::move(b)}); }
SetExpr set_complement(SetExpr a) { return make_set(node::Complement{std::move(a)}); }
SetExpr full_line() { return make_set(node::FullLine{}); }
SetExpr empty_set() { return make_set(node::Empty{}); }

SetExpr union_of(const std::vector<SetExpr>& sets) {
  if (sets.empty()) return empty_set();
  std::vector<SetExpr> level = sets;
  while (level.size() > 1) {
    std::vector<SetExpr> next;
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(set_union(level[i], level[i + 1]));
    if (level.size() % 2 == 1) next.push_back(level.back());
    level = std::move(next);
  }
  return level.front();
}

Point truncate_value(std::span<const double> h, double a) {
  const double n = euclidean_norm(h);
  Point r(h.begin(), h.end());
  if (n > a)
    for (auto& x : r) x *= a / n;
  return r;
}

Point sgn_value(std::span<const double> h) {
  const double n = euclidean_norm(h);
  Point r(h.size(), 0.0);
  if (n > 0.0)
    for (std::size_t i = 0; i < h.size(); ++i) r[i] = h[i] / n;
  return r;
}

}  // namespace ap
