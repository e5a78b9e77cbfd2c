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

#include <cmath>
#include <numbers>
#include <random>

#include "ap/expr.hpp"
#include "ap/kernels.hpp"
#include "ap/phase.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace ap;
using ap::testing::basis_1_sqrt2;
using ap::testing::random_trig;

namespace {

double norm_diff(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("sin vanishes at the origin") {
  const auto f = sine(basis_1_sqrt2(), {1, 0});
  CHECK(f.eval(0.0)[0] == 0.0);
  CHECK(f.eval(std::numbers::pi / 2)[0] == doctest::Approx(1.0));
}

TEST_CASE("e^{it} as a vector is (-1, 0) at pi") {
  const auto b = basis_1_sqrt2();
  const auto f = trig_vector({cosine(b, {1, 0}), sine(b, {1, 0})});
  const Point v = f.eval(std::numbers::pi);
  CHECK(v[0] == doctest::Approx(-1.0));
  CHECK(std::abs(v[1]) < 1e-15);
}

TEST_CASE("complex exponential evaluates as a complex vector") {
  const auto b = basis_1_sqrt2();
  const auto f = trig_poly(b, 1, {{CPoint{{1.0, 0.0}}, IntVec{1, 0}}}, true);
  const CPoint z = f.eval_complex(std::numbers::pi / 2);
  CHECK(std::abs(z[0] - std::complex<double>(0.0, 1.0)) < 1e-15);
  CHECK(f.eval(std::numbers::pi / 2)[0] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("truncation of a large constant has norm a") {
  const auto f = truncate(constant(basis_1_sqrt2(), Point{3.0, 4.0}), 1.0);
  const Point v = f.eval(12.5);
  CHECK(v[0] == doctest::Approx(0.6));
  CHECK(v[1] == doctest::Approx(0.8));
}

TEST_CASE("truncation is the identity inside the ball") {
  const auto s = sine(basis_1_sqrt2(), {1, 1}, 0.5);
  const auto f = truncate(s, 1.0);
  for (double t : {-3.0, 0.1, 7.7, 1234.5}) CHECK(f.eval(t)[0] == s.eval(t)[0]);
}

TEST_CASE("sgn of a negative constant and at a zero") {
  const auto b = basis_1_sqrt2();
  CHECK(sgn_op(constant(b, Point{-3.0})).eval(1.0)[0] == -1.0);
  CHECK(sgn_op(sine(b, {1, 0})).eval(0.0)[0] == 0.0);
  CHECK(sgn_op(constant(b, Point{0.0, 0.0})).eval(2.0) == Point{0.0, 0.0});
}

TEST_CASE("non-finite t and invalid arguments are rejected") {
  const auto b = basis_1_sqrt2();
  const auto f = sine(b, {1, 0});
  CHECK_THROWS_AS(f.eval(std::nan("")), InvalidArgument);
  CHECK_THROWS_AS(f.eval(INFINITY), InvalidArgument);
  CHECK_THROWS_AS(truncate(f, 0.0), InvalidArgument);
  CHECK_THROWS_AS(truncate(f, -1.0), InvalidArgument);
  CHECK_THROWS_AS(trig_poly(b, 1, {{CPoint{{1.0, 0.0}}, IntVec{1, 0}}}), InvalidArgument);
  CHECK_THROWS_AS(trig_poly(b, 1, {{CPoint{{1.0, 0.0}}, IntVec{0, 0}}, {CPoint{{2.0, 0.0}}, IntVec{0, 0}}}),
                  InvalidArgument);
  CHECK_THROWS_AS(sum(f, constant(b, Point{1.0, 2.0})), InvalidArgument);
}

TEST_CASE("freq_module reads generators off terms and wrappers") {
  const auto b = basis_1_sqrt2();
  const auto f = sum(sine(b, {1, 0}), sine(b, {0, 1}));
  const auto m = freq_module(f);
  CHECK(m.contains(IntVec{1, 0}));
  CHECK(m.contains(IntVec{0, 1}));
  CHECK(m.contains(IntVec{3, -2}));

  const auto t = freq_module(truncate(sine(b, {1, 0}), 0.5));
  CHECK(t.contains(IntVec{1, 0}));
  CHECK_FALSE(t.contains(IntVec{0, 1}));

  CHECK(freq_module(constant(b, Point{2.0})).is_zero());
}

TEST_CASE("freq_module rejects mixed bases") {
  const auto b1 = basis_1_sqrt2();
  const auto b2 = std::make_shared<const FrequencyBasis>(std::vector<double>{1.0, std::sqrt(3.0)});
  CHECK_THROWS_AS(freq_module(sum(sine(b1, {1, 0}), sine(b2, {0, 1}))), InvalidArgument);
}

TEST_CASE("module membership examples") {
  const auto b = basis_1_sqrt2();
  const FrequencyModule full(b, {{1, 0}, {0, 1}});
  CHECK(module_contains(full, {3, -2}));
  const FrequencyModule even(b, {{2, 0}});
  CHECK_FALSE(module_contains(even, {1, 0}));
  CHECK(module_contains(even, {0, 0}));
  CHECK(module_contains(even, {-4, 0}));
  CHECK_THROWS_AS(module_contains(even, {1, 0, 0}), InvalidArgument);
}

TEST_CASE("module sums and the Hermite form") {
  const auto b = basis_1_sqrt2();
  const FrequencyModule a(b, {{4, 0}, {6, 0}});
  CHECK(a.contains(IntVec{2, 0}));
  CHECK_FALSE(a.contains(IntVec{1, 0}));
  const FrequencyModule c(b, {{3, 1}});
  const auto s = a + c;
  CHECK(s.contains(IntVec{1, 1}));
  CHECK(s.contains(a));
  CHECK(s.contains(c));
  CHECK_FALSE(a.contains(s));
}

TEST_CASE("shifted expressions evaluate at t + tau") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  const auto b = basis_1_sqrt2();
  for (int k = 0; k < 20; ++k) {
    const auto f = random_trig(rng, b, 4);
    const double tau = u(rng);
    const auto g = shift(f, tau);
    for (int i = 0; i < 50; ++i) {
      const double t = u(rng);
      CHECK(g.eval(t)[0] == doctest::Approx(f.eval(t + tau)[0]).epsilon(1e-12));
    }
  }
}

TEST_CASE("real trig polynomials have no imaginary residue") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1e4, 1e4);
  const auto b = basis_1_sqrt2();
  const auto f = random_trig(rng, b, 6, 2);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto* p = std::get_if<node::TrigPoly>(&f.node().v);
    const double t = u(rng);
    std::complex<double> acc = 0.0;
    for (const auto& term : p->terms) acc += term.coef[0] * std::polar(1.0, term.lambda * t);
    worst = std::max(worst, std::abs(acc.imag()));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("increment agrees with the difference of evaluations") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  const auto b = basis_1_sqrt2();
  const MetricSpaceCfg space(2, MetricKind::euclidean);
  for (int k = 0; k < 10; ++k) {
    const auto f = random_trig(rng, b, 3, 2);
    const auto s = random_trig(rng, b, 2);
    std::vector<FuncExpr> exprs{f,
                                shift(f, 0.7),
                                truncate(f, 0.4),
                                scalar_prod(s, f),
                                sum(f, shift(f, -1.0)),
                                distance_to(f, Point{0.1, -0.2}, space),
                                stack({f, s})};
    for (const auto& e : exprs) {
      for (int i = 0; i < 20; ++i) {
        const double t = u(rng);
        const double tau = 0.25;
        const Point inc = e.increment(Time{t, 0.0}, tau);
        const Point a = e.eval(t + tau), c = e.eval(t);
        for (std::size_t d = 0; d < inc.size(); ++d)
          CHECK(inc[d] == doctest::Approx(a[d] - c[d]).epsilon(1e-9).scale(1.0));
      }
    }
  }
}

TEST_CASE("increment stays proportional to tau far below ulp(t)") {
  const auto f = sine(basis_1_sqrt2(), {1, 0});
  const double t = 5000.0;
  const double tau = 1e-20;
  const double inc = f.increment(Time{t, 0.0}, tau)[0];
  CHECK(inc == doctest::Approx(std::cos(t) * tau).epsilon(1e-9));
  CHECK(f.eval(t + tau)[0] - f.eval(t)[0] == 0.0);
}

TEST_CASE("truncation is 2-Lipschitz on random vector pairs") {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> n(0.0, 2.0);
  std::uniform_real_distribution<double> ua(0.1, 3.0);
  for (int i = 0; i < 10000; ++i) {
    Point h1(3), h2(3);
    for (auto& x : h1) x = n(rng);
    for (auto& x : h2) x = n(rng);
    const double a = ua(rng);
    CHECK(norm_diff(truncate_value(h1, a), truncate_value(h2, a)) <= 2.0 * norm_diff(h1, h2) + 1e-15);
  }
}

TEST_CASE("lattice phase is exact for huge multipliers") {
  const double b = 2.0 * std::numbers::pi;
  CHECK(lattice_cycles(3.0, b, b) == 0.0);
  CHECK(lattice_cycles(1e15, 0.25 * b, b) == doctest::Approx(0.0).epsilon(1e-12));
  const double c = lattice_cycles(1.0, 1.0, b);
  CHECK(c == doctest::Approx(1.0 / b));
  const double neg = lattice_cycles(1.0, -1.0, b);
  CHECK(neg == doctest::Approx(1.0 - 1.0 / b));
}

TEST_CASE("perturbation series is b-periodic at exactly representable shifts") {
  PerturbationSeries s;
  s.b = 2.0 * std::numbers::pi;
  s.Delta = {0.15, 1e-3, 1e-6};
  s.multiplier = {397887.0, 5.0e14, 1.0e27};
  for (double m : s.multiplier) s.alpha.push_back(m);
  s.delta = {0.0, 0.0, 0.0};
  s.tau0 = {0.0, 0.0, 0.0};
  s.depth = 2;
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(-1e4, 1e4);
  int checked = 0;
  while (checked < 1000) {
    const double t = u(rng);
    double sum, err;
    ap::kernels::two_sum(t, s.b, sum, err);
    if (err != 0.0) continue;
    CHECK(std::abs(s.eval(sum) - s.eval(t)) <= 1e-12);
    ++checked;
  }
}

TEST_CASE("step compose picks the branch of the containing set and flags gaps") {
  const auto b = basis_1_sqrt2();
  const auto f = sine(b, {1, 0});
  const auto pos = level_set(negate(f), 0.0, Relation::lt);
  const auto neg = level_set(f, 0.0, Relation::lt);
  const auto g = step_compose({pos, neg}, {constant(b, Point{1.0}), constant(b, Point{-1.0})});
  CHECK(g.eval(1.0)[0] == 1.0);
  CHECK(g.eval(4.0)[0] == -1.0);
  EvalFlags flags;
  CHECK(g.eval(0.0, &flags)[0] == 1.0);
  CHECK(flags.gap_hits == 1);
}

TEST_CASE("set algebra membership") {
  const auto b = basis_1_sqrt2();
  const auto s = level_set(sine(b, {1, 0}), 0.0);
  CHECK(full_line().contains(123.0));
  CHECK_FALSE(empty_set().contains(1.0));
  CHECK_FALSE(s.contains(std::numbers::pi / 2));
  CHECK_FALSE(set_diff(s, s).contains(-1.0));
  CHECK(set_complement(s).contains(1.0));
  CHECK(set_union(s, set_complement(s)).contains(0.3));
  CHECK_FALSE(set_intersect(s, set_complement(s)).contains(-0.3));
  CHECK(union_of({}).is_empty_set());
  CHECK(union_of({empty_set(), empty_set(), s}).contains(-1.0));
}

TEST_CASE("module of a wrapper stays inside its generator lattice") {
  std::mt19937_64 rng(16);
  std::uniform_int_distribution<int> d(-20, 20);
  const auto b = basis_1_sqrt2();
  const auto f = sgn_op(truncate(shift(sum(sine(b, {2, 0}), sine(b, {0, 3})), 0.4), 0.5));
  const auto m = freq_module(f);
  for (int i = 0; i < 500; ++i) {
    const IntVec k{d(rng), d(rng)};
    const bool inside = k[0] % 2 == 0 && k[1] % 3 == 0;
    CHECK(m.contains(k) == inside);
  }
}

TEST_CASE("integer lattice reduction agrees with the fmod reference") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> lm(0.0, 45.0), lt(-45.0, 5.0), u(0.5, 1.0);
  const double b = 2.0 * std::numbers::pi;
  for (int i = 0; i < 20000; ++i) {
    const double m = std::max(1.0, std::floor(u(rng) * std::pow(10.0, lm(rng))));
    double t = u(rng) * std::pow(10.0, lt(rng));
    if (i % 2) t = -t;
    const double fast = lattice_cycles(m, t, b);
    const double ref = lattice_cycles_fmod(m, t, b);
    const double diff = std::abs(fast - ref);
    CHECK(std::min(diff, 1.0 - diff) <= 1e-15);
  }
  CHECK(lattice_cycles(7.0, 0.0, b) == 0.0);
  CHECK(lattice_cycles(1.0, 3.0, 3.0) == 0.0);
  CHECK(lattice_cycles(1.0, 2.5, 1.0) == 0.5);
  CHECK(lattice_cycles(3.0, -0.5, 1.0) == 0.5);
}
