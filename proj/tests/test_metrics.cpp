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

#include "ap/metrics.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace ap;
using ap::testing::basis_1_sqrt2;
using ap::testing::basis_1_sqrt2_pi;
using ap::testing::random_trig;

namespace {

const MetricSpaceCfg kLine(1, MetricKind::euclidean);
const MetricSpaceCfg kCappedLine(1, MetricKind::capped);

AveragingScheme small_scheme() { return AveragingScheme{{100, 200, 400}, 1e-2, 3, "pairwise"}; }

}  // namespace

TEST_CASE("scheme validation") {
  CHECK_NOTHROW(AveragingScheme::standard().validate());
  CHECK(AveragingScheme::standard().b_max() == 1e4);
  CHECK_THROWS_AS((AveragingScheme{{}, 1e-3, 1, "pairwise"}.validate()), InvalidArgument);
  CHECK_THROWS_AS((AveragingScheme{{100, 50}, 1e-3, 1, "pairwise"}.validate()), InvalidArgument);
  CHECK_THROWS_AS((AveragingScheme{{100}, 2.0, 1, "pairwise"}.validate()), InvalidArgument);
  CHECK_THROWS_AS((AveragingScheme{{100}, 1e-3, 2, "pairwise"}.validate()), InvalidArgument);
  CHECK_THROWS_AS((AveragingScheme{{100}, 1e-3, 0, "pairwise"}.validate()), InvalidArgument);
  CHECK_THROWS_AS((AveragingScheme{{100}, 1e-3, 1, "kahan"}.validate()), InvalidArgument);
}

TEST_CASE("time average of a constant") {
  const auto est = time_average(constant(basis_1_sqrt2(), Point{1.0}), small_scheme());
  CHECK(est.value == 1.0);
  CHECK(est.spread == 0.0);
  CHECK(est.per_horizon.size() == 3);
}

TEST_CASE("time average of sin^2 and |sin| at b_max = 1e4") {
  const auto b = basis_1_sqrt2();
  const auto s = sine(b, {1, 0});
  const auto sq = scalar_prod(s, s);
  const auto scheme = AveragingScheme::standard();
  CHECK(std::abs(time_average(sq, scheme).value - 0.5) < 1e-3);
  const auto abs_sin = distance_to(s, Point{0.0}, kLine);
  CHECK(std::abs(time_average(abs_sin, scheme).value - 2.0 / std::numbers::pi) < 1e-3);
}

TEST_CASE("time average rejects vector integrands") {
  const auto b = basis_1_sqrt2();
  CHECK_THROWS_AS(time_average(constant(b, Point{1.0, 1.0}), small_scheme()), InvalidArgument);
}

TEST_CASE("parallel and serial averages are bit-identical") {
  const auto f = sine(basis_1_sqrt2(), {1, 1});
  auto fn = [&](double t) { return f.eval(t)[0] * f.eval(t)[0]; };
  const auto a = average_by(small_scheme(), fn);
  const auto c = average_by_serial(small_scheme(), fn);
  CHECK(a.value == c.value);
  for (std::size_t k = 0; k < a.per_horizon.size(); ++k)
    CHECK(a.per_horizon[k].second == c.per_horizon[k].second);
}

TEST_CASE("Besicovitch distances") {
  const auto b = basis_1_sqrt2();
  const auto s = sine(b, {1, 0});
  const auto zero = constant(b, Point{0.0});
  const auto scheme = AveragingScheme::standard();
  CHECK(std::abs(metric_DB_p(s, zero, 2.0, kLine, scheme).value - std::sqrt(0.5)) < 1e-3);
  CHECK(metric_DB_p(s, s, 1.5, kLine, small_scheme()).value == 0.0);
  CHECK(metric_DB_p(constant(b, Point{5.0}), zero, 1.0, kCappedLine, small_scheme()).value == 1.0);
  CHECK_THROWS_AS(metric_DB_p(s, zero, 0.5, kLine, small_scheme()), InvalidArgument);
  CHECK_THROWS_AS(metric_DB_p(s, zero, 2.0, kCappedLine, small_scheme()), InvalidArgument);
  CHECK_THROWS_AS(metric_DB_p(s, constant(b, Point{0.0, 0.0}), 1.0, kLine, small_scheme()),
                  InvalidArgument);
}

TEST_CASE("Stepanov distances") {
  const auto b = basis_1_sqrt2_pi();
  const auto s = sine(b, {0, 0, 1});
  const auto zero = constant(b, Point{0.0});
  const auto scheme = small_scheme();
  CHECK(metric_DS_p(s, s, 1.0, kLine, scheme, scheme.step) == 0.0);
  const double sq = metric_DS_p(sgn_op(s), zero, 1.0, kLine, scheme, scheme.step);
  CHECK(std::abs(sq - 1.0) <= 2.0 * scheme.step);
  CHECK_THROWS_AS(metric_DS_p(s, zero, 1.0, kLine, scheme, 0.0), InvalidArgument);
}

TEST_CASE("Besicovitch is dominated by Stepanov on random pairs") {
  std::mt19937_64 rng(21);
  const auto b = basis_1_sqrt2();
  const auto scheme = small_scheme();
  for (int i = 0; i < 10; ++i) {
    const auto f = random_trig(rng, b, 4), g = random_trig(rng, b, 4);
    for (double p : {1.0, 2.0})
      CHECK(metric_DB_p(f, g, p, kLine, scheme).value <=
            metric_DS_p(f, g, p, kLine, scheme, scheme.step) + 1e-6);
  }
}

TEST_CASE("sup distance") {
  const auto b = basis_1_sqrt2();
  const auto s = sine(b, {1, 0});
  const auto scheme = small_scheme();
  CHECK(std::abs(metric_Dinf(s, constant(b, Point{0.0}), kLine, scheme) - 1.0) < 1e-4);
  CHECK(metric_Dinf(s, s, kLine, scheme) == 0.0);
  const MetricSpaceCfg plane(2, MetricKind::euclidean);
  CHECK(metric_Dinf(constant(b, Point{1.0, 2.0}), constant(b, Point{4.0, 6.0}), plane, scheme) == 5.0);
}

TEST_CASE("metric symmetry and triangle inequality on a shared grid") {
  std::mt19937_64 rng(22);
  const auto b = basis_1_sqrt2();
  const auto scheme = small_scheme();
  for (int i = 0; i < 5; ++i) {
    const auto f = random_trig(rng, b, 3), g = random_trig(rng, b, 3), h = random_trig(rng, b, 3);
    for (double p : {1.0, 2.0}) {
      const double fg = metric_DB_p(f, g, p, kLine, scheme).value;
      CHECK(fg == metric_DB_p(g, f, p, kLine, scheme).value);
      const double gh = metric_DB_p(g, h, p, kLine, scheme).value;
      const double fh = metric_DB_p(f, h, p, kLine, scheme).value;
      CHECK(fh <= fg + gh + 1e-6);
      const double sfg = metric_DS_p(f, g, p, kLine, scheme, scheme.step);
      const double sgh = metric_DS_p(g, h, p, kLine, scheme, scheme.step);
      const double sfh = metric_DS_p(f, h, p, kLine, scheme, scheme.step);
      CHECK(sfg == metric_DS_p(g, f, p, kLine, scheme, scheme.step));
      CHECK(sfh <= sfg + sgh + 1e-6);
    }
    const double c1 = metric_DB_p(f, g, 1.0, kCappedLine, scheme).value;
    CHECK(c1 == metric_DB_p(g, f, 1.0, kCappedLine, scheme).value);
    CHECK(metric_DB_p(f, h, 1.0, kCappedLine, scheme).value <=
          c1 + metric_DB_p(g, h, 1.0, kCappedLine, scheme).value + 1e-9);
  }
}

TEST_CASE("Lipschitz composition with the clamp to the unit ball") {
  std::mt19937_64 rng(23);
  const auto b = basis_1_sqrt2();
  const auto scheme = small_scheme();
  for (int i = 0; i < 5; ++i) {
    const auto f = random_trig(rng, b, 3), g = random_trig(rng, b, 3);
    const double before = metric_DB_p(f, g, 1.0, kCappedLine, scheme).value;
    const double after = metric_DB_p(truncate(f, 0.5), truncate(g, 0.5), 1.0, kCappedLine, scheme).value;
    CHECK(after <= 2.0 * before + 1e-6);
  }
}

TEST_CASE("upper densities") {
  const auto scheme = AveragingScheme::standard();
  CHECK(density_upper(full_line(), small_scheme(), DensityMode::complement).value == 0.0);

  const auto b = basis_1_sqrt2_pi();
  // sin(pi t) >= 0 exactly on the intervals [2k, 2k + 1].
  const auto halves = level_set(negate(sine(b, {0, 0, 1})), 0.0);
  CHECK(std::abs(density_upper(halves, scheme, DensityMode::complement).value - 0.5) < 1e-3);

  const auto small = level_set(distance_to(sine(b, {1, 0, 0}), Point{0.0}, kLine), 0.1, Relation::lt);
  const double expect = 2.0 / std::numbers::pi * std::asin(0.1);
  CHECK(std::abs(density_upper(small, scheme, DensityMode::direct).value - expect) < 2e-3);
}

TEST_CASE("density is subadditive over unions") {
  std::mt19937_64 rng(24);
  const auto b = basis_1_sqrt2();
  const auto scheme = small_scheme();
  for (int i = 0; i < 5; ++i) {
    const auto t1 = level_set(random_trig(rng, b, 3), 0.0);
    const auto t2 = level_set(random_trig(rng, b, 3), 0.1);
    const double u = density_upper(set_union(t1, t2), scheme, DensityMode::direct).value;
    CHECK(u <= density_upper(t1, scheme, DensityMode::direct).value +
                   density_upper(t2, scheme, DensityMode::direct).value + 1e-6);
  }
}

TEST_CASE("Fourier-Bohr coefficients") {
  const auto b = basis_1_sqrt2();
  const auto scheme = AveragingScheme{{1000, 2000, 4000}, 1e-2, 3, "pairwise"};
  const auto e = trig_poly(b, 1, {{CPoint{{1.0, 0.0}}, IntVec{1, 0}}}, true);
  const auto one = fourier_bohr(e, 1.0, scheme);
  REQUIRE(one.error_bound);
  CHECK(*one.error_bound == doctest::Approx(2.0 / 4000));
  CHECK(std::abs(one.coef[0] - 1.0) <= *one.error_bound);
  CHECK(std::abs(fourier_bohr(e, 2.0, scheme).coef[0]) <= 2.0 / 4000);
  const auto s = sine(b, {0, 1});
  const auto c = fourier_bohr(s, std::sqrt(2.0), scheme);
  CHECK(std::abs(c.coef[0] - std::complex<double>(0.0, -0.5)) <= *c.error_bound);
}

TEST_CASE("phasor Fourier kernel matches direct evaluation") {
  std::mt19937_64 rng(25);
  const auto b = basis_1_sqrt2();
  const auto scheme = AveragingScheme{{100, 200, 400}, 1e-3, 3, "pairwise"};
  const auto f = random_trig(rng, b, 6, 2);
  const std::vector<double> lambdas{0.0, 1.0, std::sqrt(2.0), 2.5, -1.0 - std::sqrt(2.0)};
  const auto fast = fourier_bohr_many(f, lambdas, scheme);
  const auto ref = fourier_bohr_reference(f, lambdas, scheme);
  for (std::size_t l = 0; l < lambdas.size(); ++l)
    for (std::size_t d = 0; d < 2; ++d) CHECK(std::abs(fast[l].coef[d] - ref[l].coef[d]) < 1e-10);
}

TEST_CASE("Fourier-Bohr recovers trig coefficients and rejects non-exponents") {
  std::mt19937_64 rng(26);
  const auto b = basis_1_sqrt2();
  const auto scheme = AveragingScheme{{1000, 2000, 4000}, 1e-2, 3, "pairwise"};
  const auto f = random_trig(rng, b, 4);
  const auto& p = std::get<node::TrigPoly>(f.node().v);
  std::vector<double> lambdas;
  for (const auto& term : p.terms) lambdas.push_back(term.lambda);
  const auto est = fourier_bohr_many(f, lambdas, scheme);
  for (std::size_t k = 0; k < p.terms.size(); ++k)
    CHECK(std::abs(est[k].coef[0] - p.terms[k].coef[0]) <= *est[k].error_bound);
  std::uniform_real_distribution<double> u(0.05, 0.4);
  for (int i = 0; i < 20; ++i) {
    const double lam = 3.5 * std::sqrt(2.0) + 4.0 + u(rng) + i;
    const auto r = fourier_bohr(f, lam, scheme);
    CHECK(std::abs(r.coef[0]) <= *r.error_bound);
  }
}

TEST_CASE("Hausdorff distance") {
  const std::vector<Point> a{{0.0}}, ab{{0.0}, {1.0}}, five{{5.0}};
  CHECK(dist_hausdorff(ab, ab, kLine) == 0.0);
  CHECK(dist_hausdorff(a, ab, kLine) == 1.0);
  CHECK(dist_hausdorff(a, five, kCappedLine) == 1.0);
  CHECK(dist_hausdorff(a, five, kLine) == 5.0);
  CHECK_THROWS_AS(dist_hausdorff({}, a, kLine), InvalidArgument);
}

TEST_CASE("almost periods of an exactly periodic function") {
  const auto b = basis_1_sqrt2_pi();
  const auto f = sine(b, {0, 0, 2});
  const auto scan = almost_periods(f, 0.05, ShiftMetric::DB_p, 1.0, 3.0, 0.5, kLine, small_scheme());
  REQUIRE_FALSE(scan.empty());
  CHECK(scan.distance[1] < 1e-6);
  CHECK(scan.accepted.front() == 1.0);
  CHECK(scan.witness_gap);
}

TEST_CASE("almost periods of a constant and of a quasiperiodic sum") {
  const auto b = basis_1_sqrt2();
  const auto scheme = small_scheme();
  const auto c = constant(b, Point{2.0});
  const auto all = almost_periods(c, 0.1, ShiftMetric::DS_p, 1.0, 5.0, 0.25, kLine, scheme);
  CHECK(all.accepted.size() == all.tau.size());
  CHECK(*all.witness_gap == doctest::Approx(0.25));

  const auto f = sum(sine(b, {1, 0}), sine(b, {0, 1}));
  const auto scan = almost_periods(f, 0.2, ShiftMetric::DB_p, 1.0, 200.0, 0.05, kLine,
                                   AveragingScheme{{100, 200}, 0.05, 2, "pairwise"});
  CHECK_FALSE(scan.empty());
  REQUIRE(scan.witness_gap);
  CHECK(std::isfinite(*scan.witness_gap));
  CHECK_THROWS_AS(almost_periods(f, 0.2, ShiftMetric::DB_p, 1.0, 0.01, 0.05, kLine, scheme),
                  InvalidArgument);
}

TEST_CASE("shift distance of sin against the closed form") {
  const auto f = sine(basis_1_sqrt2(), {1, 0});
  const auto scheme = AveragingScheme{{1000, 2000, 4000}, 1e-2, 3, "pairwise"};
  for (double tau : {1e-6, 0.01, 0.3}) {
    const double d = shift_distance(f, tau, ShiftMetric::capped, 1.0, kLine, scheme);
    CHECK(d == doctest::Approx(4.0 / std::numbers::pi * std::sin(tau / 2)).epsilon(2e-3));
  }
}
