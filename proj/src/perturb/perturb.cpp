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

#include "ap/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace ap {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSlack = 0.9;

double max_lipschitz(const std::vector<FuncExpr>& family) {
  double l = 0.0;
  for (const auto& f : family) l = std::max(l, f.lipschitz_bound());
  return l;
}

void check_family(const std::vector<FuncExpr>& family) {
  require(!family.empty(), "perturbation: family is empty");
  for (const auto& f : family) require(f.dim() == 1, "perturbation: family members must be scalar");
}

std::optional<IntVec> find_lattice(const std::vector<FuncExpr>& family, double b) {
  for (const auto& f : family) {
    try {
      if (auto v = f.basis()->express(2.0 * kPi / b)) return v;
    } catch (const InvalidArgument&) {
    }
  }
  return std::nullopt;
}

std::string describe(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

Lemma41Params lemma41_params(double eps, double Delta) {
  require(eps > 0.0 && eps <= 1.0, "lemma41_params: eps must lie in (0, 1]");
  require(Delta > 0.0 && std::isfinite(Delta), "lemma41_params: Delta must be positive");
  Lemma41Params p;
  p.eps = eps;
  p.Delta = Delta;
  // 1/(N+1) < eps/2  <=>  N + 1 > 2/eps.
  auto n = static_cast<std::size_t>(std::floor(2.0 / eps));
  while (n > 1 && 1.0 / static_cast<double>(n) < eps / 2.0) --n;
  while (!(1.0 / static_cast<double>(n + 1) < eps / 2.0)) ++n;
  p.N = n;
  const double N = static_cast<double>(n);
  p.eps_prime = eps / (2.0 * N * (N + 1.0));
  p.delta_prime = 2.0 * std::sin(kPi / (2.0 * N)) * std::sin(kPi * p.eps_prime / 2.0);
  p.delta = std::min(1.0, p.delta_prime * Delta / 3.0);
  return p;
}

std::vector<double> geometric_probes(double lo, double hi, double ratio) {
  require(lo > 0.0 && hi >= lo && std::isfinite(hi), "geometric_probes: need 0 < lo <= hi");
  require(ratio > 1.0, "geometric_probes: ratio must exceed 1");
  std::vector<double> out;
  for (double t = lo; t < hi; t *= ratio) out.push_back(t);
  out.push_back(hi);
  return out;
}

std::vector<double> default_probes(const std::vector<FuncExpr>& family, double bound, double cap,
                                   double ratio) {
  check_family(family);
  require(bound > 0.0 && cap > 0.0, "default_probes: bound and cap must be positive");
  const double l = max_lipschitz(family);
  double lo = (l > 0.0 && std::isfinite(l)) ? bound / (2.0 * l) : cap * 1e-6;
  if (!std::isnormal(lo)) throw StageFailure("tau0_estimate", "probe grid start underflows");
  lo = std::min(lo, cap);
  return geometric_probes(lo, cap, ratio);
}

Tau0Result tau0_estimate(const std::vector<FuncExpr>& family, double bound,
                         const AveragingScheme& scheme, const std::vector<double>& tau_probe) {
  check_family(family);
  require(bound > 0.0, "tau0_estimate: bound must be positive");
  require(!tau_probe.empty(), "tau0_estimate: empty probe grid");
  require(std::is_sorted(tau_probe.begin(), tau_probe.end()) && tau_probe.front() > 0.0,
          "tau0_estimate: probes must be positive and ascending");
  const MetricSpaceCfg line(1, MetricKind::capped);
  Tau0Result r;
  for (double tau : tau_probe) {
    double worst = 0.0;
    for (const auto& f : family)
      worst = std::max(worst, shift_distance(f, tau, ShiftMetric::capped, 1.0, line, scheme));
    r.trace.emplace_back(tau, worst);
    if (!(worst < bound)) break;
    r.tau0 = tau;
  }
  if (r.tau0 == 0.0)
    throw StageFailure("tau0_estimate", "smallest probe " + describe(tau_probe.front()) +
                                            " already gives distance " +
                                            describe(r.trace.front().second) + " >= bound " +
                                            describe(bound));
  return r;
}

double lattice_multiplier(double b, double tau0) {
  require(b > 0.0 && tau0 > 0.0, "lattice_multiplier: b and tau0 must be positive");
  const double q = b / (2.0 * tau0);
  require(std::isfinite(q), "lattice_multiplier: multiplier overflows");
  const double m = std::floor(q);
  // Above 2^53 every double is an integer and m + 1 may round back to m.
  double up = m + 1.0;
  if (!(up > q)) up = std::nextafter(q, std::numeric_limits<double>::infinity());
  return std::max(up, 1.0);
}

Lemma41Construction lemma41_construct(const std::vector<FuncExpr>& family, double eps, double Delta,
                                      double b, const PerturbOptions& options) {
  check_family(family);
  require(b > 0.0 && std::isfinite(b), "lemma41_construct: b must be positive");
  Lemma41Construction c;
  c.b = b;
  c.params = lemma41_params(eps, Delta);
  const double bound = c.params.eps_prime * c.params.delta;
  c.tau0 = tau0_estimate(family, bound, options.scan,
                         geometric_probes(std::min(bound / (2.0 * std::max(max_lipschitz(family), 1e-300)),
                                                   b / 2.0),
                                          b / 2.0, options.probe_ratio));
  c.multiplier = lattice_multiplier(b, c.tau0.tau0);
  c.alpha = c.multiplier * 2.0 * kPi / b;
  return c;
}

PerturbationSeries build_perturbation(const std::vector<FuncExpr>& family, double Delta, double b,
                                      std::size_t J, const PerturbOptions& options) {
  check_family(family);
  require(Delta > 0.0 && std::isfinite(Delta), "build_perturbation: Delta must be positive");
  require(b > 0.0 && std::isfinite(b), "build_perturbation: b must be positive");

  PerturbationSeries s;
  s.b = b;
  s.family_tag = options.family_tag;
  s.lattice = options.lattice ? options.lattice : find_lattice(family, b);

  for (std::size_t j = 0; j <= J; ++j) {
    const std::string stage = "build_perturbation stage " + std::to_string(j);
    auto underflow = [&](const std::string& what) {
      return StageFailure(stage, what + " underflows; achieved depth " +
                                     (j == 0 ? std::string("none") : std::to_string(j - 1)));
    };

    double dj = Delta / 2.0;
    if (j > 0) {
      double cap = std::ldexp(Delta, -static_cast<int>(j + 1));
      for (std::size_t k = 0; k < j; ++k)
        cap = std::min(cap, std::ldexp(s.delta[k], -static_cast<int>(j - k)));
      dj = kSlack * cap;
    }
    if (!std::isnormal(dj)) throw underflow("Delta_j");

    const Lemma41Params lp = lemma41_params(std::ldexp(1.0, -static_cast<int>(j + 1)), dj);
    const double bound = lp.eps_prime * lp.delta;
    if (!std::isnormal(bound) || !std::isnormal(lp.delta / 2.0)) throw underflow("delta_j");

    // Stage family f_j = f + sum_{k<j} Delta_k sin(alpha_k t).
    std::vector<FuncExpr> stage_family;
    if (j == 0) {
      stage_family = family;
    } else {
      auto head = std::make_shared<const PerturbationSeries>(s.head(j));
      for (const auto& f : family) stage_family.push_back(perturbed_sum(f, head));
    }

    const double lip = max_lipschitz(stage_family);
    if (lip > 0.0 && !std::isnormal(bound / (2.0 * lip))) throw underflow("tau0 probe grid");

    Tau0Result t0;
    try {
      t0 = tau0_estimate(stage_family, bound, options.scan,
                         default_probes(stage_family, bound, b / 2.0, options.probe_ratio));
    } catch (const StageFailure& e) {
      throw StageFailure(stage, e.what());
    }
    const double m = lattice_multiplier(b, t0.tau0);
    const double alpha = m * 2.0 * kPi / b;
    if (!std::isfinite(alpha)) throw underflow("tau0");

    s.Delta.push_back(dj);
    s.multiplier.push_back(m);
    s.alpha.push_back(alpha);
    s.delta.push_back(lp.delta / 2.0);
    s.tau0.push_back(t0.tau0);
    s.depth = j;
  }
  return s;
}

FuncExpr perturbed(const FuncExpr& f, const PerturbationSeries& series) {
  return perturbed_sum(f, std::make_shared<const PerturbationSeries>(series));
}

AverageEstimate verify_level_density(const FuncExpr& f, const PerturbationSeries& series,
                                     std::size_t stage, const AveragingScheme& scheme) {
  require(stage < series.terms(), "verify_level_density: stage exceeds series depth");
  const FuncExpr h = perturbed(f, series);
  const double d = series.delta[stage];
  return average_by(scheme, [&](double t) {
    return std::abs(h.eval_at(Time{t, 0.0})[0]) < d ? 1.0 : 0.0;
  });
}

std::vector<AverageEstimate> verify_level_density_all(const FuncExpr& f,
                                                      const PerturbationSeries& series,
                                                      const AveragingScheme& scheme) {
  require(series.terms() > 0, "verify_level_density: empty series");
  const FuncExpr h = perturbed(f, series);
  return average_by_multi(scheme, series.terms(), [&](double t, std::span<double> out) {
    const double v = std::abs(h.eval_at(Time{t, 0.0})[0]);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = v < series.delta[j] ? 1.0 : 0.0;
  });
}

std::optional<std::string> check_schedule(const PerturbationSeries& s, double Delta) {
  const double tol = 1e-15;
  const std::size_t n = s.terms();
  if (n == 0) return "empty schedule";
  if (s.multiplier.size() != n || s.alpha.size() != n || s.delta.size() != n || s.tau0.size() != n)
    return "schedules have different lengths";
  if (s.Delta[0] != Delta / 2.0) return "Delta_0 != Delta/2";
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    total += s.Delta[j];
    if (!(s.Delta[j] > 0.0)) return "Delta_" + std::to_string(j) + " not positive";
    if (j > 0 && !(s.Delta[j] < std::ldexp(Delta, -static_cast<int>(j + 1))))
      return "Delta_" + std::to_string(j) + " >= 2^-(j+1) Delta";
    for (std::size_t k = 0; k < j; ++k)
      if (s.Delta[j] > std::ldexp(s.delta[k], -static_cast<int>(j - k)) * (1.0 + tol))
        return "Delta_" + std::to_string(j) + " > 2^-(j-k) delta_" + std::to_string(k);
    const double m = s.multiplier[j];
    if (!(m >= 1.0) || std::floor(m) != m) return "alpha_" + std::to_string(j) + " not on the 2pi/b lattice";
    if (!(m >= s.b / (2.0 * s.tau0[j]))) return "alpha_" + std::to_string(j) + " < pi/tau0";
  }
  if (!(total < Delta)) return "sum Delta_j >= Delta";
  for (std::size_t j = 0; j + 1 < n; ++j) {
    double tail = 0.0;
    for (std::size_t k = j + 1; k < n; ++k) tail += s.Delta[k];
    if (tail > s.delta[j] * (1.0 + tol)) return "tail sum after stage " + std::to_string(j) + " > delta_j";
  }
  return std::nullopt;
}

}  // namespace ap
