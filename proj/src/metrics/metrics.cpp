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

#include "ap/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace ap {

namespace {

using kernels::midpoint_grid;
using kernels::MidpointGrid;

void check_dims(const FuncExpr& f, const FuncExpr& g, const MetricSpaceCfg& space) {
  require(f.dim() == g.dim(), "metric: dimension mismatch between f and g");
  require(f.dim() == space.dim, "metric: dimension mismatch with the value space");
}

}  // namespace

AverageEstimate combine_horizons(const AveragingScheme& scheme, std::vector<double> averages, double root_p) {
  AverageEstimate est;
  for (std::size_t k = 0; k < averages.size(); ++k) {
    double a = averages[k];
    if (root_p != 1.0) a = std::pow(std::max(a, 0.0), 1.0 / root_p);
    est.per_horizon.emplace_back(scheme.b_list[k], a);
  }
  const std::size_t first = est.per_horizon.size() - scheme.window;
  double lo = est.per_horizon[first].second, hi = lo;
  for (std::size_t k = first; k < est.per_horizon.size(); ++k) {
    lo = std::min(lo, est.per_horizon[k].second);
    hi = std::max(hi, est.per_horizon[k].second);
  }
  est.value = hi;
  est.spread = hi - lo;
  return est;
}

void AveragingScheme::validate() const {
  require(!b_list.empty(), "scheme: b_list is empty");
  for (std::size_t k = 0; k < b_list.size(); ++k) {
    require(std::isfinite(b_list[k]) && b_list[k] > 0.0, "scheme: horizons must be positive");
    if (k > 0) require(b_list[k] > b_list[k - 1], "scheme: horizons must be strictly increasing");
  }
  require(std::isfinite(step) && step > 0.0, "scheme: step must be positive");
  require(step <= b_list.front() / 100.0 * (1.0 + 1e-12), "scheme: step must be <= b_list[0]/100");
  require(window >= 1 && window <= b_list.size(), "scheme: window must be in [1, len(b_list)]");
  require(sum_order == "pairwise", "scheme: only pairwise summation is supported");
}

AveragingScheme AveragingScheme::standard(double step) {
  return AveragingScheme{{100, 200, 400, 800, 1600, 3200, 6400, 10000}, step, 3, "pairwise"};
}

AverageEstimate average_by(const AveragingScheme& scheme, const std::function<double(double)>& integrand,
                           double root_p) {
  scheme.validate();
  std::vector<double> avg;
  for (double b : scheme.b_list) {
    const MidpointGrid g = midpoint_grid(b, scheme.step);
    avg.push_back(kernels::grid_sum(g, integrand) / static_cast<double>(g.n));
  }
  return combine_horizons(scheme, std::move(avg), root_p);
}

AverageEstimate average_by_serial(const AveragingScheme& scheme,
                                  const std::function<double(double)>& integrand, double root_p) {
  scheme.validate();
  std::vector<double> avg;
  for (double b : scheme.b_list) {
    const MidpointGrid g = midpoint_grid(b, scheme.step);
    avg.push_back(kernels::grid_sum_serial(g, integrand) / static_cast<double>(g.n));
  }
  return combine_horizons(scheme, std::move(avg), root_p);
}

std::vector<AverageEstimate> average_by_multi(
    const AveragingScheme& scheme, std::size_t k,
    const std::function<void(double, std::span<double>)>& integrands) {
  scheme.validate();
  std::vector<std::vector<double>> avg(k);
  for (double b : scheme.b_list) {
    const MidpointGrid g = midpoint_grid(b, scheme.step);
    const auto sums = kernels::grid_sum_multi(g, k, integrands);
    for (std::size_t c = 0; c < k; ++c) avg[c].push_back(sums[c] / static_cast<double>(g.n));
  }
  std::vector<AverageEstimate> out;
  for (auto& a : avg) out.push_back(combine_horizons(scheme, std::move(a), 1.0));
  return out;
}

AverageEstimate time_average(const FuncExpr& h, const AveragingScheme& scheme) {
  require(h.dim() == 1, "time_average: integrand must be scalar");
  return average_by(scheme, [&](double t) { return h.eval_at(Time{t, 0.0})[0]; });
}

AverageEstimate metric_DB_p(const FuncExpr& f, const FuncExpr& g, double p,
                            const MetricSpaceCfg& space, const AveragingScheme& scheme) {
  require(p >= 1.0 && std::isfinite(p), "metric_DB_p: p must be >= 1");
  check_dims(f, g, space);
  if (space.metric == MetricKind::capped) require(p == 1.0, "metric_DB_p: capped metric needs p = 1");
  return average_by(
      scheme,
      [&](double t) {
        const double r = space.distance(f.eval_at(Time{t, 0.0}), g.eval_at(Time{t, 0.0}));
        return p == 1.0 ? r : p == 2.0 ? r * r : (p == 2.0 ? r * r : std::pow(r, p));
      },
      p);
}

namespace {

// Cells of width 1/m on [-b_max, b_max]; unit windows are m consecutive cells.
double stepanov_from_cells(const AveragingScheme& scheme, double xi_grid, double p,
                           const std::function<double(double)>& rho) {
  scheme.validate();
  require(xi_grid > 0.0, "metric_DS_p: xi_grid must be positive");
  const double spacing_max = std::min(scheme.step, xi_grid);
  const auto m = static_cast<std::size_t>(std::ceil((1.0 / spacing_max) * (1.0 - 1e-12)));
  const double h = 1.0 / static_cast<double>(m);
  const double b = scheme.b_max();
  const auto n_cells = static_cast<std::size_t>(std::floor(2.0 * b * static_cast<double>(m) * (1.0 + 1e-12)));
  require(n_cells >= m, "metric_DS_p: horizon shorter than one window");
  auto [best, k] = kernels::window_sum_max(n_cells, m, [&](std::size_t i) {
    const double r = rho(-b + (static_cast<double>(i) + 0.5) * h);
    return p == 1.0 ? r : (p == 2.0 ? r * r : std::pow(r, p));
  });
  (void)k;
  return std::pow(std::max(best * h, 0.0), 1.0 / p);
}

}  // namespace

double metric_DS_p(const FuncExpr& f, const FuncExpr& g, double p, const MetricSpaceCfg& space,
                   const AveragingScheme& scheme, double xi_grid) {
  require(p >= 1.0 && std::isfinite(p), "metric_DS_p: p must be >= 1");
  check_dims(f, g, space);
  return stepanov_from_cells(scheme, xi_grid, p, [&](double t) {
    return space.distance(f.eval_at(Time{t, 0.0}), g.eval_at(Time{t, 0.0}));
  });
}

double metric_Dinf(const FuncExpr& f, const FuncExpr& g, const MetricSpaceCfg& space,
                   const AveragingScheme& scheme) {
  check_dims(f, g, space);
  scheme.validate();
  const MidpointGrid grid = midpoint_grid(scheme.b_max(), scheme.step);
  return kernels::grid_max(grid, [&](double t) {
           return space.distance(f.eval_at(Time{t, 0.0}), g.eval_at(Time{t, 0.0}));
         }).first;
}

AverageEstimate density_upper(const SetExpr& set, const AveragingScheme& scheme, DensityMode mode) {
  const bool want = mode == DensityMode::direct;
  return average_by(scheme, [&](double t) { return set.contains(t) == want ? 1.0 : 0.0; });
}

namespace {

double coefficient_l1(const FuncExpr& f) {
  const auto* p = std::get_if<node::TrigPoly>(&f.node().v);
  if (!p) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (const auto& term : p->terms) {
    double n = 0.0;
    for (const auto& c : term.coef) n += std::norm(c);
    s += std::sqrt(n);
  }
  return s;
}

std::vector<FourierEstimate> finish_fourier(const FuncExpr& f, const std::vector<double>& lambdas,
                                            const std::vector<double>& sums, std::size_t n,
                                            double b_max) {
  const std::size_t dim = f.dim();
  const double l1 = coefficient_l1(f);
  std::vector<FourierEstimate> out;
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    FourierEstimate e;
    e.lambda = lambdas[l];
    e.coef.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      const std::size_t base = 2 * (l * dim + d);
      e.coef[d] = {sums[base] / static_cast<double>(n), sums[base + 1] / static_cast<double>(n)};
    }
    if (!std::isnan(l1)) e.error_bound = 2.0 * l1 / b_max;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

namespace {

// e^{i lambda h k} for k < kBlock.
struct PhaseTable {
  std::vector<double> re, im;
  PhaseTable(double lambda, double h) : re(kernels::kBlock), im(kernels::kBlock) {
    for (std::size_t k = 0; k < kernels::kBlock; ++k) {
      const double a = lambda * h * static_cast<double>(k);
      re[k] = std::cos(a);
      im[k] = std::sin(a);
    }
  }
};

inline std::complex<double> cmul(std::complex<double> a, std::complex<double> b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace

std::vector<FourierEstimate> fourier_bohr_many(const FuncExpr& f, const std::vector<double>& lambdas,
                                               const AveragingScheme& scheme) {
  scheme.validate();
  for (double l : lambdas) require(std::isfinite(l), "fourier_bohr: non-finite lambda");
  const MidpointGrid g = midpoint_grid(scheme.b_max(), scheme.step);
  const std::size_t dim = f.dim();
  const std::size_t L = lambdas.size();
  const std::size_t k = 2 * L * dim;
  const std::size_t nb = g.blocks();
  const auto* poly = std::get_if<node::TrigPoly>(&f.node().v);
  const std::vector<node::TrigTerm>* terms = nullptr;
  if (poly) terms = poly->complex_valued ? &poly->terms : &poly->half;

  // Sample k of a block sits at t0 + k h, so each phasor is a per-block
  // exact factor times a fixed table entry.
  std::vector<PhaseTable> probe, term;
  for (double l : lambdas) probe.emplace_back(-l, g.spacing);
  if (terms)
    for (const auto& t : *terms) term.emplace_back(t.lambda, g.spacing);

  std::vector<double> block_sums(k * nb, 0.0);
  kernels::detail::ErrorSlot errors(nb);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t bb = 0; bb < static_cast<std::ptrdiff_t>(nb); ++bb) {
    const auto b = static_cast<std::size_t>(bb);
    try {
      const std::size_t i0 = b * kernels::kBlock;
      const std::size_t len = std::min(kernels::kBlock, g.n - i0);
      const double t0 = g.at(i0);
      std::vector<double> re(dim * len, 0.0), im(dim * len, 0.0);
      if (terms) {
        for (std::size_t d = 0; d < dim; ++d)
          std::fill_n(re.begin() + static_cast<std::ptrdiff_t>(d * len), len,
                      poly->complex_valued ? 0.0 : poly->constant[d]);
        for (std::size_t j = 0; j < terms->size(); ++j) {
          const auto& tj = (*terms)[j];
          const std::complex<double> e = std::polar(1.0, tj.lambda * t0);
          for (std::size_t d = 0; d < dim; ++d) {
            const std::complex<double> a = cmul(tj.coef[d], e);
            double* r = re.data() + d * len;
            const double* tr = term[j].re.data();
            const double* ti = term[j].im.data();
            for (std::size_t i = 0; i < len; ++i) r[i] += a.real() * tr[i] - a.imag() * ti[i];
            if (poly->complex_valued) {
              double* m = im.data() + d * len;
              for (std::size_t i = 0; i < len; ++i) m[i] += a.real() * ti[i] + a.imag() * tr[i];
            }
          }
        }
      } else {
        for (std::size_t i = 0; i < len; ++i) {
          const CPoint v = f.eval_complex(g.at(i0 + i));
          for (std::size_t d = 0; d < dim; ++d) {
            re[d * len + i] = v[d].real();
            im[d * len + i] = v[d].imag();
          }
        }
      }
      std::vector<double> pr(len), pi(len);
      for (std::size_t l = 0; l < L; ++l) {
        const std::complex<double> q = std::polar(1.0, -lambdas[l] * t0);
        const double* er = probe[l].re.data();
        const double* ei = probe[l].im.data();
        for (std::size_t d = 0; d < dim; ++d) {
          const double* r = re.data() + d * len;
          const double* m = im.data() + d * len;
          for (std::size_t i = 0; i < len; ++i) {
            pr[i] = r[i] * er[i] - m[i] * ei[i];
            pi[i] = r[i] * ei[i] + m[i] * er[i];
          }
          const std::complex<double> s = cmul(
              q, {kernels::pairwise_sum(std::span<const double>(pr.data(), len)),
                  kernels::pairwise_sum(std::span<const double>(pi.data(), len))});
          const std::size_t base = 2 * (l * dim + d);
          block_sums[base * nb + b] = s.real();
          block_sums[(base + 1) * nb + b] = s.imag();
        }
      }
    } catch (...) {
      errors.set(b, std::current_exception());
    }
  }
  errors.rethrow_first();
  std::vector<double> sums(k);
  for (std::size_t c = 0; c < k; ++c)
    sums[c] = kernels::pairwise_sum(std::span<const double>(block_sums.data() + c * nb, nb));
  return finish_fourier(f, lambdas, sums, g.n, scheme.b_max());
}

std::vector<FourierEstimate> fourier_bohr_reference(const FuncExpr& f,
                                                    const std::vector<double>& lambdas,
                                                    const AveragingScheme& scheme) {
  scheme.validate();
  const MidpointGrid g = midpoint_grid(scheme.b_max(), scheme.step);
  const std::size_t dim = f.dim();
  const std::size_t k = 2 * lambdas.size() * dim;
  auto sums = kernels::grid_sum_multi(g, k, [&](double t, std::span<double> out) {
    const CPoint v = f.eval_complex(t);
    for (std::size_t l = 0; l < lambdas.size(); ++l)
      for (std::size_t d = 0; d < dim; ++d) {
        const std::complex<double> prod = std::polar(1.0, -lambdas[l] * t) * v[d];
        out[2 * (l * dim + d)] = prod.real();
        out[2 * (l * dim + d) + 1] = prod.imag();
      }
  });
  return finish_fourier(f, lambdas, sums, g.n, scheme.b_max());
}

FourierEstimate fourier_bohr(const FuncExpr& f, double lambda, const AveragingScheme& scheme) {
  return fourier_bohr_many(f, {lambda}, scheme).front();
}

double dist_hausdorff(const std::vector<Point>& a, const std::vector<Point>& b,
                      const MetricSpaceCfg& space) {
  require(!a.empty() && !b.empty(), "dist_hausdorff: empty point set");
  auto one_sided = [&](const std::vector<Point>& x, const std::vector<Point>& y) {
    double worst = 0.0;
    for (const auto& p : x) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : y) best = std::min(best, space.distance(p, q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

double shift_distance(const FuncExpr& f, double tau, ShiftMetric metric, double p,
                      const MetricSpaceCfg& space, const AveragingScheme& scheme) {
  require(f.dim() == space.dim, "shift_distance: dimension mismatch with the value space");
  auto rho = [&](double t) { return space.norm_of_difference(f.increment(Time{t, 0.0}, tau)); };
  switch (metric) {
    case ShiftMetric::capped:
      return average_by(scheme, [&](double t) { return std::min(1.0, rho(t)); }).value;
    case ShiftMetric::DB_p:
      require(p >= 1.0, "shift_distance: p must be >= 1");
      return average_by(
                 scheme,
                 [&](double t) {
                   const double r = rho(t);
                   return p == 1.0 ? r : (p == 2.0 ? r * r : std::pow(r, p));
                 },
                 p)
          .value;
    case ShiftMetric::DS_p:
      require(p >= 1.0, "shift_distance: p must be >= 1");
      return stepanov_from_cells(scheme, scheme.step, p, rho);
  }
  return 0.0;
}

AlmostPeriodScan almost_periods(const FuncExpr& f, double eps, ShiftMetric metric, double p,
                                double tau_max, double tau_step, const MetricSpaceCfg& space,
                                const AveragingScheme& scheme) {
  require(eps > 0.0, "almost_periods: eps must be positive");
  require(tau_step > 0.0 && tau_max > tau_step, "almost_periods: need tau_max > tau_step > 0");
  AlmostPeriodScan scan;
  const auto count = static_cast<std::size_t>(std::floor(tau_max / tau_step * (1.0 + 1e-12)));
  for (std::size_t k = 1; k <= count; ++k) {
    const double tau = static_cast<double>(k) * tau_step;
    const double d = shift_distance(f, tau, metric, p, space, scheme);
    scan.tau.push_back(tau);
    scan.distance.push_back(d);
    if (d < eps) scan.accepted.push_back(tau);
  }
  if (!scan.accepted.empty()) {
    double gap = scan.accepted.front();
    for (std::size_t i = 1; i < scan.accepted.size(); ++i)
      gap = std::max(gap, scan.accepted[i] - scan.accepted[i - 1]);
    gap = std::max(gap, tau_max - scan.accepted.back());
    scan.witness_gap = gap;
  }
  return scan;
}

}  // namespace ap
