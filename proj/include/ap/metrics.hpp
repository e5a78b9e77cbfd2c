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

// Deterministic estimators for time averages, Besicovitch / Stepanov / sup
// distances, upper densities of sets, Fourier-Bohr coefficients, Hausdorff
// distances between finite sets, and almost-period scans.
//
// A limit b -> infinity is replaced by an AveragingScheme: a list of
// horizons b_k, each integrated by the composite midpoint rule at spacing
// <= step over [-b_k, b_k]. limsup is the max over the last `window`
// horizon averages.

#ifndef AP_METRICS_HPP
#define AP_METRICS_HPP

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ap/expr.hpp"
#include "ap/kernels.hpp"
#include "ap/space.hpp"

namespace ap {

struct AveragingScheme {
  std::vector<double> b_list;
  double step = 1e-3;
  std::size_t window = 3;
  std::string sum_order = "pairwise";

  void validate() const;
  double b_max() const { return b_list.back(); }
  /// b_k = 100 * 2^k up to 6400, then 10^4; window 3.
  static AveragingScheme standard(double step = 1e-3);
};

struct AverageEstimate {
  double value = 0.0;
  std::vector<std::pair<double, double>> per_horizon;  // (b_k, average)
  double spread = 0.0;
};

/// Average of `integrand` over each horizon, combined by the limsup rule.
/// When root_p != 1 every per-horizon average is raised to 1/root_p first.
/// Limsup rule over per-horizon averages: max of the last `window` entries,
/// each raised to 1/root_p first.
AverageEstimate combine_horizons(const AveragingScheme& scheme, std::vector<double> averages,
                                 double root_p = 1.0);

AverageEstimate average_by(const AveragingScheme& scheme, const std::function<double(double)>& integrand,
                           double root_p = 1.0);

/// Same numbers as average_by, blocks walked in order on one thread.
AverageEstimate average_by_serial(const AveragingScheme& scheme,
                                  const std::function<double(double)>& integrand, double root_p = 1.0);

/// k integrands at once: fn(t, out) writes k values. Entry c of the result is
/// what average_by would give for component c.
std::vector<AverageEstimate> average_by_multi(
    const AveragingScheme& scheme, std::size_t k,
    const std::function<void(double, std::span<double>)>& integrands);

AverageEstimate time_average(const FuncExpr& h, const AveragingScheme& scheme);

/// D^(B)_p(f, g); with a capped space this is D^(B) and p must be 1.
AverageEstimate metric_DB_p(const FuncExpr& f, const FuncExpr& g, double p,
                            const MetricSpaceCfg& space, const AveragingScheme& scheme);

/// D^(S)_p(f, g): max over unit windows [xi, xi + 1] inside [-b_max, b_max].
double metric_DS_p(const FuncExpr& f, const FuncExpr& g, double p, const MetricSpaceCfg& space,
                   const AveragingScheme& scheme, double xi_grid);

/// Grid max of rho(f(t), g(t)) on the largest horizon.
double metric_Dinf(const FuncExpr& f, const FuncExpr& g, const MetricSpaceCfg& space,
                   const AveragingScheme& scheme);

enum class DensityMode { complement, direct };

/// complement: kappa~(T), the upper density of R \ T. direct: kappa(T).
AverageEstimate density_upper(const SetExpr& set, const AveragingScheme& scheme, DensityMode mode);

struct FourierEstimate {
  double lambda = 0.0;
  CPoint coef;
  std::optional<double> error_bound;  // 2 |c|_1 / b_max for trig polynomials
};

FourierEstimate fourier_bohr(const FuncExpr& f, double lambda, const AveragingScheme& scheme);
/// Several exponents in one pass over the samples.
std::vector<FourierEstimate> fourier_bohr_many(const FuncExpr& f, const std::vector<double>& lambdas,
                                               const AveragingScheme& scheme);
/// Direct per-sample evaluation; reference for the phasor kernel.
std::vector<FourierEstimate> fourier_bohr_reference(const FuncExpr& f,
                                                    const std::vector<double>& lambdas,
                                                    const AveragingScheme& scheme);

double dist_hausdorff(const std::vector<Point>& a, const std::vector<Point>& b,
                      const MetricSpaceCfg& space);

enum class ShiftMetric { DS_p, DB_p, capped };

/// Distance between f(.) and f(. + tau) in the chosen metric, computed from
/// the increment f(t + tau) - f(t).
double shift_distance(const FuncExpr& f, double tau, ShiftMetric metric, double p,
                      const MetricSpaceCfg& space, const AveragingScheme& scheme);

struct AlmostPeriodScan {
  std::vector<double> tau;        // scanned grid
  std::vector<double> distance;   // per grid tau
  std::vector<double> accepted;   // tau with distance < eps
  /// Largest gap between 0, consecutive accepted tau, and tau_max.
  std::optional<double> witness_gap;
  bool empty() const { return accepted.empty(); }
};

AlmostPeriodScan almost_periods(const FuncExpr& f, double eps, ShiftMetric metric, double p,
                                double tau_max, double tau_step, const MetricSpaceCfg& space,
                                const AveragingScheme& scheme);

}  // namespace ap

#endif  // AP_METRICS_HPP
