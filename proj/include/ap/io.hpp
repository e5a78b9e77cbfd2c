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

// JSON forms of bases, spaces, schemes, expressions and perturbations, and
// the CSV number format.

#ifndef AP_IO_HPP
#define AP_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "ap/expr.hpp"
#include "ap/metrics.hpp"

namespace ap::io {

using nlohmann::json;

/// Raised for any config that does not match the schema.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "1", "pi", "2pi", "e", "sqrt2", "sqrt(3)" or a decimal literal.
double parse_real(const std::string& s);

BasisPtr parse_basis(const json& j);
json basis_to_json(const FrequencyBasis& b);

MetricSpaceCfg parse_space(const json& j);
json space_to_json(const MetricSpaceCfg& s);

AveragingScheme parse_scheme(const json& j);
json scheme_to_json(const AveragingScheme& s);

Point parse_point(const json& j);
json point_to_json(const Point& p);

FuncExpr parse_function(const json& j, const BasisPtr& basis);
json function_to_json(const FuncExpr& f);

PerturbationSeries parse_series(const json& j);
json series_to_json(const PerturbationSeries& s);

json set_to_json(const SetExpr& s);
json estimate_to_json(const AverageEstimate& e);

/// 17 significant digits, '.' decimal point, no locale.
std::string format_double(double x);

/// Rows joined by ',' and terminated by '\n'.
class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void row(double first, const std::vector<double>& rest);
  const std::string& text() const noexcept { return text_; }

 private:
  std::string text_;
};

}  // namespace ap::io

#endif  // AP_IO_HPP
