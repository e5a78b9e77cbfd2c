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

#ifndef AP_TYPES_HPP
#define AP_TYPES_HPP

#include <complex>
#include <span>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace ap {

/// A value in R^dim. Small dimensions stay on the stack.
using Point = boost::container::small_vector<double, 6>;
using CPoint = boost::container::small_vector<std::complex<double>, 6>;

/// Integer coordinates of a frequency against a FrequencyBasis.
using IntVec = std::vector<std::int64_t>;

inline std::span<const double> view(const Point& p) noexcept { return {p.data(), p.size()}; }

/// Bad input: out-of-range parameter, dimension mismatch, malformed expression.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical construction stage could not deliver its contract.
class StageFailure : public std::runtime_error {
 public:
  StageFailure(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

inline void require(bool ok, const char* msg) {
  if (!ok) throw InvalidArgument(msg);
}
inline void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

}  // namespace ap

#endif  // AP_TYPES_HPP
