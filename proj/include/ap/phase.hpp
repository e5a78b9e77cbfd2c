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

#ifndef AP_PHASE_HPP
#define AP_PHASE_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace ap {

namespace detail {

struct Mantissa {
  std::uint64_t m;  // value = m * 2^e, m < 2^53
  int e;
};

inline Mantissa split(double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  const int biased = static_cast<int>((bits >> 52) & 0x7ff);
  const std::uint64_t frac = bits & ((std::uint64_t{1} << 52) - 1);
  if (biased == 0) return {frac, -1074};
  return {frac | (std::uint64_t{1} << 52), biased - 1075};
}

}  // namespace detail

/// Fractional part of m * t / b in [0, 1), with the product m * t and its
/// reduction modulo b carried out exactly; only the final division rounds.
/// m must be a positive integer-valued double, b positive and finite.
inline double lattice_cycles(double m, double t, double b) {
  if (t == 0.0) return 0.0;
  __extension__ typedef unsigned __int128 u128;
  const auto [mm, em] = detail::split(m);
  const auto [tm, et] = detail::split(std::abs(t));
  const auto [ym, ey] = detail::split(b);
  const u128 p = static_cast<u128>(mm) * tm;
  const int e = em + et;
  double c;
  if (e >= ey) {
    std::uint64_t r = static_cast<std::uint64_t>(p % ym);
    for (int d = e - ey; d > 0; d -= 64) {
      const int k = d < 64 ? d : 64;
      r = static_cast<std::uint64_t>((static_cast<u128>(r) << k) % ym);
    }
    c = static_cast<double>(r) / static_cast<double>(ym);
  } else if (ey - e <= 74) {
    const u128 y = static_cast<u128>(ym) << (ey - e);
    c = static_cast<double>(p % y) / static_cast<double>(y);
  } else {
    // p < 2^106 <= y: no reduction happens.
    c = std::ldexp(static_cast<double>(p), e) / b;
  }
  if (t < 0.0 && c > 0.0) c = 1.0 - c;
  if (c >= 1.0) c = 0.0;
  return c;
}

/// Reference for lattice_cycles through the exact double-double product and
/// std::fmod. Slow for large products.
inline double lattice_cycles_fmod(double m, double t, double b) {
  const double hi = m * t;
  const double lo = std::fma(m, t, -hi);
  double r = std::fmod(hi, b) + std::fmod(lo, b);
  r = std::fmod(r, b);
  if (r < 0.0) r += b;
  double c = r / b;
  if (c >= 1.0) c = 0.0;
  return c;
}

inline double lattice_angle(double m, double t, double b) {
  return 2.0 * std::numbers::pi * lattice_cycles(m, t, b);
}

/// Time t + offset kept as an unevaluated pair so that tiny offsets survive
/// next to large t.
struct Time {
  double base = 0.0;
  double offset = 0.0;
};

}  // namespace ap

#endif  // AP_PHASE_HPP
