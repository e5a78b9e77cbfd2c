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

// Sampling kernels over midpoint grids.
//
// Every reduction has a canonical order that does not depend on the thread
// count: the grid is cut into fixed blocks of kBlock samples, each block is
// summed pairwise, and the block sums are summed pairwise. The OpenMP
// versions compute blocks concurrently and the *_serial versions walk them
// in order; both produce bit-identical results.

#ifndef AP_KERNELS_HPP
#define AP_KERNELS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace ap::kernels {

inline constexpr std::size_t kBlock = 1024;
inline constexpr std::size_t kWindowChunk = 1 << 16;

/// Midpoints of n equal cells covering [lo, lo + n * spacing].
struct MidpointGrid {
  double lo = 0.0;
  double spacing = 0.0;
  std::size_t n = 0;

  double at(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * spacing; }
  std::size_t blocks() const { return (n + kBlock - 1) / kBlock; }
};

/// Grid over [-b, b] with spacing <= step. The cell count is rounded so that
/// b/step integral up to float noise gives spacing == step exactly.
inline MidpointGrid midpoint_grid(double b, double step) {
  const double cells = 2.0 * b / step;
  auto n = static_cast<std::size_t>(std::ceil(cells * (1.0 - 1e-12)));
  if (n == 0) n = 1;
  return MidpointGrid{-b, 2.0 * b / static_cast<double>(n), n};
}

/// Pairwise summation: runs of up to 128 terms use eight interleaved
/// partial sums, longer runs split in halves (at a multiple of 8).
inline double pairwise_sum(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  if (n <= 128) {
    double r[8];
    for (std::size_t j = 0; j < 8; ++j) r[j] = x[j];
    std::size_t i = 8;
    for (; i + 8 <= n; i += 8)
      for (std::size_t j = 0; j < 8; ++j) r[j] += x[i + j];
    double s = ((r[0] + r[1]) + (r[2] + r[3])) + ((r[4] + r[5]) + (r[6] + r[7]));
    for (; i < n; ++i) s += x[i];
    return s;
  }
  std::size_t half = n / 2;
  half -= half % 8;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

namespace detail {

class ErrorSlot {
 public:
  explicit ErrorSlot(std::size_t n) : errors_(n) {}
  void set(std::size_t i, std::exception_ptr e) { errors_[i] = std::move(e); }
  void rethrow_first() const {
    for (const auto& e : errors_)
      if (e) std::rethrow_exception(e);
  }

 private:
  std::vector<std::exception_ptr> errors_;
};

template <class Fn>
double block_sum(const MidpointGrid& g, std::size_t block, Fn& fn) {
  double buf[kBlock];
  const std::size_t i0 = block * kBlock;
  const std::size_t len = std::min(kBlock, g.n - i0);
  for (std::size_t i = 0; i < len; ++i) buf[i] = fn(g.at(i0 + i));
  return pairwise_sum(std::span<const double>(buf, len));
}

}  // namespace detail

/// Sum of fn(t_i) over the grid in canonical order. fn must be thread-safe.
template <class Fn>
double grid_sum(const MidpointGrid& g, Fn&& fn) {
  const std::size_t nb = g.blocks();
  std::vector<double> sums(nb, 0.0);
  detail::ErrorSlot errors(nb);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
    try {
      sums[b] = detail::block_sum(g, static_cast<std::size_t>(b), fn);
    } catch (...) {
      errors.set(static_cast<std::size_t>(b), std::current_exception());
    }
  }
  errors.rethrow_first();
  return pairwise_sum(sums);
}

template <class Fn>
double grid_sum_serial(const MidpointGrid& g, Fn&& fn) {
  std::vector<double> sums(g.blocks(), 0.0);
  for (std::size_t b = 0; b < sums.size(); ++b) sums[b] = detail::block_sum(g, b, fn);
  return pairwise_sum(sums);
}

/// k simultaneous sums; fn(t, out) writes k values. Each component follows
/// the same canonical order as grid_sum.
template <class Fn>
std::vector<double> grid_sum_multi(const MidpointGrid& g, std::size_t k, Fn&& fn) {
  const std::size_t nb = g.blocks();
  std::vector<double> sums(nb * k, 0.0);
  detail::ErrorSlot errors(nb);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t bb = 0; bb < static_cast<std::ptrdiff_t>(nb); ++bb) {
    const auto b = static_cast<std::size_t>(bb);
    try {
      const std::size_t i0 = b * kBlock;
      const std::size_t len = std::min(kBlock, g.n - i0);
      std::vector<double> buf(len * k);  // component-major
      std::vector<double> vals(k);
      for (std::size_t i = 0; i < len; ++i) {
        fn(g.at(i0 + i), std::span<double>(vals));
        for (std::size_t c = 0; c < k; ++c) buf[c * len + i] = vals[c];
      }
      for (std::size_t c = 0; c < k; ++c)
        sums[c * nb + b] = pairwise_sum(std::span<const double>(buf.data() + c * len, len));
    } catch (...) {
      errors.set(b, std::current_exception());
    }
  }
  errors.rethrow_first();
  std::vector<double> out(k);
  for (std::size_t c = 0; c < k; ++c)
    out[c] = pairwise_sum(std::span<const double>(sums.data() + c * nb, nb));
  return out;
}

/// Largest fn(t_i) and its first index.
template <class Fn>
std::pair<double, std::size_t> grid_max(const MidpointGrid& g, Fn&& fn) {
  const std::size_t nb = g.blocks();
  std::vector<std::pair<double, std::size_t>> best(nb, {-std::numeric_limits<double>::infinity(), 0});
  detail::ErrorSlot errors(nb);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t bb = 0; bb < static_cast<std::ptrdiff_t>(nb); ++bb) {
    const auto b = static_cast<std::size_t>(bb);
    try {
      const std::size_t i0 = b * kBlock;
      const std::size_t i1 = std::min(g.n, i0 + kBlock);
      for (std::size_t i = i0; i < i1; ++i) {
        const double v = fn(g.at(i));
        if (v > best[b].first) best[b] = {v, i};
      }
    } catch (...) {
      errors.set(b, std::current_exception());
    }
  }
  errors.rethrow_first();
  std::pair<double, std::size_t> r = best.front();
  for (const auto& x : best)
    if (x.first > r.first) r = x;
  return r;
}

/// Error-free transformation a + b = s + e.
inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  const double bb = s - a;
  e = (a - (s - bb)) + (b - bb);
}

struct DoubleDouble {
  double hi = 0.0, lo = 0.0;
  void add(double x) {
    double s, e;
    two_sum(hi, x, s, e);
    e += lo;
    two_sum(s, e, hi, lo);
  }
  double value() const { return hi + lo; }
};

/// Max over k of the sum of cells k..k+m-1, for k = 0..n_cells-m, with the
/// first maximizing k. Cell values come from cell(i). Windows are processed
/// in fixed chunks; inside a chunk the window sum slides in double-double.
template <class Fn>
std::pair<double, std::size_t> window_sum_max(std::size_t n_cells, std::size_t m, Fn&& cell) {
  if (n_cells < m || m == 0) return {0.0, 0};
  const std::size_t n_windows = n_cells - m + 1;
  const std::size_t nc = (n_windows + kWindowChunk - 1) / kWindowChunk;
  std::vector<std::pair<double, std::size_t>> best(nc, {-std::numeric_limits<double>::infinity(), 0});
  detail::ErrorSlot errors(nc);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t cc = 0; cc < static_cast<std::ptrdiff_t>(nc); ++cc) {
    const auto c = static_cast<std::size_t>(cc);
    try {
      const std::size_t k0 = c * kWindowChunk;
      const std::size_t k1 = std::min(n_windows, k0 + kWindowChunk);
      std::vector<double> v(k1 - k0 + m - 1);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = cell(k0 + i);
      DoubleDouble s;
      s.add(pairwise_sum(std::span<const double>(v.data(), m)));
      best[c] = {s.value(), k0};
      for (std::size_t k = k0 + 1; k < k1; ++k) {
        s.add(v[k - k0 + m - 1]);
        s.add(-v[k - k0 - 1]);
        const double w = s.value();
        if (w > best[c].first) best[c] = {w, k};
      }
    } catch (...) {
      errors.set(c, std::current_exception());
    }
  }
  errors.rethrow_first();
  std::pair<double, std::size_t> r = best.front();
  for (const auto& x : best)
    if (x.first > r.first) r = x;
  return r;
}

/// Reference for window_sum_max: every window summed from scratch.
template <class Fn>
std::pair<double, std::size_t> window_sum_max_serial(std::size_t n_cells, std::size_t m, Fn&& cell) {
  if (n_cells < m || m == 0) return {0.0, 0};
  std::vector<double> v(n_cells);
  for (std::size_t i = 0; i < n_cells; ++i) v[i] = cell(i);
  std::pair<double, std::size_t> r{-std::numeric_limits<double>::infinity(), 0};
  for (std::size_t k = 0; k + m <= n_cells; ++k) {
    const double w = pairwise_sum(std::span<const double>(v.data() + k, m));
    if (w > r.first) r = {w, k};
  }
  return r;
}

}  // namespace ap::kernels

#endif  // AP_KERNELS_HPP
