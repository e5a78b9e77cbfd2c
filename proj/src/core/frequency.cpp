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

#include "ap/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace ap {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw InvalidArgument("frequency module: integer overflow");
  return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw InvalidArgument("frequency module: integer overflow");
  return r;
}

// row -= q * pivot_row
void axpy(IntVec& row, std::int64_t q, const IntVec& pivot_row) {
  if (q == 0) return;
  for (std::size_t i = 0; i < row.size(); ++i)
    row[i] = checked_sub(row[i], checked_mul(q, pivot_row[i]));
}

bool is_zero_vec(const IntVec& v) {
  return std::all_of(v.begin(), v.end(), [](std::int64_t x) { return x == 0; });
}

}  // namespace

FrequencyBasis::FrequencyBasis(std::vector<double> reals, bool independent,
                               std::vector<std::pair<std::size_t, std::size_t>> dependent_pairs,
                               std::int64_t scale_num, std::int64_t scale_den)
    : reals_(std::move(reals)),
      independent_(independent),
      dependent_pairs_(std::move(dependent_pairs)),
      scale_num_(scale_num),
      scale_den_(scale_den) {
  require(!reals_.empty(), "frequency basis: empty");
  for (double r : reals_)
    require(std::isfinite(r) && r > 0.0, "frequency basis: elements must be finite and positive");
  require(scale_num_ > 0 && scale_den_ > 0, "frequency basis: scale must be a positive rational");
  for (auto [i, j] : dependent_pairs_) {
    require(i < reals_.size() && j < reals_.size(), "frequency basis: dependent pair out of range");
    require(!independent_ || i == j,
            "frequency basis: declared independent but a dependent pair is listed");
  }
  scale_ = static_cast<double>(scale_num_) / static_cast<double>(scale_den_);
}

double FrequencyBasis::value(const IntVec& k) const {
  require(k.size() == reals_.size(), "frequency: coordinate count does not match basis");
  double s = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) s += static_cast<double>(k[i]) * reals_[i];
  return scale_ * s;
}

std::optional<IntVec> FrequencyBasis::express(double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) return std::nullopt;
  for (std::size_t i = 0; i < reals_.size(); ++i) {
    const double q = x / element(i);
    const double n = std::round(q);
    if (n >= 1.0 && n < 1e15 && std::abs(q - n) <= 1e-12 * q) {
      IntVec v(reals_.size(), 0);
      v[i] = static_cast<std::int64_t>(n);
      return v;
    }
  }
  return std::nullopt;
}

bool operator==(const FrequencyBasis& a, const FrequencyBasis& b) {
  return a.reals_ == b.reals_ && a.scale_num_ == b.scale_num_ && a.scale_den_ == b.scale_den_;
}

std::vector<IntVec> hermite_normal_form(std::vector<IntVec> rows, std::size_t width) {
  for (const auto& r : rows) require(r.size() == width, "frequency module: generator width mismatch");
  std::size_t pivot = 0;
  for (std::size_t col = 0; col < width && pivot < rows.size(); ++col) {
    // Euclid on column `col` among rows[pivot..].
    while (true) {
      std::size_t best = rows.size();
      for (std::size_t r = pivot; r < rows.size(); ++r) {
        if (rows[r][col] == 0) continue;
        if (best == rows.size() || std::llabs(rows[r][col]) < std::llabs(rows[best][col])) best = r;
      }
      if (best == rows.size()) break;
      std::swap(rows[pivot], rows[best]);
      bool done = true;
      for (std::size_t r = pivot + 1; r < rows.size(); ++r) {
        if (rows[r][col] == 0) continue;
        axpy(rows[r], rows[r][col] / rows[pivot][col], rows[pivot]);
        if (rows[r][col] != 0) done = false;
      }
      if (done) break;
    }
    if (rows[pivot][col] == 0) continue;
    if (rows[pivot][col] < 0)
      for (auto& x : rows[pivot]) x = checked_mul(x, -1);
    // Reduce entries above the pivot into [0, pivot).
    for (std::size_t r = 0; r < pivot; ++r) {
      std::int64_t q = rows[r][col] / rows[pivot][col];
      if (rows[r][col] - q * rows[pivot][col] < 0) --q;
      axpy(rows[r], q, rows[pivot]);
    }
    ++pivot;
  }
  rows.resize(pivot);
  rows.erase(std::remove_if(rows.begin(), rows.end(), is_zero_vec), rows.end());
  return rows;
}

FrequencyModule::FrequencyModule(BasisPtr basis, std::vector<IntVec> generators)
    : basis_(std::move(basis)), generators_(std::move(generators)) {
  require(basis_ != nullptr, "frequency module: null basis");
  generators_.erase(std::remove_if(generators_.begin(), generators_.end(), is_zero_vec),
                    generators_.end());
  hnf_ = hermite_normal_form(generators_, basis_->size());
}

bool FrequencyModule::contains(const IntVec& lambda) const {
  require(lambda.size() == basis_->size(), "module_contains: basis mismatch");
  IntVec rest = lambda;
  for (const auto& row : hnf_) {
    const auto col = static_cast<std::size_t>(
        std::find_if(row.begin(), row.end(), [](std::int64_t x) { return x != 0; }) - row.begin());
    if (rest[col] % row[col] != 0) return false;
    axpy(rest, rest[col] / row[col], row);
  }
  return is_zero_vec(rest);
}

bool FrequencyModule::contains(const FrequencyModule& other) const {
  require(*other.basis_ == *basis_, "module_contains: basis mismatch");
  return std::all_of(other.generators_.begin(), other.generators_.end(),
                     [&](const IntVec& g) { return contains(g); });
}

FrequencyModule FrequencyModule::operator+(const FrequencyModule& other) const {
  require(*other.basis_ == *basis_, "frequency module: sum over different bases");
  auto gens = generators_;
  gens.insert(gens.end(), other.generators_.begin(), other.generators_.end());
  return FrequencyModule(basis_, std::move(gens));
}

}  // namespace ap
