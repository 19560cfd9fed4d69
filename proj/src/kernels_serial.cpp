/*
 * Copyright (C) 2026 The LapSum Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cmath>

#include "lapsum/kernels.hpp"
#include "lapsum/laplace.hpp"

namespace lapsum::kernels::serial {

namespace {

bool keyed_less(const Keyed &a, const Keyed &b) {
  return a.value < b.value || (a.value == b.value && a.index < b.index);
}

} // namespace

void sort_keyed(std::vector<Keyed> &items) { std::sort(items.begin(), items.end(), keyed_less); }

void affine_scan_forward(std::span<const double> mult, std::span<const double> add,
                         std::span<double> out) {
  const std::size_t n = add.size();
  if (n == 0)
    return;
  out[0] = add[0];
  for (std::size_t j = 1; j < n; ++j)
    out[j] = mult[j] * out[j - 1] + add[j];
}

void affine_scan_backward(std::span<const double> mult, std::span<const double> add,
                          std::span<double> out) {
  const std::size_t n = add.size();
  if (n == 0)
    return;
  out[n - 1] = add[n - 1];
  for (std::size_t j = n - 1; j-- > 0;)
    out[j] = mult[j] * out[j + 1] + add[j];
}

double sum(std::span<const double> xs) {
  double acc = 0.0;
  for (double x : xs)
    acc += x;
  return acc;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += a[i] * b[i];
  return acc;
}

void locate_sorted(std::span<const double> levels, std::span<const double> targets,
                   std::span<std::ptrdiff_t> out) {
  const auto n = static_cast<std::ptrdiff_t>(levels.size());
  std::ptrdiff_t j = -1;
  for (std::size_t m = 0; m < targets.size(); ++m) {
    while (j + 1 < n && levels[j + 1] <= targets[m])
      ++j;
    out[m] = j;
  }
}

void exp_kernel_sums(std::span<const double> centers, std::span<const double> weights,
                     std::span<const double> queries, double scale, std::span<double> out) {
  const std::size_t n = centers.size();
  const std::size_t m_count = queries.size();
  if (m_count == 0)
    return;

  // split[m] = number of centers <= queries[m]
  std::vector<std::size_t> split(m_count);
  std::size_t i = 0;
  for (std::size_t m = 0; m < m_count; ++m) {
    while (i < n && centers[i] <= queries[m])
      ++i;
    split[m] = i;
  }

  // Left halves, swept upwards.
  double left = 0.0;
  std::size_t lo = 0;
  for (std::size_t m = 0; m < m_count; ++m) {
    if (m > 0)
      left *= detail::exp_nonpositive((queries[m - 1] - queries[m]) / scale);
    for (std::size_t t = lo; t < split[m]; ++t)
      left += weights[t] * detail::exp_nonpositive((centers[t] - queries[m]) / scale);
    lo = split[m];
    out[m] = left;
  }

  // Right halves, swept downwards.
  double right = 0.0;
  std::size_t hi = n;
  for (std::size_t m = m_count; m-- > 0;) {
    if (m + 1 < m_count)
      right *= detail::exp_nonpositive((queries[m] - queries[m + 1]) / scale);
    for (std::size_t t = split[m]; t < hi; ++t)
      right += weights[t] * detail::exp_nonpositive((queries[m] - centers[t]) / scale);
    hi = split[m];
    out[m] += right;
  }
}

} // namespace lapsum::kernels::serial
