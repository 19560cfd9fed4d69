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

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lapsum/kernels.hpp"
#include "lapsum/laplace.hpp"

namespace lapsum {

bool openmp_enabled() noexcept {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int count) noexcept {
#ifdef _OPENMP
  if (count > 0)
    omp_set_num_threads(count);
#else
  (void)count;
#endif
}

} // namespace lapsum

namespace lapsum::kernels::parallel {

namespace {

bool keyed_less(const Keyed &a, const Keyed &b) {
  return a.value < b.value || (a.value == b.value && a.index < b.index);
}

std::ptrdiff_t block_count(std::size_t n) {
  return static_cast<std::ptrdiff_t>((n + kBlock - 1) / kBlock);
}

} // namespace

void sort_keyed(std::vector<Keyed> &items) {
  const std::size_t n = items.size();
  const auto chunks = static_cast<std::size_t>(max_threads());
  if (chunks < 2 || n < 2 * kBlock) {
    std::sort(items.begin(), items.end(), keyed_less);
    return;
  }

  std::vector<std::size_t> bounds(chunks + 1);
  for (std::size_t c = 0; c <= chunks; ++c)
    bounds[c] = n * c / chunks;

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c)
    std::sort(items.begin() + bounds[c], items.begin() + bounds[c + 1], keyed_less);

  // Pairwise merge rounds, ping-ponging between two buffers.
  std::vector<Keyed> buffer(n);
  std::vector<Keyed> *src = &items;
  std::vector<Keyed> *dst = &buffer;
  for (std::size_t width = 1; width < chunks; width *= 2) {
    const auto pairs = static_cast<std::ptrdiff_t>((chunks + 2 * width - 1) / (2 * width));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < pairs; ++p) {
      const std::size_t first = static_cast<std::size_t>(p) * 2 * width;
      const std::size_t lo = bounds[first];
      const std::size_t mid = bounds[std::min(first + width, chunks)];
      const std::size_t hi = bounds[std::min(first + 2 * width, chunks)];
      std::merge(src->begin() + lo, src->begin() + mid, src->begin() + mid, src->begin() + hi,
                 dst->begin() + lo, keyed_less);
    }
    std::swap(src, dst);
  }
  if (src != &items)
    items.swap(*src);
}

// Blocked scan: each block is scanned with a zero carry-in while the running
// product of its multipliers is tracked; carries are then chained across
// blocks serially and folded back in.
void affine_scan_forward(std::span<const double> mult, std::span<const double> add,
                         std::span<double> out) {
  const std::size_t n = add.size();
  const std::ptrdiff_t blocks = block_count(n);
  if (blocks <= 1) {
    serial::affine_scan_forward(mult, add, out);
    return;
  }
  std::vector<double> block_mult(blocks);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    double prod = b == 0 ? 0.0 : mult[lo];
    out[lo] = add[lo];
    for (std::size_t j = lo + 1; j < hi; ++j) {
      out[j] = mult[j] * out[j - 1] + add[j];
      prod *= mult[j];
    }
    block_mult[b] = prod;
  }

  std::vector<double> carry(blocks, 0.0);
  for (std::ptrdiff_t b = 1; b < blocks; ++b) {
    const std::size_t last = b * kBlock - 1;
    carry[b] = out[last] + block_mult[b - 1] * carry[b - 1];
  }

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 1; b < blocks; ++b) {
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    double prod = 1.0;
    for (std::size_t j = lo; j < hi; ++j) {
      prod *= mult[j];
      out[j] += prod * carry[b];
    }
  }
}

void affine_scan_backward(std::span<const double> mult, std::span<const double> add,
                          std::span<double> out) {
  const std::size_t n = add.size();
  const std::ptrdiff_t blocks = block_count(n);
  if (blocks <= 1) {
    serial::affine_scan_backward(mult, add, out);
    return;
  }
  std::vector<double> block_mult(blocks);

  // Block b covers [lo, hi); the carry enters at hi - 1 from hi.
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    double prod = b == blocks - 1 ? 0.0 : mult[hi - 1];
    out[hi - 1] = add[hi - 1];
    for (std::size_t j = hi - 1; j-- > lo;) {
      out[j] = mult[j] * out[j + 1] + add[j];
      prod *= mult[j];
    }
    block_mult[b] = prod;
  }

  std::vector<double> carry(blocks, 0.0);
  for (std::ptrdiff_t b = blocks - 1; b-- > 0;) {
    const std::size_t next = (b + 1) * kBlock;
    carry[b] = out[next] + block_mult[b + 1] * carry[b + 1];
  }

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks - 1; ++b) {
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    double prod = 1.0;
    for (std::size_t j = hi; j-- > lo;) {
      prod *= mult[j];
      out[j] += prod * carry[b];
    }
  }
}

double sum(std::span<const double> xs) {
  const std::ptrdiff_t blocks = block_count(xs.size());
  std::vector<double> partial(blocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(xs.size(), lo + kBlock);
    double acc = 0.0;
    for (std::size_t j = lo; j < hi; ++j)
      acc += xs[j];
    partial[b] = acc;
  }
  return serial::sum(partial);
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::ptrdiff_t blocks = block_count(a.size());
  std::vector<double> partial(blocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) {
    const std::size_t lo = blk * kBlock;
    const std::size_t hi = std::min(a.size(), lo + kBlock);
    double acc = 0.0;
    for (std::size_t j = lo; j < hi; ++j)
      acc += a[j] * b[j];
    partial[blk] = acc;
  }
  return serial::sum(partial);
}

void locate_sorted(std::span<const double> levels, std::span<const double> targets,
                   std::span<std::ptrdiff_t> out) {
  const auto m_count = static_cast<std::ptrdiff_t>(targets.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < m_count; ++m) {
    const auto it = std::upper_bound(levels.begin(), levels.end(), targets[m]);
    out[m] = (it - levels.begin()) - 1;
  }
}

void exp_kernel_sums(std::span<const double> centers, std::span<const double> weights,
                     std::span<const double> queries, double scale, std::span<double> out) {
  const std::size_t n = centers.size();
  const std::size_t m_count = queries.size();
  if (m_count == 0)
    return;
  const auto mc = static_cast<std::ptrdiff_t>(m_count);

  std::vector<std::size_t> split(m_count + 1);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < mc; ++m)
    split[m] = std::upper_bound(centers.begin(), centers.end(), queries[m]) - centers.begin();
  split[m_count] = n;

  // Left recurrence: L[m] = e^{(q[m-1]-q[m])/s} L[m-1] + sum over (split[m-1], split[m]].
  // Right recurrence mirrors it with the range [split[m], split[m+1]).
  std::vector<double> mult(m_count), add(m_count), left(m_count);
#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t m = 0; m < mc; ++m) {
    const std::size_t lo = m == 0 ? 0 : split[m - 1];
    double acc = 0.0;
    for (std::size_t t = lo; t < split[m]; ++t)
      acc += weights[t] * detail::exp_nonpositive((centers[t] - queries[m]) / scale);
    add[m] = acc;
    mult[m] = m == 0 ? 0.0 : detail::exp_nonpositive((queries[m - 1] - queries[m]) / scale);
  }
  affine_scan_forward(mult, add, left);

#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t m = 0; m < mc; ++m) {
    double acc = 0.0;
    for (std::size_t t = split[m]; t < split[m + 1]; ++t)
      acc += weights[t] * detail::exp_nonpositive((queries[m] - centers[t]) / scale);
    add[m] = acc;
    mult[m] = m + 1 == mc ? 0.0 : detail::exp_nonpositive((queries[m] - queries[m + 1]) / scale);
  }
  affine_scan_backward(mult, add, out);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < mc; ++m)
    out[m] += left[m];
}

} // namespace lapsum::kernels::parallel
