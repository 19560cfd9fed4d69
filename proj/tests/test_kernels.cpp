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

#include <gtest/gtest.h>

#include "lapsum/kernels.hpp"
#include "test_support.hpp"

namespace lapsum::kernels {
namespace {

using lapsum::testing::Gen;
using lapsum::testing::rel_error;

// Sizes that hit the single-block fallback, exact multiples and ragged tails.
const std::size_t kSizes[] = {1, 2, 17, kBlock - 1, kBlock, 3 * kBlock, 5 * kBlock + 123};

TEST(Kernels, SortFlavoursAgreeExactly) {
  Gen gen(1);
  // More threads than cores is fine; it exercises the merge rounds.
  const int saved = max_threads();
  set_threads(5);
  for (std::size_t n : kSizes) {
    auto values = gen.normal(n);
    // Force ties so the index tiebreak matters.
    for (std::size_t i = 0; i + 3 < n; i += 7)
      values[i + 3] = values[i];
    std::vector<Keyed> a(n);
    for (std::size_t i = 0; i < n; ++i)
      a[i] = {values[i], i};
    auto b = a;
    serial::sort_keyed(a);
    parallel::sort_keyed(b);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_EQ(a[i].index, b[i].index);
      ASSERT_EQ(a[i].value, b[i].value);
      if (i > 0) {
        ASSERT_LE(a[i - 1].value, a[i].value);
      }
    }
  }
  set_threads(saved);
}

TEST(Kernels, ScansMatchSerialReference) {
  Gen gen(2);
  for (std::size_t n : kSizes) {
    std::vector<double> mult(n), add(n);
    for (std::size_t i = 0; i < n; ++i) {
      mult[i] = gen.uniform(0.0, 1.0);
      add[i] = gen.uniform(0.5, 2.0);
    }
    std::vector<double> fs(n), fp(n), bs(n), bp(n);
    serial::affine_scan_forward(mult, add, fs);
    parallel::affine_scan_forward(mult, add, fp);
    serial::affine_scan_backward(mult, add, bs);
    parallel::affine_scan_backward(mult, add, bp);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_LE(rel_error(fp[i], fs[i]), 1e-13) << "n=" << n << " i=" << i;
      ASSERT_LE(rel_error(bp[i], bs[i]), 1e-13) << "n=" << n << " i=" << i;
    }
  }
}

TEST(Kernels, ScanIgnoresLeadingMultiplier) {
  const std::vector<double> mult = {99.0, 0.5, 0.5};
  const std::vector<double> add = {1.0, 1.0, 1.0};
  std::vector<double> out(3);
  serial::affine_scan_forward(mult, add, out);
  EXPECT_DOUBLE_EQ(out[0], 1.0);
  EXPECT_DOUBLE_EQ(out[1], 1.5);
  EXPECT_DOUBLE_EQ(out[2], 1.75);
  serial::affine_scan_backward(std::vector<double>{0.5, 0.5, 99.0}, add, out);
  EXPECT_DOUBLE_EQ(out[2], 1.0);
  EXPECT_DOUBLE_EQ(out[0], 1.75);
}

TEST(Kernels, ReductionsAgreeAndAreDeterministic) {
  Gen gen(3);
  for (std::size_t n : kSizes) {
    const auto a = gen.normal(n);
    const auto b = gen.normal(n);
    EXPECT_NEAR(parallel::sum(a), serial::sum(a), 1e-12 * n);
    EXPECT_NEAR(parallel::dot(a, b), serial::dot(a, b), 1e-12 * n);
    const double first = parallel::dot(a, b);
    const int saved = max_threads();
    for (int threads : {1, 2, 3}) {
      set_threads(threads);
      EXPECT_EQ(parallel::dot(a, b), first);
    }
    set_threads(saved);
  }
}

TEST(Kernels, LocateSortedFlavoursAgree) {
  Gen gen(4);
  auto levels = gen.normal(1000);
  std::sort(levels.begin(), levels.end());
  levels[10] = levels[11] = levels[12];
  auto targets = gen.normal(700, 2.0);
  targets.push_back(levels[11]);
  std::sort(targets.begin(), targets.end());
  std::vector<std::ptrdiff_t> s(targets.size()), p(targets.size());
  serial::locate_sorted(levels, targets, s);
  parallel::locate_sorted(levels, targets, p);
  EXPECT_EQ(s, p);
  for (std::size_t m = 0; m < targets.size(); ++m) {
    if (s[m] >= 0) {
      EXPECT_LE(levels[s[m]], targets[m]);
    }
    if (s[m] + 1 < static_cast<std::ptrdiff_t>(levels.size())) {
      EXPECT_GT(levels[s[m] + 1], targets[m]);
    }
  }
}

TEST(Kernels, ExpKernelSumsMatchBruteForce) {
  Gen gen(5);
  for (std::size_t n : {std::size_t{1}, std::size_t{50}, 3 * kBlock + 7}) {
    for (std::size_t m : {std::size_t{1}, std::size_t{40}, 2 * kBlock + 3}) {
      auto centers = gen.normal(n);
      auto queries = gen.normal(m, 1.5);
      std::sort(centers.begin(), centers.end());
      std::sort(queries.begin(), queries.end());
      const auto weights = gen.normal(n);
      const double scale = gen.pick(std::vector<double>{0.05, 1.0, 10.0});

      std::vector<double> s(m), p(m);
      serial::exp_kernel_sums(centers, weights, queries, scale, s);
      parallel::exp_kernel_sums(centers, weights, queries, scale, p);

      // Spot-check against the O(nm) double loop; the weighted sum can
      // cancel, so compare against the sum of magnitudes.
      for (std::size_t q = 0; q < m; q += std::max<std::size_t>(1, m / 37)) {
        double direct = 0.0, magnitude = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double term = weights[i] * std::exp(-std::abs(queries[q] - centers[i]) / scale);
          direct += term;
          magnitude += std::abs(term);
        }
        ASSERT_NEAR(s[q], direct, 1e-12 * std::max(1.0, magnitude));
        ASSERT_NEAR(p[q], direct, 1e-12 * std::max(1.0, magnitude));
      }
    }
  }
}

} // namespace
} // namespace lapsum::kernels
