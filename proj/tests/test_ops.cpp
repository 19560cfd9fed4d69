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
#include <numeric>

#include <gtest/gtest.h>

#include "lapsum/ops.hpp"
#include "lapsum/oracle.hpp"
#include "test_support.hpp"

namespace lapsum {
namespace {

using testing::Gen;
using testing::max_abs_diff;
using testing::rel_error;

double compensated_sum(std::span<const double> xs) {
  double s = 0.0, c = 0.0;
  for (double x : xs) {
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  return s + c;
}

std::vector<double> permuted(std::span<const double> r, std::span<const std::size_t> pi) {
  std::vector<double> out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    out[i] = r[pi[i]];
  return out;
}

TEST(SoftTopK, UniformScores) {
  const std::vector<double> r(4, 1.75);
  for (double alpha : {0.01, 1.0, -3.0}) {
    const auto sel = soft_topk(r, 2.0, alpha);
    for (double p : sel.p)
      EXPECT_DOUBLE_EQ(p, 0.5);
  }
}

TEST(SoftTopK, NegativeScaleSelectsLargest) {
  const std::vector<double> r = {0.0, 10.0, 20.0};
  const auto sel = soft_topk(r, 1.0, -0.001);
  EXPECT_LE(max_abs_diff(sel.p, std::vector<double>{0.0, 0.0, 1.0}), 1e-6);
}

TEST(SoftTopK, MatchesBisectionOracle) {
  const std::vector<double> r = {0.0, 1.0, 2.0};
  const auto sel = soft_topk(r, 1.5, 1.0);
  // Frozen from 50-digit bisection plus direct evaluation.
  const std::vector<double> frozen = {0.8160602794142788392, 0.5, 0.1839397205857211608};
  EXPECT_NEAR(sel.threshold, 1.0, 1e-14);
  EXPECT_LE(max_abs_diff(sel.p, frozen), 1e-15);
  EXPECT_LE(max_abs_diff(sel.p, oracle::topk_direct(r, 1.5, 1.0)), 1e-10);
}

TEST(SoftTopK, BackwardState) {
  Gen gen(31);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = gen.index(1, 800);
    const double alpha = gen.alpha();
    const auto r = gen.normal(n);
    const double k = gen.uniform(0.01, n - 0.01);
    const auto sel = soft_topk(r, k, alpha);
    const double a = std::abs(alpha);
    double qsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_GE(sel.p[i], 0.0);
      ASSERT_LE(sel.p[i], 1.0);
      ASSERT_NEAR(sel.density[i], std::min(sel.p[i], 1.0 - sel.p[i]) / a, 1e-12 / a);
      ASSERT_GT(sel.softmax[i], 0.0);
      qsum += sel.softmax[i];
    }
    EXPECT_NEAR(qsum, 1.0, 1e-12);
    EXPECT_NEAR(sel.density_sum, testing::sum(sel.density), 1e-12 * sel.density_sum);
  }
}

TEST(SoftTopK, MassConservation) {
  Gen gen(32);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = gen.pick(std::vector<std::size_t>{2, 10, 1000, 20000});
    const double alpha = gen.pick(std::vector<double>{1e-3, 0.1, 1.0, 10.0, 1e3}) *
                         (gen.uniform(0, 1) < 0.5 ? -1.0 : 1.0);
    const auto r = gen.normal(n, gen.uniform(0.1, 10.0));
    const double k = gen.uniform(0.0, static_cast<double>(n));
    if (k <= 0.0)
      continue;
    for (Exec e : {Exec::serial, Exec::parallel}) {
      const auto sel = soft_topk(r, k, alpha, e);
      ASSERT_LE(std::abs(compensated_sum(sel.p) - k), 1e-9 * n) << n << " " << alpha;
    }
  }
}

TEST(SoftTopK, SignSymmetryIsExact) {
  Gen gen(33);
  const auto r = gen.normal(500);
  std::vector<double> neg(r);
  for (double &x : neg)
    x = -x;
  const auto a = soft_topk(r, 123.4, -0.7);
  const auto b = soft_topk(neg, 123.4, 0.7);
  EXPECT_EQ(a.p, b.p);
}

TEST(SoftTopK, TranslationInvariance) {
  Gen gen(34);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = gen.index(1, 500);
    const double alpha = gen.alpha();
    auto r = gen.normal(n);
    const double k = gen.uniform(0.01, n - 0.01);
    const auto p = soft_topk(r, k, alpha).p;
    const double t = gen.uniform(-10.0, 10.0);
    for (double &x : r)
      x += t;
    EXPECT_LE(max_abs_diff(soft_topk(r, k, alpha).p, p), 1e-10);
  }
}

TEST(SoftTopK, Errors) {
  const std::vector<double> r = {0.0, 1.0};
  EXPECT_THROW(soft_topk(r, 0.0, 1.0), Error);
  EXPECT_THROW(soft_topk(r, 2.0, 1.0), Error);
  EXPECT_THROW(soft_topk(r, 1.0, 0.0), Error);
  EXPECT_THROW(soft_topk(std::vector<double>{NAN, 1.0}, 1.0, 1.0), Error);
  const auto prep = prepare(r, ScaleParam(1.0));
  try {
    soft_topk(prep, std::vector<double>{0.0}, 1.0);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), Errc::dimension_mismatch);
  }
}

TEST(SoftRank, ClosedFormPoints) {
  EXPECT_EQ(soft_rank(std::vector<double>{0.0}, 0.5).ranks, std::vector<double>{0.0});
  const auto two = soft_rank(std::vector<double>{0.0, std::log(2.0)}, 1.0).ranks;
  EXPECT_NEAR(two[0], 0.25, 1e-15);
  EXPECT_NEAR(two[1], 0.75, 1e-15);
  const auto hard = soft_rank(std::vector<double>{3.0, 1.0, 2.0}, 0.001).ranks;
  EXPECT_LE(max_abs_diff(hard, std::vector<double>{2.0, 0.0, 1.0}), 1e-6);
}

TEST(SoftRank, MatchesDirectSums) {
  Gen gen(35);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = gen.index(1, 400);
    const double alpha = gen.alpha();
    const auto r = gen.normal(n);
    EXPECT_LE(max_abs_diff(soft_rank(r, alpha).ranks, oracle::rank_direct(r, alpha)), 1e-11);
  }
}

TEST(SoftRank, TotalAndEquivariance) {
  Gen gen(36);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = gen.index(1, 3000);
    const double alpha = gen.alpha();
    const auto r = gen.normal(n);
    const auto ranks = soft_rank(r, alpha).ranks;
    const double dn = static_cast<double>(n);
    EXPECT_NEAR(compensated_sum(ranks), dn * (dn - 1) / 2, 1e-9 * dn * dn);
    for (double x : ranks) {
      ASSERT_GE(x, 0.0);
      ASSERT_LE(x, dn - 1);
    }
    std::vector<std::size_t> pi(n);
    std::iota(pi.begin(), pi.end(), 0);
    std::shuffle(pi.begin(), pi.end(), gen.engine());
    const auto moved = soft_rank(permuted(r, pi), alpha).ranks;
    EXPECT_LE(max_abs_diff(moved, permuted(ranks, pi)), 1e-12);
  }
}

TEST(SoftSort, ClosedFormPoints) {
  EXPECT_EQ(soft_sort(std::vector<double>{2.5}, 0.3).values, std::vector<double>{2.5});
  const auto v = soft_sort(std::vector<double>{5.0, -5.0}, 0.001).values;
  EXPECT_LE(max_abs_diff(v, std::vector<double>{-5.0, 5.0}), 1e-6);
}

TEST(SoftSort, MatchesBisectionOracle) {
  const std::vector<double> r = {0.0, 1.0, 2.0};
  const auto v = soft_sort(r, 1.0).values;
  const std::vector<double> frozen = {-0.40760596444438030448, 1.0, 2.4076059644443803045};
  EXPECT_LE(max_abs_diff(v, frozen), 1e-14);
  EXPECT_LE(max_abs_diff(v, oracle::sort_direct(r, 1.0)), 1e-10);
}

TEST(SoftSort, LevelsAndInvariance) {
  Gen gen(37);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = gen.index(1, 2000);
    const double alpha = gen.pick(std::vector<double>{0.1, 1.0, 10.0});
    const auto r = gen.normal(n);
    const auto prep = prepare(r, ScaleParam(alpha));
    const auto v = soft_sort(prep).values;
    const auto f = fsum_eval(prep, v);
    for (std::size_t l = 0; l < n; ++l) {
      ASSERT_NEAR(f[l], l + 0.5, 1e-9);
      if (l > 0) {
        ASSERT_GT(v[l], v[l - 1]);
      }
    }
    std::vector<std::size_t> pi(n);
    std::iota(pi.begin(), pi.end(), 0);
    std::shuffle(pi.begin(), pi.end(), gen.engine());
    EXPECT_LE(max_abs_diff(soft_sort(permuted(r, pi), alpha).values, v), 1e-12);
  }
}

TEST(SoftPermutation, ClosedFormPoints) {
  const auto one = soft_permutation(std::vector<double>{4.0}, 2.0);
  EXPECT_EQ(one.entries, std::vector<double>{1.0});

  const auto hard = soft_permutation(std::vector<double>{30.0, 10.0, 20.0}, 0.01);
  const std::vector<double> expect = {0, 0, 1, 1, 0, 0, 0, 1, 0};
  EXPECT_LE(max_abs_diff(hard.entries, expect), 1e-6);
}

TEST(SoftPermutation, MatchesBisectionOracle) {
  const std::vector<double> r = {0.0, 1.0};
  const auto m = soft_permutation(r, 1.0);
  const double a = 0.6967346701436832882, b = 0.3032653298563167118;
  EXPECT_LE(max_abs_diff(m.entries, std::vector<double>{a, b, b, a}), 1e-15);
  EXPECT_NEAR(m.levels[0], 0.5, 1e-15);
  EXPECT_LE(max_abs_diff(m.entries, oracle::permutation_direct(r, 1.0).data), 1e-10);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(m.at(i, 0) + m.at(i, 1), 1.0, 1e-12);
    EXPECT_NEAR(m.at(0, i) + m.at(1, i), 1.0, 1e-12);
  }
}

TEST(SoftPermutation, DoublyStochastic) {
  Gen gen(38);
  for (std::size_t n : {1, 2, 7, 100, 333}) {
    for (double alpha : {1e-3, 0.1, 1.0, 10.0}) {
      const auto r = gen.normal(n);
      const auto m = soft_permutation(r, alpha);
      ASSERT_EQ(m.levels.size(), n - 1);
      std::vector<double> cols(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          ASSERT_GE(m.at(i, j), 0.0);
          row += m.at(i, j);
          cols[j] += m.at(i, j);
        }
        ASSERT_NEAR(row, 1.0, 1e-9);
      }
      for (double c : cols)
        ASSERT_NEAR(c, 1.0, 1e-9);
      if (n <= 100) {
        EXPECT_LE(max_abs_diff(m.entries, oracle::permutation_direct(r, alpha).data), 1e-9);
      }
    }
  }
}

TEST(SoftPermutation, RejectsNegativeScale) {
  try {
    soft_permutation(std::vector<double>{0.0, 1.0}, -1.0);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), Errc::negative_scale);
  }
}

TEST(HardLimits, SmallScaleMatchesHardOps) {
  Gen gen(39);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = gen.index(2, 60);
    const auto r = gen.distinct(n, 0.1);
    const std::size_t k = gen.index(1, n - 1);
    const auto hard = oracle::hard_ops(r, k);
    std::vector<double> lo(hard.topmin_mask.begin(), hard.topmin_mask.end());
    std::vector<double> hi(hard.topmax_mask.begin(), hard.topmax_mask.end());
    std::vector<double> ranks(hard.ranks.begin(), hard.ranks.end());
    EXPECT_LE(max_abs_diff(soft_topk(r, k, 1e-3).p, lo), 1e-6);
    EXPECT_LE(max_abs_diff(soft_topk(r, k, -1e-3).p, hi), 1e-6);
    EXPECT_LE(max_abs_diff(soft_rank(r, 1e-3).ranks, ranks), 1e-6);
    EXPECT_LE(max_abs_diff(soft_sort(r, 1e-3).values, hard.sorted), 1e-6);
    EXPECT_LE(max_abs_diff(soft_permutation(r, 1e-3).entries, hard.perm_matrix.data), 1e-6);
  }
}

TEST(Rows, MatchPerRowCalls) {
  Gen gen(40);
  const std::size_t rows = 17, cols = 50;
  const auto m = gen.normal(rows * cols);
  const auto sels = soft_topk_rows(m, cols, 7.5, -0.3);
  const auto ranks = soft_rank_rows(m, cols, 0.3);
  ASSERT_EQ(sels.size(), rows);
  ASSERT_EQ(ranks.size(), rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::span<const double> row(m.data() + i * cols, cols);
    EXPECT_LE(max_abs_diff(sels[i].p, soft_topk(row, 7.5, -0.3, Exec::serial).p), 1e-15);
    EXPECT_LE(max_abs_diff(ranks[i].ranks, soft_rank(row, 0.3, Exec::serial).ranks), 1e-15);
  }
  EXPECT_THROW(soft_topk_rows(m, 7, 1.0, 1.0), Error);
  EXPECT_THROW(soft_topk_rows(m, cols, 50.0, 1.0), Error);
}

} // namespace
} // namespace lapsum
