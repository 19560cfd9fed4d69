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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lapsum/core.hpp"

namespace lapsum {

/// Soft top-k: p_i = Lap((b - r_i) / alpha) with Fsum(b) = k, so sum(p) = k.
///
/// Keeps the backward state: density s_i = Lap'((b - r_i)/alpha) / |alpha|,
/// its normalization q = s / S and S = sum(s). Memory cost is 3n doubles
/// on top of p.
struct SoftSelection {
  std::vector<double> p;       // original order
  double threshold = 0.0;      // b
  double k = 0.0;
  double alpha = 1.0;
  std::vector<double> density; // s
  std::vector<double> softmax; // q
  double density_sum = 0.0;    // S
};

struct SoftRanks {
  std::vector<double> ranks; // original order, each in (0, n - 1)
  double alpha = 1.0;
};

struct SoftSorted {
  std::vector<double> values; // level order: values[l] = Fsum^{-1}(l + 1/2)
  double alpha = 1.0;
};

/// Dense n x n soft permutation. Row i belongs to input element i, column j
/// to the band between thresholds Fsum^{-1}(j) and Fsum^{-1}(j + 1); in the
/// hard limit entry (i, rank_i) is 1.
struct DoublyStochastic {
  std::size_t n = 0;
  std::vector<double> entries; // row-major
  std::vector<double> levels;  // Fsum^{-1}(1), ..., Fsum^{-1}(n - 1)
  double alpha = 1.0;

  double at(std::size_t row, std::size_t col) const { return entries[row * n + col]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(entries).subspan(i * n, n);
  }
};

/// alpha > 0 concentrates the mass on the k smallest scores, alpha < 0 on
/// the k largest. k need not be an integer.
SoftSelection soft_topk(std::span<const double> scores, double k, double alpha,
                        Exec exec = Exec::parallel);

/// Same, reusing a prepared score set.
SoftSelection soft_topk(const PreparedScores &prep, std::span<const double> scores, double k,
                        Exec exec = Exec::parallel);

/// ranks_j = Fsum(r_j) - 1/2 = sum_{l != j} Lap((r_j - r_l) / alpha).
SoftRanks soft_rank(std::span<const double> scores, double alpha, Exec exec = Exec::parallel);
SoftRanks soft_rank(const PreparedScores &prep, Exec exec = Exec::parallel);

SoftSorted soft_sort(std::span<const double> scores, double alpha, Exec exec = Exec::parallel);
SoftSorted soft_sort(const PreparedScores &prep, Exec exec = Exec::parallel);

/// Requires alpha > 0. Entries are clamped at zero; rows and columns sum to 1.
DoublyStochastic soft_permutation(std::span<const double> scores, double alpha,
                                  Exec exec = Exec::parallel);
DoublyStochastic soft_permutation(const PreparedScores &prep, Exec exec = Exec::parallel);

/// One soft_topk per row of a row-major matrix; rows run in parallel.
std::vector<SoftSelection> soft_topk_rows(std::span<const double> matrix, std::size_t cols,
                                          double k, double alpha);

/// One soft_rank per row of a row-major matrix; rows run in parallel.
std::vector<SoftRanks> soft_rank_rows(std::span<const double> matrix, std::size_t cols,
                                      double alpha);

} // namespace lapsum
