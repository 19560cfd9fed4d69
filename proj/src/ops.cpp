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

#include "lapsum/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lapsum/kernels.hpp"

namespace lapsum {

namespace {

void check_matrix(std::span<const double> matrix, std::size_t cols) {
  if (cols == 0 || matrix.size() % cols != 0)
    throw Error(Errc::dimension_mismatch, "matrix size must be a positive multiple of cols");
  detail::require_finite(matrix, "scores");
}

} // namespace

SoftSelection soft_topk(const PreparedScores &prep, std::span<const double> scores, double k,
                        Exec exec) {
  const std::size_t n = scores.size();
  if (n != prep.size())
    throw Error(Errc::dimension_mismatch, "scores do not match the prepared set");

  SoftSelection sel;
  sel.k = k;
  sel.alpha = prep.scale.alpha();
  sel.threshold = fsum_inverse(prep, k);

  const double alpha = sel.alpha;
  const double inv_scale = 1.0 / prep.scale.magnitude();
  const double b = sel.threshold;
  sel.p.resize(n);
  sel.density.resize(n);
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t i = 0; i < sn; ++i) {
    const double x = (b - scores[i]) / alpha;
    sel.p[i] = laplace_cdf(x);
    sel.density[i] = laplace_density(x) * inv_scale;
  }

  sel.density_sum = kernels::sum(exec, sel.density);
  sel.softmax.resize(n);
  const double inv_sum = 1.0 / sel.density_sum;
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t i = 0; i < sn; ++i)
    sel.softmax[i] = sel.density[i] * inv_sum;
  return sel;
}

SoftSelection soft_topk(std::span<const double> scores, double k, double alpha, Exec exec) {
  const ScaleParam scale(alpha);
  if (scores.empty())
    throw Error(Errc::empty_input, "scores must be non-empty");
  detail::require_target(k, scores.size());
  const auto prep = prepare(scores, scale, exec);
  return soft_topk(prep, scores, k, exec);
}

SoftRanks soft_rank(const PreparedScores &prep, Exec exec) {
  const std::size_t n = prep.size();
  SoftRanks out{std::vector<double>(n), prep.scale.alpha()};
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t j = 0; j < sn; ++j)
    out.ranks[prep.sorted.perm[j]] = prep.coeffs.segment_values[j] - 0.5;
  return out;
}

SoftRanks soft_rank(std::span<const double> scores, double alpha, Exec exec) {
  return soft_rank(prepare(scores, ScaleParam(alpha), exec), exec);
}

SoftSorted soft_sort(const PreparedScores &prep, Exec exec) {
  std::vector<double> levels(prep.size());
  std::iota(levels.begin(), levels.end(), 0.5);
  return {fsum_inverse_sorted(prep, levels, exec), prep.scale.alpha()};
}

SoftSorted soft_sort(std::span<const double> scores, double alpha, Exec exec) {
  return soft_sort(prepare(scores, ScaleParam(alpha), exec), exec);
}

DoublyStochastic soft_permutation(const PreparedScores &prep, Exec exec) {
  const double alpha = prep.scale.alpha();
  if (alpha < 0.0)
    throw Error(Errc::negative_scale, "soft_permutation requires alpha > 0");
  const std::size_t n = prep.size();

  DoublyStochastic out;
  out.n = n;
  out.alpha = alpha;
  std::vector<double> targets(n - 1);
  std::iota(targets.begin(), targets.end(), 1.0);
  out.levels = fsum_inverse_sorted(prep, targets, exec);

  constexpr double inf = std::numeric_limits<double>::infinity();
  out.entries.resize(n * n);
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t i = 0; i < sn; ++i) {
    const double score = prep.sorted.values[prep.sorted.inv_perm[i]];
    double *row = out.entries.data() + i * n;
    double lo = -inf;
    for (std::size_t j = 0; j < n; ++j) {
      const double hi = j + 1 < n ? (out.levels[j] - score) / alpha : inf;
      row[j] = std::max(0.0, laplace_cdf_mass(lo, hi));
      lo = hi;
    }
  }
  return out;
}

DoublyStochastic soft_permutation(std::span<const double> scores, double alpha, Exec exec) {
  const ScaleParam scale(alpha);
  if (alpha < 0.0)
    throw Error(Errc::negative_scale, "soft_permutation requires alpha > 0");
  return soft_permutation(prepare(scores, scale, exec), exec);
}

std::vector<SoftSelection> soft_topk_rows(std::span<const double> matrix, std::size_t cols,
                                          double k, double alpha) {
  const ScaleParam scale(alpha);
  check_matrix(matrix, cols);
  detail::require_target(k, cols);
  const auto rows = static_cast<std::ptrdiff_t>(matrix.size() / cols);
  std::vector<SoftSelection> out(rows);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const auto row = matrix.subspan(i * cols, cols);
    out[i] = soft_topk(prepare(row, scale, Exec::serial), row, k, Exec::serial);
  }
  return out;
}

std::vector<SoftRanks> soft_rank_rows(std::span<const double> matrix, std::size_t cols,
                                      double alpha) {
  const ScaleParam scale(alpha);
  check_matrix(matrix, cols);
  const auto rows = static_cast<std::ptrdiff_t>(matrix.size() / cols);
  std::vector<SoftRanks> out(rows);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < rows; ++i)
    out[i] = soft_rank(matrix.subspan(i * cols, cols), scale.alpha(), Exec::serial);
  return out;
}

} // namespace lapsum
