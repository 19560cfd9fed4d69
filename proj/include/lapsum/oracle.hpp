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

// Slow, direct reference implementations. Nothing here touches the sorted
// coefficient machinery in core; tests use these as ground truth.

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace lapsum::oracle {

/// Raised when the bisection cannot reach its residual tolerance.
class OracleFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Row-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double &operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// sum_i Lap((x - r_i) / alpha), compensated summation.
double fsum_direct(std::span<const double> r, double x, double alpha);

/// Fsum(x) - k, evaluated on whichever side of n/2 keeps the subtraction exact.
double fsum_residual(std::span<const double> r, double x, double k, double alpha);

/// Solves Fsum(x) = k by bisection. The bracket starts at
/// [min r - |alpha|, max r + |alpha|] and grows geometrically; bisection runs
/// until the bracket cannot shrink further (at most 200 halvings). Throws
/// OracleFailure if the final |residual| exceeds tol.
double inverse_bisect(std::span<const double> r, double k, double alpha, double tol = 1e-13);

/// Central difference (f(x0 + h) - f(x0 - h)) / (2h), componentwise.
std::vector<double> finite_diff(const std::function<std::vector<double>(double)> &f, double x0,
                                double h);

/// Central-difference Jacobian, J(i, j) = d f_i / d x_j.
Matrix jacobian_fd(const std::function<std::vector<double>(std::span<const double>)> &f,
                   std::span<const double> x0, double h);

// Direct soft operations: O(n^2) or bisection based.
std::vector<double> topk_direct(std::span<const double> r, double k, double alpha);
std::vector<double> rank_direct(std::span<const double> r, double alpha);
std::vector<double> sort_direct(std::span<const double> r, double alpha);
/// Row i = element i, column j = band between Fsum^{-1}(j) and Fsum^{-1}(j+1).
Matrix permutation_direct(std::span<const double> r, double alpha);

/// Exact combinatorial orderings, the alpha -> 0 limits.
struct HardOrder {
  std::vector<int> topmin_mask;        // 1 on the k smallest
  std::vector<int> topmax_mask;        // 1 on the k largest
  std::vector<std::size_t> ranks;      // ascending: card{j : r_j < r_i}
  std::vector<double> sorted;          // ascending
  Matrix perm_matrix;                  // (i, ranks[i]) = 1
};

/// Requires integer k in [0, n] and pairwise distinct scores.
HardOrder hard_ops(std::span<const double> r, std::size_t k);

} // namespace lapsum::oracle
