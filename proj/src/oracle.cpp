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

#include "lapsum/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace lapsum::oracle {

namespace {

double lap(double x) { return x <= 0.0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x); }

// Neumaier summation.
class CompensatedSum {
public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

} // namespace

double fsum_direct(std::span<const double> r, double x, double alpha) {
  CompensatedSum acc;
  for (double ri : r)
    acc.add(lap((x - ri) / alpha));
  return acc.value();
}

double fsum_residual(std::span<const double> r, double x, double k, double alpha) {
  const double n = static_cast<double>(r.size());
  if (k <= 0.5 * n)
    return fsum_direct(r, x, alpha) - k;
  // n - Fsum(x) = sum_i Lap((r_i - x) / alpha); n - k is exact here.
  CompensatedSum acc;
  for (double ri : r)
    acc.add(lap((ri - x) / alpha));
  return (n - k) - acc.value();
}

double inverse_bisect(std::span<const double> r, double k, double alpha, double tol) {
  const double n = static_cast<double>(r.size());
  if (!(k > 0.0 && k < n))
    throw OracleFailure("k must lie in (0, n)");
  const double scale = std::abs(alpha);
  const auto [lo_it, hi_it] = std::minmax_element(r.begin(), r.end());

  // Orient so that g is increasing in x.
  const double dir = alpha > 0 ? 1.0 : -1.0;
  const auto g = [&](double x) { return dir * fsum_residual(r, x, k, alpha); };

  double lo = *lo_it - scale;
  double hi = *hi_it + scale;
  for (double width = scale; g(lo) > 0.0; width *= 2.0)
    lo -= width;
  for (double width = scale; g(hi) < 0.0; width *= 2.0)
    hi += width;

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
      break;
    const double gm = g(mid);
    if (gm == 0.0)
      return mid;
    (gm < 0.0 ? lo : hi) = mid;
  }

  const double rlo = std::abs(g(lo));
  const double rhi = std::abs(g(hi));
  const double best = rlo <= rhi ? lo : hi;
  const double residual = std::min(rlo, rhi);
  if (residual > tol)
    throw OracleFailure("bisection residual " + std::to_string(residual) +
                        " exceeds tolerance");
  return best;
}

std::vector<double> finite_diff(const std::function<std::vector<double>(double)> &f, double x0,
                                double h) {
  auto plus = f(x0 + h);
  const auto minus = f(x0 - h);
  for (std::size_t i = 0; i < plus.size(); ++i)
    plus[i] = (plus[i] - minus[i]) / (2.0 * h);
  return plus;
}

Matrix jacobian_fd(const std::function<std::vector<double>(std::span<const double>)> &f,
                   std::span<const double> x0, double h) {
  std::vector<double> x(x0.begin(), x0.end());
  Matrix jac;
  for (std::size_t j = 0; j < x.size(); ++j) {
    x[j] = x0[j] + h;
    const auto plus = f(x);
    x[j] = x0[j] - h;
    const auto minus = f(x);
    x[j] = x0[j];
    if (j == 0)
      jac = Matrix(plus.size(), x.size());
    for (std::size_t i = 0; i < plus.size(); ++i)
      jac(i, j) = (plus[i] - minus[i]) / (2.0 * h);
  }
  return jac;
}

std::vector<double> topk_direct(std::span<const double> r, double k, double alpha) {
  const double b = inverse_bisect(r, k, alpha);
  std::vector<double> p(r.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    p[i] = lap((b - r[i]) / alpha);
  return p;
}

std::vector<double> rank_direct(std::span<const double> r, double alpha) {
  std::vector<double> out(r.size());
  for (std::size_t j = 0; j < r.size(); ++j) {
    CompensatedSum acc;
    for (std::size_t l = 0; l < r.size(); ++l)
      if (l != j)
        acc.add(lap((r[j] - r[l]) / alpha));
    out[j] = acc.value();
  }
  return out;
}

std::vector<double> sort_direct(std::span<const double> r, double alpha) {
  std::vector<double> out(r.size());
  for (std::size_t l = 0; l < r.size(); ++l)
    out[l] = inverse_bisect(r, 0.5 + static_cast<double>(l), alpha);
  return out;
}

Matrix permutation_direct(std::span<const double> r, double alpha) {
  const std::size_t n = r.size();
  std::vector<double> levels(n + 1);
  levels[0] = -std::numeric_limits<double>::infinity();
  levels[n] = std::numeric_limits<double>::infinity();
  for (std::size_t m = 1; m < n; ++m)
    levels[m] = inverse_bisect(r, static_cast<double>(m), alpha);

  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out(i, j) = lap((levels[j + 1] - r[i]) / alpha) - lap((levels[j] - r[i]) / alpha);
  return out;
}

HardOrder hard_ops(std::span<const double> r, std::size_t k) {
  const std::size_t n = r.size();
  if (k > n)
    throw std::invalid_argument("k must lie in [0, n]");

  HardOrder out;
  out.ranks.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && r[i] == r[j])
        throw std::invalid_argument("hard orderings need pairwise distinct scores");
      out.ranks[i] += r[j] < r[i] ? 1 : 0;
    }

  out.sorted.assign(r.begin(), r.end());
  std::sort(out.sorted.begin(), out.sorted.end());

  out.topmin_mask.resize(n);
  out.topmax_mask.resize(n);
  out.perm_matrix = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    out.topmin_mask[i] = out.ranks[i] < k ? 1 : 0;
    out.topmax_mask[i] = out.ranks[i] >= n - k ? 1 : 0;
    out.perm_matrix(i, out.ranks[i]) = 1.0;
  }
  return out;
}

} // namespace lapsum::oracle
