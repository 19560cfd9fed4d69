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

#include "lapsum/grad.hpp"

#include <cmath>
#include <numeric>

#include "lapsum/kernels.hpp"

namespace lapsum {

namespace {

void require_size(std::span<const double> v, std::size_t n, const char *what) {
  if (v.size() != n)
    throw Error(Errc::dimension_mismatch, std::string(what) + " has length " +
                                              std::to_string(v.size()) + ", expected " +
                                              std::to_string(n));
}

} // namespace

TopKTangent::TopKTangent(const SoftSelection &selection, std::span<const double> scores)
    : sel_(&selection), scores_(scores) {
  require_size(scores, selection.p.size(), "scores");
}

double db_dk(const TopKTangent &t) { return t.sign() / t.selection().density_sum; }

double db_dalpha(const TopKTangent &t, Exec exec) {
  const auto &sel = t.selection();
  return (sel.threshold - kernels::dot(exec, sel.softmax, t.scores())) / sel.alpha;
}

std::vector<double> topk_jvp(const TopKTangent &t, std::span<const double> v, Exec exec) {
  require_size(v, t.size(), "v");
  const auto &s = t.selection().density;
  const double qv = kernels::dot(exec, t.selection().softmax, v);
  const double sign = t.sign();
  std::vector<double> out(t.size());
  const auto n = static_cast<std::ptrdiff_t>(t.size());
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[i] = sign * s[i] * (qv - v[i]);
  return out;
}

std::vector<double> topk_vjp(const TopKTangent &t, std::span<const double> v, Exec exec) {
  require_size(v, t.size(), "v");
  const auto &s = t.selection().density;
  const auto &q = t.selection().softmax;
  const double sv = kernels::dot(exec, s, v);
  const double sign = t.sign();
  std::vector<double> out(t.size());
  const auto n = static_cast<std::ptrdiff_t>(t.size());
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[i] = sign * (sv * q[i] - s[i] * v[i]);
  return out;
}

std::vector<double> dp_dk(const TopKTangent &t) { return t.selection().softmax; }

std::vector<double> dp_dalpha(const TopKTangent &t, Exec exec) {
  const auto &sel = t.selection();
  const auto r = t.scores();
  const double qr = kernels::dot(exec, sel.softmax, r);
  const double inv_scale = 1.0 / std::abs(sel.alpha);
  std::vector<double> out(t.size());
  const auto n = static_cast<std::ptrdiff_t>(t.size());
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[i] = sel.density[i] * (r[i] - qr) * inv_scale;
  return out;
}

std::vector<double> log_p(const TopKTangent &t, Exec exec) {
  const auto &sel = t.selection();
  const auto r = t.scores();
  std::vector<double> out(t.size());
  const auto n = static_cast<std::ptrdiff_t>(t.size());
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[i] = log_laplace_cdf((sel.threshold - r[i]) / sel.alpha);
  return out;
}

LogPGrads log_p_grads(const TopKTangent &t, std::span<const double> v, Exec exec) {
  require_size(v, t.size(), "v");
  const auto &sel = t.selection();
  const auto r = t.scores();
  const std::size_t n = t.size();
  const auto sn = static_cast<std::ptrdiff_t>(n);
  const double alpha = sel.alpha;
  const double scale = std::abs(alpha);

  // h = |alpha| s / p, i.e. 1 below p = 1/2 and (1 - p) / p above.
  std::vector<double> h(n);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t i = 0; i < sn; ++i)
    h[i] = sel.p[i] <= 0.5 ? 1.0 : scale * sel.density[i] / sel.p[i];

  const double qr = kernels::dot(exec, sel.softmax, r);
  const double qv = kernels::dot(exec, sel.softmax, v);
  const double vh = kernels::dot(exec, v, h);

  LogPGrads g{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n),
              std::vector<double>(n)};
  const double inv_k = 1.0 / (scale * sel.density_sum);
  const double inv_alpha2 = 1.0 / (alpha * alpha);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t i = 0; i < sn; ++i) {
    g.du_dk[i] = h[i] * inv_k;
    g.du_dalpha[i] = h[i] * (r[i] - qr) * inv_alpha2;
    g.jvp[i] = h[i] * (qv - v[i]) / alpha;
    g.vjp[i] = (vh * sel.softmax[i] - v[i] * h[i]) / alpha;
  }
  return g;
}

MultiInverseTangent::MultiInverseTangent(const PreparedScores &prep, std::span<const double> ks,
                                         Exec exec)
    : centers_(prep.sorted.values), perm_(prep.sorted.perm),
      reduced_(fsum_inverse_sorted(prep, ks, exec)), kernel_sums_(ks.size()),
      alpha_(prep.scale.alpha()), exec_(exec) {
  const double sign = prep.scale.sign();
  for (double &b : reduced_)
    b *= sign;
  const std::vector<double> ones(centers_.size(), 1.0);
  kernels::exp_kernel_sums(exec_, centers_, ones, reduced_, std::abs(alpha_), kernel_sums_);
}

std::vector<double> MultiInverseTangent::thresholds() const {
  std::vector<double> out(reduced_);
  if (alpha_ < 0)
    for (double &b : out)
      b = -b;
  return out;
}

std::vector<double> MultiInverseTangent::density_sums() const {
  std::vector<double> out(kernel_sums_);
  const double inv = 0.5 / std::abs(alpha_);
  for (double &d : out)
    d *= inv;
  return out;
}

std::vector<double> MultiInverseTangent::db_dk() const {
  std::vector<double> out(kernel_sums_.size());
  const double num = (alpha_ < 0 ? -2.0 : 2.0) * std::abs(alpha_);
  for (std::size_t m = 0; m < out.size(); ++m)
    out[m] = num / kernel_sums_[m];
  return out;
}

std::vector<double> MultiInverseTangent::db_dalpha() const {
  // In the reduced frame b' = sign b and r' = sign r, so
  // (b - Q r) / alpha = (b' - Q r') / |alpha|.
  std::vector<double> weighted(reduced_.size());
  kernels::exp_kernel_sums(exec_, centers_, centers_, reduced_, std::abs(alpha_), weighted);
  std::vector<double> out(reduced_.size());
  for (std::size_t m = 0; m < out.size(); ++m)
    out[m] = (reduced_[m] - weighted[m] / kernel_sums_[m]) / std::abs(alpha_);
  return out;
}

std::vector<double> MultiInverseTangent::qvp(std::span<const double> v) const {
  const std::size_t n = centers_.size();
  require_size(v, n, "v");
  std::vector<double> weights(n);
  for (std::size_t j = 0; j < n; ++j)
    weights[j] = v[perm_[j]];
  std::vector<double> out(reduced_.size());
  kernels::exp_kernel_sums(exec_, centers_, weights, reduced_, std::abs(alpha_), out);
  for (std::size_t m = 0; m < out.size(); ++m)
    out[m] /= kernel_sums_[m];
  return out;
}

std::vector<double> MultiInverseTangent::vqp(std::span<const double> v) const {
  const std::size_t n = centers_.size();
  require_size(v, reduced_.size(), "v");
  std::vector<double> weights(reduced_.size());
  for (std::size_t m = 0; m < weights.size(); ++m)
    weights[m] = v[m] / kernel_sums_[m];
  std::vector<double> sorted_out(n);
  kernels::exp_kernel_sums(exec_, reduced_, weights, centers_, std::abs(alpha_), sorted_out);
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j)
    out[perm_[j]] = sorted_out[j];
  return out;
}

MultiInverseTangent multi_inverse_grads(const PreparedScores &prep, std::span<const double> ks,
                                        Exec exec) {
  return MultiInverseTangent(prep, ks, exec);
}

std::vector<double> sort_vjp(const PreparedScores &prep, std::span<const double> v, Exec exec) {
  std::vector<double> levels(prep.size());
  std::iota(levels.begin(), levels.end(), 0.5);
  return MultiInverseTangent(prep, levels, exec).vqp(v);
}

std::vector<double> rank_vjp(const PreparedScores &prep, std::span<const double> v, Exec exec) {
  const std::size_t n = prep.size();
  require_size(v, n, "v");
  const auto &r = prep.sorted.values;
  const auto &perm = prep.sorted.perm;
  const double scale = prep.scale.magnitude();

  std::vector<double> ones(n, 1.0), weights(n), row_sums(n), applied(n);
  for (std::size_t j = 0; j < n; ++j)
    weights[j] = v[perm[j]];
  kernels::exp_kernel_sums(exec, r, ones, r, scale, row_sums);
  kernels::exp_kernel_sums(exec, r, weights, r, scale, applied);

  // J = (diag(K 1) - K) / (2 alpha), K_jl = exp(-|r_j - r_l| / |alpha|).
  const double factor = 0.5 / prep.scale.alpha();
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j)
    out[perm[j]] = factor * (row_sums[j] * weights[j] - applied[j]);
  return out;
}

std::vector<double> permutation_vjp(const PreparedScores &prep, const DoublyStochastic &perm,
                                    std::span<const double> cotangent, Exec exec) {
  const std::size_t n = prep.size();
  if (perm.n != n)
    throw Error(Errc::dimension_mismatch, "permutation does not match the prepared set");
  require_size(cotangent, n * n, "cotangent");
  if (prep.scale.alpha() < 0)
    throw Error(Errc::negative_scale, "soft_permutation requires alpha > 0");

  const double alpha = prep.scale.alpha();
  const auto &levels = perm.levels;
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i)
    r[i] = prep.sorted.values[prep.sorted.inv_perm[i]];
  const auto U = [&](std::size_t i, std::size_t j) { return cotangent[i * n + j]; };
  const auto f = [alpha](double x) { return 0.5 * std::exp(-std::abs(x) / alpha) / alpha; };

  // Entry (i, j) depends on the scores directly and through levels j and
  // j + 1. The level terms collect into c, pulled back through Q.
  const auto interior = static_cast<std::ptrdiff_t>(levels.size());
  std::vector<double> c(levels.size());
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t m = 0; m < interior; ++m) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      acc += f(levels[m] - r[i]) * (U(i, m) - U(i, m + 1));
    c[m] = acc;
  }

  std::vector<double> grad(n, 0.0);
  if (n > 1) {
    std::vector<double> targets(n - 1);
    std::iota(targets.begin(), targets.end(), 1.0);
    grad = MultiInverseTangent(prep, targets, exec).vqp(c);
  }

  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t l = 0; l < sn; ++l) {
    double acc = 0.0;
    double lower = 0.0; // density at the level below band j
    for (std::size_t j = 0; j < n; ++j) {
      const double upper = j + 1 < n ? f(levels[j] - r[l]) : 0.0;
      acc += U(l, j) * (upper - lower);
      lower = upper;
    }
    grad[l] -= acc;
  }
  return grad;
}

} // namespace lapsum
