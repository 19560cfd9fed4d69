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

#include "lapsum/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lapsum/kernels.hpp"

namespace lapsum {

const char *to_string(Errc code) noexcept {
  switch (code) {
  case Errc::non_finite_input:
    return "non-finite input";
  case Errc::zero_scale:
    return "zero scale";
  case Errc::negative_scale:
    return "negative scale";
  case Errc::k_out_of_range:
    return "k out of range";
  case Errc::dimension_mismatch:
    return "dimension mismatch";
  case Errc::unsorted_targets:
    return "unsorted targets";
  case Errc::empty_input:
    return "empty input";
  }
  return "unknown error";
}

ScaleParam::ScaleParam(double alpha) : alpha_(alpha) {
  if (!std::isfinite(alpha))
    throw Error(Errc::non_finite_input, "alpha must be finite");
  if (alpha == 0.0)
    throw Error(Errc::zero_scale, "alpha must be nonzero");
}

namespace detail {

void require_finite(std::span<const double> xs, const char *what) {
  for (double x : xs)
    if (!std::isfinite(x))
      throw Error(Errc::non_finite_input, std::string(what) + " contains NaN or infinity");
}

void require_target(double k, std::size_t n) {
  if (!(k > 0.0 && k < static_cast<double>(n)))
    throw Error(Errc::k_out_of_range,
                "k = " + std::to_string(k) + " must lie in (0, " + std::to_string(n) + ")");
}

double reduced_fsum(const PreparedScores &prep, double x, std::ptrdiff_t segment) {
  const auto &r = prep.sorted.values;
  const auto &c = prep.coeffs;
  const double s = c.scale;
  const auto n = static_cast<std::ptrdiff_t>(r.size());

  if (segment < 0)
    return 0.5 * c.suffix[0] * exp_nonpositive((x - r[0]) / s);
  if (segment == n - 1)
    return static_cast<double>(n) - 0.5 * c.prefix[n - 1] * exp_nonpositive((r[n - 1] - x) / s);
  return static_cast<double>(segment + 1) -
         0.5 * c.prefix[segment] * exp_nonpositive((r[segment] - x) / s) +
         0.5 * c.suffix[segment + 1] * exp_nonpositive((x - r[segment + 1]) / s);
}

double reduced_inverse(const PreparedScores &prep, double k, std::ptrdiff_t segment) {
  const auto &r = prep.sorted.values;
  const auto &c = prep.coeffs;
  const double s = c.scale;
  const auto n = static_cast<std::ptrdiff_t>(r.size());

  if (segment < 0)
    return r[0] + s * (std::log(2.0 * k) - std::log(c.suffix[0]));
  if (segment == n - 1)
    return r[n - 1] - s * (std::log(2.0 * (static_cast<double>(n) - k)) - std::log(c.prefix[n - 1]));

  // With u = e^{(x - r_{j+1})/s}: suffix u^2 - 2 d u - prefix e^{gap} = 0.
  const std::ptrdiff_t j = segment;
  const double d = k - static_cast<double>(j + 1);
  const double gap = (r[j] - r[j + 1]) / s;
  const double a = c.prefix[j];
  const double b = c.suffix[j + 1];
  const double root = std::sqrt(d * d + a * b * exp_nonpositive(gap));

  // Pick the form of the positive root that does not cancel.
  double log_u;
  if (d > 0.0)
    log_u = std::log(d + root) - std::log(b);
  else if (d < 0.0)
    log_u = std::log(a) + gap - std::log(root - d);
  else
    log_u = 0.5 * (std::log(a) + gap - std::log(b));

  return std::clamp(r[j + 1] + s * log_u, r[j], r[j + 1]);
}

} // namespace detail

PreparedScores prepare(std::span<const double> scores, ScaleParam scale, Exec exec) {
  const std::size_t n = scores.size();
  if (n == 0)
    throw Error(Errc::empty_input, "scores must be non-empty");
  detail::require_finite(scores, "scores");

  const double sign = scale.sign();
  const double s = scale.magnitude();
  const bool par = exec == Exec::parallel;
  const auto sn = static_cast<std::ptrdiff_t>(n);

  PreparedScores prep{scale, {}, {}};
  auto &sorted = prep.sorted;
  auto &coeffs = prep.coeffs;
  coeffs.scale = s;

  {
    std::vector<kernels::Keyed> keyed(n);
#pragma omp parallel for schedule(static) if (par)
    for (std::ptrdiff_t i = 0; i < sn; ++i)
      keyed[i] = {sign * scores[i], static_cast<std::size_t>(i)};
    kernels::sort_keyed(exec, keyed);

    sorted.values.resize(n);
    sorted.perm.resize(n);
    sorted.inv_perm.resize(n);
#pragma omp parallel for schedule(static) if (par)
    for (std::ptrdiff_t j = 0; j < sn; ++j) {
      sorted.values[j] = keyed[j].value;
      sorted.perm[j] = keyed[j].index;
      sorted.inv_perm[keyed[j].index] = static_cast<std::size_t>(j);
    }
  }
  const auto &r = sorted.values;

  // decay[j] = e^{(r_{j-1} - r_j)/s} for 1 <= j < n; zero at both ends.
  std::vector<double> decay(n + 1, 0.0);
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t j = 1; j < sn; ++j)
    decay[j] = detail::exp_nonpositive((r[j - 1] - r[j]) / s);

  const std::vector<double> ones(n, 1.0);
  coeffs.prefix.resize(n);
  coeffs.suffix.resize(n);
  const std::span<const double> decay_view(decay);
  kernels::affine_scan_forward(exec, decay_view.first(n), ones, coeffs.prefix);
  kernels::affine_scan_backward(exec, decay_view.subspan(1, n), ones, coeffs.suffix);

  coeffs.segment_values.resize(n);
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t j = 0; j < sn; ++j) {
    const double right = j + 1 < sn ? coeffs.suffix[j + 1] * decay[j + 1] : 0.0;
    coeffs.segment_values[j] =
        static_cast<double>(j + 1) - 0.5 * coeffs.prefix[j] + 0.5 * right;
  }
  return prep;
}

std::vector<double> fsum_eval(const PreparedScores &prep, std::span<const double> xs, Exec exec) {
  detail::require_finite(xs, "queries");
  const std::size_t m = xs.size();
  const double sign = prep.scale.sign();
  const auto &r = prep.sorted.values;
  std::vector<double> out(m);
  const auto sm = static_cast<std::ptrdiff_t>(m);

  if (exec == Exec::serial) {
    // Sort the queries and merge them against the scores: O(n + m log m).
    std::vector<kernels::Keyed> keyed(m);
    for (std::size_t l = 0; l < m; ++l)
      keyed[l] = {sign * xs[l], l};
    kernels::serial::sort_keyed(keyed);
    std::vector<double> queries(m);
    for (std::size_t l = 0; l < m; ++l)
      queries[l] = keyed[l].value;
    std::vector<std::ptrdiff_t> segment(m);
    kernels::serial::locate_sorted(r, queries, segment);
    for (std::size_t l = 0; l < m; ++l)
      out[keyed[l].index] = detail::reduced_fsum(prep, queries[l], segment[l]);
    return out;
  }

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t l = 0; l < sm; ++l) {
    const double x = sign * xs[l];
    const auto segment = (std::upper_bound(r.begin(), r.end(), x) - r.begin()) - 1;
    out[l] = detail::reduced_fsum(prep, x, segment);
  }
  return out;
}

double fsum_inverse(const PreparedScores &prep, double k) {
  detail::require_target(k, prep.size());
  const auto &w = prep.coeffs.segment_values;
  // Rightmost segment whose left value is <= k; ties resolve to the
  // non-degenerate segment.
  const auto segment = (std::upper_bound(w.begin(), w.end(), k) - w.begin()) - 1;
  return prep.scale.sign() * detail::reduced_inverse(prep, k, segment);
}

std::vector<double> fsum_inverse_sorted(const PreparedScores &prep, std::span<const double> ks,
                                        Exec exec) {
  const std::size_t n = prep.size();
  for (std::size_t m = 0; m < ks.size(); ++m) {
    detail::require_target(ks[m], n);
    if (m > 0 && ks[m] < ks[m - 1])
      throw Error(Errc::unsorted_targets, "targets must be ascending");
  }
  std::vector<std::ptrdiff_t> segment(ks.size());
  kernels::locate_sorted(exec, prep.coeffs.segment_values, ks, segment);

  std::vector<double> out(ks.size());
  const double sign = prep.scale.sign();
  const auto sm = static_cast<std::ptrdiff_t>(ks.size());
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t m = 0; m < sm; ++m)
    out[m] = sign * detail::reduced_inverse(prep, ks[m], segment[m]);
  return out;
}

} // namespace lapsum
