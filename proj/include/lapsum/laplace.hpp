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

#include <cassert>
#include <cmath>
#include <numbers>

#ifdef LAPSUM_CHECK_EXPONENTS
#include <atomic>
#endif

namespace lapsum {

namespace detail {

#ifdef LAPSUM_CHECK_EXPONENTS
inline std::atomic<long> positive_exponent_count{0};
#endif

/// exp() for arguments that must be <= 0. Every anchored sum in the library
/// goes through here so the stability invariant can be checked.
inline double exp_nonpositive(double x) {
#ifdef LAPSUM_CHECK_EXPONENTS
  if (x > 0.0)
    positive_exponent_count.fetch_add(1, std::memory_order_relaxed);
#endif
  assert(!(x > 0.0));
  return std::exp(x);
}

} // namespace detail

/// CDF of the standard Laplace distribution.
inline double laplace_cdf(double x) {
  return x <= 0.0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
}

/// Density of the standard Laplace distribution.
inline double laplace_density(double x) { return 0.5 * std::exp(-std::abs(x)); }

/// log(laplace_cdf(x)), accurate in both tails.
inline double log_laplace_cdf(double x) {
  if (x < 0.0)
    return x - std::numbers::ln2;
  return std::log1p(-0.5 * std::exp(-x));
}

/// laplace_cdf(hi) - laplace_cdf(lo) for lo <= hi without cancellation in
/// either tail. Infinite bounds are allowed.
inline double laplace_cdf_mass(double lo, double hi) {
  if (hi <= 0.0)
    return 0.5 * (std::exp(hi) - std::exp(lo));
  if (lo > 0.0)
    return 0.5 * (std::exp(-lo) - std::exp(-hi));
  return 1.0 - 0.5 * std::exp(lo) - 0.5 * std::exp(-hi);
}

} // namespace lapsum
