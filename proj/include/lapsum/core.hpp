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

#include "lapsum/error.hpp"
#include "lapsum/exec.hpp"
#include "lapsum/laplace.hpp"

namespace lapsum {

/// Signed scale of the Laplace kernels. alpha > 0 orders ascending
/// (top-k picks the smallest scores), alpha < 0 descending.
class ScaleParam {
public:
  /// Throws Error{zero_scale} for alpha == 0 and Error{non_finite_input} for NaN/inf.
  explicit ScaleParam(double alpha);

  double alpha() const noexcept { return alpha_; }
  double magnitude() const noexcept { return alpha_ < 0 ? -alpha_ : alpha_; }
  /// +1 or -1.
  double sign() const noexcept { return alpha_ < 0 ? -1.0 : 1.0; }

private:
  double alpha_;
};

/// Scores after the sign reduction and sort.
///
/// A negative scale is handled by running everything on the negated scores
/// with |alpha|, so `values[j] == sign * scores[perm[j]]`.
struct SortedScores {
  std::vector<double> values;       // ascending
  std::vector<std::size_t> perm;    // sorted position -> original index
  std::vector<std::size_t> inv_perm; // original index -> sorted position

  std::size_t size() const noexcept { return values.size(); }
};

/// Anchored exponential sums over the sorted scores r (scale s = |alpha|):
///   prefix[j] = sum_{i <= j} exp((r_i - r_j) / s)
///   suffix[j] = sum_{i >= j} exp((r_j - r_i) / s)
/// and segment_values[j] = Fsum(r_j). On [r_j, r_{j+1}]
///   Fsum(x) = (j + 1) - prefix[j] e^{(r_j - x)/s} / 2 + suffix[j+1] e^{(x - r_{j+1})/s} / 2.
struct LapCoefficients {
  std::vector<double> prefix;
  std::vector<double> suffix;
  std::vector<double> segment_values;
  double scale = 1.0;
};

/// Sorted scores plus coefficients; immutable once built and safe to share.
struct PreparedScores {
  ScaleParam scale;
  SortedScores sorted;
  LapCoefficients coeffs;

  std::size_t size() const noexcept { return sorted.size(); }
};

/// Sorts the scores and builds the coefficient tables in O(n log n).
PreparedScores prepare(std::span<const double> scores, ScaleParam scale,
                       Exec exec = Exec::parallel);

/// Fsum(x) = sum_i Lap((x - r_i) / alpha) at every query, in query order.
std::vector<double> fsum_eval(const PreparedScores &prep, std::span<const double> xs,
                              Exec exec = Exec::parallel);

/// Unique b with Fsum(b) = k, for 0 < k < n. O(log n).
double fsum_inverse(const PreparedScores &prep, double k);

/// fsum_inverse for every target; targets must be ascending. O(n + m).
std::vector<double> fsum_inverse_sorted(const PreparedScores &prep, std::span<const double> ks,
                                        Exec exec = Exec::parallel);

namespace detail {

void require_finite(std::span<const double> xs, const char *what);
void require_target(double k, std::size_t n);

/// Solution of Fsum(x) = k in the reduced (ascending, alpha > 0) frame,
/// given the segment j with segment_values[j] <= k < segment_values[j+1]
/// (j = -1 and j = n-1 are the two tails).
double reduced_inverse(const PreparedScores &prep, double k, std::ptrdiff_t segment);

/// Fsum at a reduced-frame x known to lie in segment j.
double reduced_fsum(const PreparedScores &prep, double x, std::ptrdiff_t segment);

} // namespace detail

} // namespace lapsum
