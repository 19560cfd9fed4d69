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
#include "lapsum/ops.hpp"

namespace lapsum {

/// Backward view of a soft top-k result. Holds references only: both the
/// selection and the scores must outlive the tangent.
///
/// With signed density s~ = sign(alpha) * s the Jacobian of p with respect
/// to the scores is D = s~ q^T - diag(s~); none of the functions below
/// materialize it.
class TopKTangent {
public:
  TopKTangent(const SoftSelection &selection, std::span<const double> scores);

  const SoftSelection &selection() const noexcept { return *sel_; }
  std::span<const double> scores() const noexcept { return scores_; }
  std::size_t size() const noexcept { return scores_.size(); }
  double sign() const noexcept { return sel_->alpha < 0 ? -1.0 : 1.0; }

private:
  const SoftSelection *sel_;
  std::span<const double> scores_;
};

double db_dk(const TopKTangent &t);
double db_dalpha(const TopKTangent &t, Exec exec = Exec::parallel);

/// D v
std::vector<double> topk_jvp(const TopKTangent &t, std::span<const double> v,
                             Exec exec = Exec::parallel);
/// v^T D
std::vector<double> topk_vjp(const TopKTangent &t, std::span<const double> v,
                             Exec exec = Exec::parallel);

std::vector<double> dp_dk(const TopKTangent &t);
std::vector<double> dp_dalpha(const TopKTangent &t, Exec exec = Exec::parallel);

/// log p, evaluated without forming p so that neither tail loses precision.
std::vector<double> log_p(const TopKTangent &t, Exec exec = Exec::parallel);

struct LogPGrads {
  std::vector<double> du_dk;
  std::vector<double> du_dalpha;
  std::vector<double> jvp; // (d log p / d r) v
  std::vector<double> vjp; // v^T (d log p / d r)
};

/// Derivatives of u = log p. Uses h(p) = 1 for p <= 1/2 and 1/p - 1 above.
LogPGrads log_p_grads(const TopKTangent &t, std::span<const double> v,
                      Exec exec = Exec::parallel);

/// Thresholds b_m = Fsum^{-1}(k_m) for ascending targets together with
/// their derivatives. The matrix Q of per-level softmax weights,
///   Q[m][i] = exp(-|b_m - r_i| / |alpha|) / sum_j exp(-|b_m - r_j| / |alpha|),
/// is db/dr; it is only ever applied to vectors, in O(n + L).
class MultiInverseTangent {
public:
  MultiInverseTangent(const PreparedScores &prep, std::span<const double> ks,
                      Exec exec = Exec::parallel);

  std::size_t levels() const noexcept { return reduced_.size(); }
  std::size_t size() const noexcept { return centers_.size(); }

  /// b_m in target order.
  std::vector<double> thresholds() const;
  /// S_m = sum_i exp(-|b_m - r_i| / |alpha|) / (2 |alpha|).
  std::vector<double> density_sums() const;
  /// Diagonal of db/dk.
  std::vector<double> db_dk() const;
  /// db/dalpha = (b - Q r) / alpha.
  std::vector<double> db_dalpha() const;

  /// Q v for v of length n (original score order).
  std::vector<double> qvp(std::span<const double> v) const;
  /// v^T Q for v of length L; result in original score order.
  std::vector<double> vqp(std::span<const double> v) const;

private:
  std::vector<double> centers_;     // reduced sorted scores
  std::vector<std::size_t> perm_;   // sorted position -> original index
  std::vector<double> reduced_;     // sign * b, ascending
  std::vector<double> kernel_sums_; // 2 |alpha| S_m
  double alpha_;
  Exec exec_;
};

MultiInverseTangent multi_inverse_grads(const PreparedScores &prep, std::span<const double> ks,
                                        Exec exec = Exec::parallel);

/// v^T d(soft_sort)/dr.
std::vector<double> sort_vjp(const PreparedScores &prep, std::span<const double> v,
                             Exec exec = Exec::parallel);

/// v^T d(soft_rank)/dr. The rank Jacobian is symmetric, so this is also the JVP.
std::vector<double> rank_vjp(const PreparedScores &prep, std::span<const double> v,
                             Exec exec = Exec::parallel);

/// <U, dP> as a gradient over the scores, U given row-major n x n. O(n^2).
std::vector<double> permutation_vjp(const PreparedScores &prep, const DoublyStochastic &perm,
                                    std::span<const double> cotangent,
                                    Exec exec = Exec::parallel);

} // namespace lapsum
