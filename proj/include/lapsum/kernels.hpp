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

// Kernels that exist in two flavours: a serial reference kept for testing
// and an OpenMP version. Elementwise loops live next to their callers and
// use `omp parallel for if(...)` instead, since both flavours of those are
// bit-identical.
//
// The parallel reductions and scans split work into fixed-size blocks, so
// their result depends on the input only, never on the thread count.

#include <cstddef>
#include <span>
#include <vector>

#include "lapsum/exec.hpp"

namespace lapsum::kernels {

/// Block size used by the parallel scans and reductions.
inline constexpr std::size_t kBlock = 4096;

struct Keyed {
  double value;
  std::size_t index;
};

#define LAPSUM_KERNEL_DECLS                                                                        \
  /* Sorts by (value, index); the order is total, so both flavours agree exactly. */              \
  void sort_keyed(std::vector<Keyed> &items);                                                      \
                                                                                                   \
  /* out[0] = add[0]; out[j] = mult[j] * out[j-1] + add[j]. mult[0] is ignored. */                 \
  void affine_scan_forward(std::span<const double> mult, std::span<const double> add,              \
                           std::span<double> out);                                                 \
                                                                                                   \
  /* out[n-1] = add[n-1]; out[j] = mult[j] * out[j+1] + add[j]. mult[n-1] is ignored. */           \
  void affine_scan_backward(std::span<const double> mult, std::span<const double> add,             \
                            std::span<double> out);                                                \
                                                                                                   \
  double sum(std::span<const double> xs);                                                          \
  double dot(std::span<const double> a, std::span<const double> b);                                \
                                                                                                   \
  /* For each target (ascending), the largest j with levels[j] <= target, or -1. */                \
  void locate_sorted(std::span<const double> levels, std::span<const double> targets,              \
                     std::span<std::ptrdiff_t> out);                                               \
                                                                                                   \
  /* out[m] = sum_i weights[i] * exp(-|queries[m] - centers[i]| / scale) with both                 \
     centers and queries ascending. Every exponent evaluated is <= 0. */                           \
  void exp_kernel_sums(std::span<const double> centers, std::span<const double> weights,           \
                       std::span<const double> queries, double scale, std::span<double> out);

namespace serial {
LAPSUM_KERNEL_DECLS
} // namespace serial

namespace parallel {
LAPSUM_KERNEL_DECLS
} // namespace parallel

#undef LAPSUM_KERNEL_DECLS

inline void sort_keyed(Exec e, std::vector<Keyed> &items) {
  e == Exec::serial ? serial::sort_keyed(items) : parallel::sort_keyed(items);
}
inline void affine_scan_forward(Exec e, std::span<const double> mult, std::span<const double> add,
                                std::span<double> out) {
  e == Exec::serial ? serial::affine_scan_forward(mult, add, out)
                    : parallel::affine_scan_forward(mult, add, out);
}
inline void affine_scan_backward(Exec e, std::span<const double> mult, std::span<const double> add,
                                 std::span<double> out) {
  e == Exec::serial ? serial::affine_scan_backward(mult, add, out)
                    : parallel::affine_scan_backward(mult, add, out);
}
inline double sum(Exec e, std::span<const double> xs) {
  return e == Exec::serial ? serial::sum(xs) : parallel::sum(xs);
}
inline double dot(Exec e, std::span<const double> a, std::span<const double> b) {
  return e == Exec::serial ? serial::dot(a, b) : parallel::dot(a, b);
}
inline void locate_sorted(Exec e, std::span<const double> levels, std::span<const double> targets,
                          std::span<std::ptrdiff_t> out) {
  e == Exec::serial ? serial::locate_sorted(levels, targets, out)
                    : parallel::locate_sorted(levels, targets, out);
}
inline void exp_kernel_sums(Exec e, std::span<const double> centers,
                            std::span<const double> weights, std::span<const double> queries,
                            double scale, std::span<double> out) {
  e == Exec::serial ? serial::exp_kernel_sums(centers, weights, queries, scale, out)
                    : parallel::exp_kernel_sums(centers, weights, queries, scale, out);
}

} // namespace lapsum::kernels
