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
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "lapsum/exec.hpp"

namespace lapsum::bench {

enum class Op { topk, rank, sort, perm };

Op parse_op(const std::string &name);
const char *op_name(Op op) noexcept;
std::vector<Op> parse_op_list(const std::string &csv);

/// "half" gives k = n/2, "fixed:5" gives k = 5.
struct KRule {
  bool half = true;
  double fixed = 5.0;

  static KRule parse(const std::string &text);
  double resolve(std::size_t n) const noexcept { return half ? 0.5 * static_cast<double>(n) : fixed; }
};

struct SweepConfig {
  std::vector<Op> ops = {Op::topk};
  int n_min = 10; // log2
  int n_max = 21;
  KRule k_rule;
  double alpha = -1.0;
  int repeats = 5;
  int warmup = 1;
  std::uint64_t seed = 42;
  Exec exec = Exec::parallel;
  std::size_t mem_cap = 0; // bytes, 0 for none
};

struct BenchRecord {
  std::string op;
  std::size_t n = 0;
  double k = 0.0; // 0 for ops without a k
  double alpha = 0.0;
  std::int64_t forward_ns = 0;
  std::int64_t forward_backward_ns = 0;
  std::size_t peak_bytes = 0;
  double error_k = 0.0;
  int repeats = 0;
  std::uint64_t seed = 0;
  bool failed = false;
};

class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Standard-normal scores; the stream depends only on (seed, n).
std::vector<double> make_scores(std::size_t n, std::uint64_t seed);

/// One cell: forward and forward+backward medians, allocator peak of one
/// untimed forward+backward pass, and the op's mass error. Allocation
/// failure yields a record with failed set.
BenchRecord run_cell(Op op, std::size_t n, const SweepConfig &config);

void run_sweep(const SweepConfig &config, const std::function<void(const BenchRecord &)> &sink);

void write_csv_header(std::ostream &out);
void write_csv_row(std::ostream &out, const BenchRecord &rec);

/// Text (one decimal per line) or binary ("LPS1", u64 count, f64 values, all
/// little-endian). Throws InputError.
std::vector<double> read_scores(const std::filesystem::path &path);
std::vector<double> parse_scores(const std::string &bytes);

std::string encode_binary(const std::vector<double> &values);

/// Runs op on scores and writes its output as CSV: one value per line for
/// vectors, comma-separated rows for the permutation matrix.
void run_demo(Op op, const std::vector<double> &scores, double k, double alpha, Exec exec,
              std::ostream &out);

} // namespace lapsum::bench
