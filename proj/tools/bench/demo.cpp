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

#include <cstdio>
#include <ostream>

#include "lapsum/bench.hpp"
#include "lapsum/ops.hpp"

namespace lapsum::bench {

namespace {

void put(std::ostream &out, double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out << buf;
}

void write_column(std::ostream &out, std::span<const double> xs) {
  for (double x : xs) {
    put(out, x);
    out << '\n';
  }
}

} // namespace

void run_demo(Op op, const std::vector<double> &scores, double k, double alpha, Exec exec,
              std::ostream &out) {
  switch (op) {
  case Op::topk:
    write_column(out, soft_topk(scores, k, alpha, exec).p);
    break;
  case Op::rank:
    write_column(out, soft_rank(scores, alpha, exec).ranks);
    break;
  case Op::sort:
    write_column(out, soft_sort(scores, alpha, exec).values);
    break;
  case Op::perm: {
    const auto m = soft_permutation(scores, alpha, exec);
    for (std::size_t i = 0; i < m.n; ++i) {
      const auto row = m.row(i);
      for (std::size_t j = 0; j < m.n; ++j) {
        if (j)
          out << ',';
        put(out, row[j]);
      }
      out << '\n';
    }
    break;
  }
  }
}

} // namespace lapsum::bench
