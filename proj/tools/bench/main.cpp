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

#include <unistd.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>

#include <CLI11.hpp>

#include "lapsum/bench.hpp"
#include "lapsum/error.hpp"

namespace bench = lapsum::bench;

namespace {

std::size_t default_mem_cap() {
  const long pages = sysconf(_SC_PHYS_PAGES);
  const long page = sysconf(_SC_PAGE_SIZE);
  if (pages <= 0 || page <= 0)
    return 0;
  return static_cast<std::size_t>(pages) * static_cast<std::size_t>(page) / 2;
}

// "-" selects stdout.
std::ostream &open_out(const std::string &path, std::unique_ptr<std::ofstream> &holder) {
  if (path == "-")
    return std::cout;
  holder = std::make_unique<std::ofstream>(path, std::ios::binary);
  if (!*holder)
    throw bench::InputError("cannot write " + path);
  return *holder;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"LapSum soft top-k/rank/sort/permutation benchmark and demo"};
  app.require_subcommand(1);

  bench::SweepConfig cfg;
  std::string ops = "topk", k_rule = "half", sweep_out = "-";
  int threads = 0;
  bool serial = false;
  cfg.mem_cap = default_mem_cap();

  auto *sweep = app.add_subcommand("sweep", "Time ops over a grid n = 2^n_min .. 2^n_max, CSV out");
  sweep->add_option("--ops", ops, "Comma-separated ops: topk,rank,sort,perm")->capture_default_str();
  sweep->add_option("--n-min", cfg.n_min, "log2 of the smallest n")->check(CLI::Range(0, 40))->capture_default_str();
  sweep->add_option("--n-max", cfg.n_max, "log2 of the largest n")->check(CLI::Range(0, 40))->capture_default_str();
  sweep->add_option("--k-rule", k_rule, "half or fixed:<k>")->capture_default_str();
  sweep->add_option("--alpha", cfg.alpha, "Scale; perm uses |alpha|")->capture_default_str();
  sweep->add_option("--repeats", cfg.repeats, "Timed repeats per cell")->check(CLI::PositiveNumber)->capture_default_str();
  sweep->add_option("--warmup", cfg.warmup, "Untimed runs per cell")->check(CLI::NonNegativeNumber)->capture_default_str();
  sweep->add_option("--seed", cfg.seed, "Score generator seed")->capture_default_str();
  sweep->add_option("--out", sweep_out, "CSV path, - for stdout")->capture_default_str();
  sweep->add_option("--threads", threads, "OpenMP threads, 0 keeps the runtime default");
  sweep->add_flag("--serial", serial, "Use the serial reference kernels");
  sweep->add_option("--mem-cap", cfg.mem_cap, "Allocator cap in bytes per cell, 0 for none")->capture_default_str();

  std::string op_name, input, demo_out = "-";
  double k = std::numeric_limits<double>::quiet_NaN();
  double alpha = 1.0;
  bool parallel = false;
  auto *demo = app.add_subcommand("demo", "Run one op on a score file");
  demo->add_option("--op", op_name, "topk, rank, sort or perm")->required();
  demo->add_option("--input", input, "Text (one value per line) or LPS1 binary file")->required();
  demo->add_option("--k", k, "Target mass for topk");
  demo->add_option("--alpha", alpha, "Scale")->capture_default_str();
  demo->add_option("--out", demo_out, "CSV path, - for stdout")->capture_default_str();
  demo->add_flag("--parallel", parallel, "Use the OpenMP kernels");

  CLI11_PARSE(app, argc, argv);

  try {
    if (threads > 0)
      lapsum::set_threads(threads);
    if (*sweep) {
      cfg.ops = bench::parse_op_list(ops);
      cfg.k_rule = bench::KRule::parse(k_rule);
      cfg.exec = serial ? lapsum::Exec::serial : lapsum::Exec::parallel;
      if (cfg.n_min > cfg.n_max)
        throw bench::InputError("--n-min exceeds --n-max");
      std::unique_ptr<std::ofstream> file;
      std::ostream &out = open_out(sweep_out, file);
      bench::write_csv_header(out);
      out.flush();
      bench::run_sweep(cfg, [&](const bench::BenchRecord &rec) {
        bench::write_csv_row(out, rec);
        out.flush();
      });
    } else {
      const bench::Op op = bench::parse_op(op_name);
      if (op == bench::Op::topk && std::isnan(k))
        throw bench::InputError("--k is required for topk");
      const auto scores = bench::read_scores(input);
      std::unique_ptr<std::ofstream> file;
      std::ostream &out = open_out(demo_out, file);
      bench::run_demo(op, scores, k, alpha,
                      parallel ? lapsum::Exec::parallel : lapsum::Exec::serial, out);
    }
  } catch (const bench::InputError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const lapsum::Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
