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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <new>
#include <random>

#include "lapsum/alloc_tracker.hpp"
#include "lapsum/bench.hpp"
#include "lapsum/grad.hpp"
#include "lapsum/ops.hpp"

namespace lapsum::bench {

namespace {

using Clock = std::chrono::steady_clock;

volatile double g_sink = 0.0;

std::vector<double> normal_stream(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(n >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> out(n);
  for (double &x : out)
    x = dist(rng);
  return out;
}

double compensated_sum(std::span<const double> xs) {
  double s = 0.0, c = 0.0;
  for (double x : xs) {
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  return s + c;
}

std::int64_t median(std::vector<std::int64_t> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : (xs[m - 1] + xs[m]) / 2;
}

struct Measured {
  std::int64_t forward_ns = 0;
  std::int64_t forward_backward_ns = 0;
  std::size_t peak = 0;
  double error = 0.0;
};

// fwd() builds the forward state, bwd(state) returns a gradient vector and
// err(state) the op's mass error.
template <class Fwd, class Bwd, class Err>
Measured measure(const SweepConfig &cfg, Fwd fwd, Bwd bwd, Err err) {
  Measured out;
  {
    alloc::PeakScope scope;
    auto state = fwd();
    const auto grad = bwd(state);
    out.peak = scope.delta();
    out.error = err(state);
    g_sink = g_sink + grad.front();
  }
  for (int i = 0; i < cfg.warmup; ++i) {
    auto state = fwd();
    g_sink = g_sink + bwd(state).front();
  }
  std::vector<std::int64_t> f, fb;
  for (int i = 0; i < cfg.repeats; ++i) {
    const auto t0 = Clock::now();
    auto state = fwd();
    const auto t1 = Clock::now();
    const auto grad = bwd(state);
    const auto t2 = Clock::now();
    g_sink = g_sink + grad.front();
    f.push_back(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
    fb.push_back(std::chrono::duration_cast<std::chrono::nanoseconds>(t2 - t0).count());
  }
  out.forward_ns = median(f);
  out.forward_backward_ns = median(fb);
  return out;
}


Measured measure_op(Op op, std::span<const double> scores, double k, double alpha,
                    const SweepConfig &cfg) {
  const Exec ex = cfg.exec;
  const std::size_t n = scores.size();
  const double dn = static_cast<double>(n);
  switch (op) {
  case Op::topk: {
    const auto cot = normal_stream(n, cfg.seed, 1);
    return measure(
        cfg, [&] { return soft_topk(scores, k, alpha, ex); },
        [&](const SoftSelection &sel) { return topk_vjp(TopKTangent(sel, scores), cot, ex); },
        [&](const SoftSelection &sel) { return std::abs(compensated_sum(sel.p) - k); });
  }
  case Op::rank: {
    const auto cot = normal_stream(n, cfg.seed, 1);
    struct State {
      PreparedScores prep;
      SoftRanks out;
    };
    return measure(
        cfg,
        [&] {
          State s{prepare(scores, ScaleParam(alpha), ex), {}};
          s.out = soft_rank(s.prep, ex);
          return s;
        },
        [&](const State &s) { return rank_vjp(s.prep, cot, ex); },
        [&](const State &s) { return std::abs(compensated_sum(s.out.ranks) - dn * (dn - 1) / 2); });
  }
  case Op::sort: {
    const auto cot = normal_stream(n, cfg.seed, 1);
    struct State {
      PreparedScores prep;
      SoftSorted out;
    };
    return measure(
        cfg,
        [&] {
          State s{prepare(scores, ScaleParam(alpha), ex), {}};
          s.out = soft_sort(s.prep, ex);
          return s;
        },
        [&](const State &s) { return sort_vjp(s.prep, cot, ex); },
        [&](const State &s) {
          const auto f = fsum_eval(s.prep, s.out.values, ex);
          double e = 0.0;
          for (std::size_t l = 0; l < n; ++l)
            e = std::max(e, std::abs(f[l] - (static_cast<double>(l) + 0.5)));
          return e;
        });
  }
  case Op::perm: {
    const double a = std::abs(alpha);
    const auto cot = normal_stream(n * n, cfg.seed, 1);
    struct State {
      PreparedScores prep;
      DoublyStochastic out;
    };
    return measure(
        cfg,
        [&] {
          State s{prepare(scores, ScaleParam(a), ex), {}};
          s.out = soft_permutation(s.prep, ex);
          return s;
        },
        [&](const State &s) { return permutation_vjp(s.prep, s.out, cot, ex); },
        [&](const State &s) {
          double e = 0.0;
          std::vector<double> cols(n, 0.0);
          for (std::size_t i = 0; i < n; ++i) {
            const auto row = s.out.row(i);
            e = std::max(e, std::abs(compensated_sum(row) - 1.0));
            for (std::size_t j = 0; j < n; ++j)
              cols[j] += row[j];
          }
          for (double c : cols)
            e = std::max(e, std::abs(c - 1.0));
          return e;
        });
  }
  }
  return {};
}

} // namespace

std::vector<double> make_scores(std::size_t n, std::uint64_t seed) {
  return normal_stream(n, seed, 0);
}

BenchRecord run_cell(Op op, std::size_t n, const SweepConfig &config) {
  BenchRecord rec;
  rec.op = op_name(op);
  rec.n = n;
  rec.k = op == Op::topk ? config.k_rule.resolve(n) : 0.0;
  rec.alpha = op == Op::perm ? std::abs(config.alpha) : config.alpha;
  rec.repeats = config.repeats;
  rec.seed = config.seed;

  const std::size_t saved_cap = alloc::cap();
  alloc::set_cap(config.mem_cap);
  try {
    const auto scores = make_scores(n, config.seed);
    const Measured m = measure_op(op, scores, rec.k, config.alpha, config);
    rec.forward_ns = m.forward_ns;
    rec.forward_backward_ns = m.forward_backward_ns;
    rec.peak_bytes = m.peak;
    rec.error_k = m.error;
  } catch (const std::bad_alloc &) {
    rec.failed = true;
  } catch (const lapsum::Error &) {
    rec.failed = true;
  } catch (const std::length_error &) {
    rec.failed = true;
  }
  alloc::set_cap(saved_cap);
  return rec;
}

void run_sweep(const SweepConfig &config, const std::function<void(const BenchRecord &)> &sink) {
  for (Op op : config.ops)
    for (int e = config.n_min; e <= config.n_max; ++e)
      sink(run_cell(op, std::size_t{1} << e, config));
}

} // namespace lapsum::bench
