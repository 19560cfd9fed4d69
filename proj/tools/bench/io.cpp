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

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "lapsum/bench.hpp"

namespace lapsum::bench {

namespace {

constexpr char kMagic[4] = {'L', 'P', 'S', '1'};

std::uint64_t load_le64(const char *p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i)
    v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}

void store_le64(std::string &out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>(v & 0xff));
    v >>= 8;
  }
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos)
    return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

} // namespace

Op parse_op(const std::string &name) {
  if (name == "topk")
    return Op::topk;
  if (name == "rank")
    return Op::rank;
  if (name == "sort")
    return Op::sort;
  if (name == "perm")
    return Op::perm;
  throw InputError("unknown op '" + name + "' (expected topk, rank, sort or perm)");
}

const char *op_name(Op op) noexcept {
  switch (op) {
  case Op::topk:
    return "topk";
  case Op::rank:
    return "rank";
  case Op::sort:
    return "sort";
  case Op::perm:
    return "perm";
  }
  return "?";
}

std::vector<Op> parse_op_list(const std::string &csv) {
  std::vector<Op> ops;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    ops.push_back(parse_op(std::string(trim(item))));
  if (ops.empty())
    throw InputError("no ops given");
  return ops;
}

KRule KRule::parse(const std::string &text) {
  KRule rule;
  if (text == "half")
    return rule;
  const std::string prefix = "fixed:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string_view num = std::string_view(text).substr(prefix.size());
    double k = 0.0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), k);
    if (ec == std::errc() && ptr == num.data() + num.size() && k > 0.0) {
      rule.half = false;
      rule.fixed = k;
      return rule;
    }
  }
  throw InputError("bad k rule '" + text + "' (expected half or fixed:<k>)");
}

void write_csv_header(std::ostream &out) {
  out << "op,n,k,alpha,forward_ns,forward_backward_ns,peak_bytes,error_k,repeats,seed,failed\n";
}

void write_csv_row(std::ostream &out, const BenchRecord &r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%zu,%.17g,%.17g,%lld,%lld,%zu,%.17g,%d,%llu,%d\n",
                r.op.c_str(), r.n, r.k, r.alpha, static_cast<long long>(r.forward_ns),
                static_cast<long long>(r.forward_backward_ns), r.peak_bytes, r.error_k, r.repeats,
                static_cast<unsigned long long>(r.seed), r.failed ? 1 : 0);
  out << buf;
}

std::vector<double> parse_scores(const std::string &bytes) {
  std::vector<double> out;
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0) {
    if (bytes.size() < 12)
      throw InputError("truncated binary header");
    const std::uint64_t count = load_le64(bytes.data() + 4);
    if (count > (bytes.size() - 12) / 8 || bytes.size() != 12 + 8 * count)
      throw InputError("binary payload does not match count " + std::to_string(count));
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i)
      out.push_back(std::bit_cast<double>(load_le64(bytes.data() + 12 + 8 * i)));
  } else {
    std::string_view rest(bytes);
    std::size_t line = 0;
    while (!rest.empty()) {
      const auto eol = rest.find('\n');
      const std::string_view raw = rest.substr(0, eol);
      rest = eol == std::string_view::npos ? std::string_view{} : rest.substr(eol + 1);
      ++line;
      const std::string_view tok = trim(raw);
      if (tok.empty())
        continue;
      double x = 0.0;
      const char *first = tok.data();
      if (*first == '+')
        ++first;
      const auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), x);
      if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw InputError("line " + std::to_string(line) + ": cannot parse '" + std::string(tok) +
                         "'");
      out.push_back(x);
    }
  }
  if (out.empty())
    throw InputError("empty input");
  return out;
}

std::vector<double> read_scores(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InputError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_scores(bytes);
}

std::string encode_binary(const std::vector<double> &values) {
  std::string out(kMagic, 4);
  store_le64(out, values.size());
  for (double v : values)
    store_le64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

} // namespace lapsum::bench
