// Copyright 2026 The cmrf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cmrf/io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "cmrf/errors.hpp"

namespace cmrf {

namespace {

struct Token {
  std::string text;
  std::size_t column;
};

// Line reader that strips comments and tracks positions for diagnostics.
class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  // Next nonblank line split into tokens; nullopt at end of input.
  std::optional<std::vector<Token>> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::vector<Token> tokens;
      std::size_t i = 0;
      while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) tokens.push_back({line.substr(start, i - start), start + 1});
      }
      if (!tokens.empty()) return tokens;
    }
    return std::nullopt;
  }

  [[noreturn]] void fail(std::size_t column, const std::string& message) const {
    throw ParseError(source_, line_, column, message);
  }
  [[noreturn]] void fail_at_end(const std::string& message) const {
    throw ParseError(source_, line_ + 1, 0, message);
  }

  double real(const Token& t) const {
    double v = 0.0;
    const char* end = t.text.data() + t.text.size();
    auto [ptr, ec] = std::from_chars(t.text.data(), end, v);
    if (ec != std::errc() || ptr != end) fail(t.column, "expected a number, got '" + t.text + "'");
    return v;
  }

  std::uint64_t integer(const Token& t) const {
    std::uint64_t v = 0;
    const char* end = t.text.data() + t.text.size();
    auto [ptr, ec] = std::from_chars(t.text.data(), end, v);
    if (ec != std::errc() || ptr != end) fail(t.column, "expected a nonnegative integer, got '" + t.text + "'");
    return v;
  }

  // key=<integer>
  std::uint64_t keyed(const Token& t, const std::string& key) const {
    if (t.text.rfind(key + "=", 0) != 0) fail(t.column, "expected " + key + "=<value>");
    return integer({t.text.substr(key.size() + 1), t.column + key.size() + 1});
  }

  void expect_count(const std::vector<Token>& tokens, std::size_t count, const std::string& what) const {
    if (tokens.size() != count) {
      const std::size_t col = tokens.size() > count ? tokens[count].column : tokens.back().column;
      fail(col, what + " takes " + std::to_string(count - 1) + " fields");
    }
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
};

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  return in;
}

}  // namespace

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_model(std::ostream& out, const IsingModel& model) {
  out << "model n=" << model.size() << "\n";
  for (std::size_t i = 0; i < model.size(); ++i) out << "bias " << i << " " << format_real(model.bias(i)) << "\n";
  for (const Edge& e : model.edges()) out << "edge " << e.i << " " << e.j << " " << format_real(e.weight) << "\n";
}

void write_cmrf(std::ostream& out, const Cmrf& cmrf) {
  write_model(out, cmrf.model());
  out << "visible";
  for (std::size_t v : cmrf.visible()) out << " " << v;
  out << "\n";
}

Cmrf read_cmrf(std::istream& in, const std::string& source) {
  Reader r(in, source);
  auto header = r.next();
  if (!header) r.fail_at_end("empty model file");
  if ((*header)[0].text != "model") r.fail((*header)[0].column, "expected 'model n=<n>'");
  r.expect_count(*header, 2, "model header");
  const std::size_t n = r.keyed((*header)[1], "n");
  if (n == 0) r.fail((*header)[1].column, "model needs at least one vertex");
  std::vector<double> biases(n, 0.0);
  std::vector<bool> seen(n, false);
  std::vector<Edge> edges;
  std::optional<std::vector<std::size_t>> visible;
  auto vertex = [&](const Token& t) {
    const auto v = r.integer(t);
    if (v >= n) r.fail(t.column, "vertex " + t.text + " out of range");
    return static_cast<std::size_t>(v);
  };
  while (auto tokens = r.next()) {
    const auto& t = *tokens;
    if (t[0].text == "bias") {
      r.expect_count(t, 3, "bias");
      const std::size_t i = vertex(t[1]);
      if (seen[i]) r.fail(t[1].column, "duplicate bias for vertex " + t[1].text);
      seen[i] = true;
      biases[i] = r.real(t[2]);
    } else if (t[0].text == "edge") {
      r.expect_count(t, 4, "edge");
      const std::size_t i = vertex(t[1]), j = vertex(t[2]);
      if (i == j) r.fail(t[2].column, "self-loop");
      edges.push_back({i, j, r.real(t[3])});
    } else if (t[0].text == "visible") {
      if (visible) r.fail(t[0].column, "duplicate visible line");
      visible.emplace();
      for (std::size_t k = 1; k < t.size(); ++k) {
        const std::size_t v = vertex(t[k]);
        if (!visible->empty() && v <= visible->back()) r.fail(t[k].column, "visible vertices must be increasing");
        visible->push_back(v);
      }
      if (visible->empty()) r.fail(t[0].column, "visible set is empty");
    } else {
      r.fail(t[0].column, "unknown record '" + t[0].text + "'");
    }
  }
  try {
    IsingModel model = IsingModel::from_edges(n, biases, edges);
    if (!visible) return Cmrf::fully_visible(std::move(model));
    return Cmrf(std::move(model), *visible);
  } catch (const InvalidArgument& e) {
    throw ParseError(source, r.line(), 0, e.what());
  }
}

IsingModel read_model(std::istream& in, const std::string& source) { return read_cmrf(in, source).model(); }

void write_samples(std::ostream& out, const SampleSet& samples) {
  out << "samples m=" << samples.dimension() << " count=" << samples.size() << " seed=" << samples.seed() << "\n";
  std::string row;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    row.clear();
    for (Spin s : samples[i]) {
      if (!row.empty()) row += ' ';
      row += s > 0 ? "1" : "-1";
    }
    out << row << "\n";
  }
}

SampleSet read_samples(std::istream& in, const std::string& source) {
  Reader r(in, source);
  auto header = r.next();
  if (!header) r.fail_at_end("empty sample file");
  const auto& h = *header;
  if (h[0].text != "samples") r.fail(h[0].column, "expected 'samples m=<m> count=<c> seed=<s>'");
  r.expect_count(h, 4, "samples header");
  const std::size_t m = r.keyed(h[1], "m");
  const std::size_t count = r.keyed(h[2], "count");
  const std::uint64_t seed = r.keyed(h[3], "seed");
  if (m == 0) r.fail(h[1].column, "samples need at least one coordinate");
  SampleSet out(m, seed, source);
  out.reserve(count);
  std::vector<Spin> x(m);
  for (std::size_t i = 0; i < count; ++i) {
    auto row = r.next();
    if (!row) r.fail_at_end("file ends after " + std::to_string(i) + " of " + std::to_string(count) + " samples");
    if (row->size() != m) {
      r.fail(row->size() > m ? (*row)[m].column : row->back().column,
             "expected " + std::to_string(m) + " spins, got " + std::to_string(row->size()));
    }
    for (std::size_t k = 0; k < m; ++k) {
      const auto& t = (*row)[k];
      if (t.text == "1" || t.text == "+1") x[k] = 1;
      else if (t.text == "-1") x[k] = -1;
      else r.fail(t.column, "expected 1 or -1, got '" + t.text + "'");
    }
    out.push_back(x);
  }
  if (auto extra = r.next()) r.fail((*extra)[0].column, "more rows than count=" + std::to_string(count));
  return out;
}

void write_table(std::ostream& out, const DistributionTable& table) {
  out << "table m=" << table.dimension() << "\n";
  for (double p : table.probs()) out << format_real(p) << "\n";
}

DistributionTable read_table(std::istream& in, const std::string& source) {
  Reader r(in, source);
  auto header = r.next();
  if (!header) r.fail_at_end("empty table file");
  if ((*header)[0].text != "table") r.fail((*header)[0].column, "expected 'table m=<m>'");
  r.expect_count(*header, 2, "table header");
  const std::size_t m = r.keyed((*header)[1], "m");
  if (m > kDefaultEnumerationCap) r.fail((*header)[1].column, "table dimension exceeds enumeration cap");
  std::vector<double> probs;
  probs.reserve(std::size_t{1} << m);
  while (probs.size() < (std::size_t{1} << m)) {
    auto row = r.next();
    if (!row) r.fail_at_end("file ends after " + std::to_string(probs.size()) + " probabilities");
    for (const auto& t : *row) {
      if (probs.size() == (std::size_t{1} << m)) r.fail(t.column, "too many probabilities");
      probs.push_back(r.real(t));
    }
  }
  if (auto extra = r.next()) r.fail((*extra)[0].column, "too many probabilities");
  try {
    return DistributionTable(m, std::move(probs));
  } catch (const InvalidArgument& e) {
    throw ParseError(source, r.line(), 0, e.what());
  }
}

Cmrf read_cmrf_file(const std::string& path) {
  auto in = open(path);
  return read_cmrf(in, path);
}

SampleSet read_samples_file(const std::string& path) {
  auto in = open(path);
  return read_samples(in, path);
}

DistributionTable read_table_file(const std::string& path) {
  auto in = open(path);
  return read_table(in, path);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << text;
  if (!out) throw InvalidArgument("write failed for " + path);
}

}  // namespace cmrf
