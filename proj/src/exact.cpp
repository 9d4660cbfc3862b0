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

#include "cmrf/exact.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cmrf/errors.hpp"

namespace cmrf {

namespace {

constexpr double kNormalizationTolerance = 1e-10;
constexpr std::size_t kInfluenceCap = 16;

void check_cap(std::size_t m, std::size_t cap, const char* what) {
  if (m > cap) {
    throw CapExceeded(std::string(what) + ": " + std::to_string(m) +
                      " coordinates exceeds enumeration cap " + std::to_string(cap));
  }
}

std::uint64_t gather_bits(std::uint64_t index, std::span<const std::size_t> coords) {
  std::uint64_t out = 0;
  for (std::size_t k = 0; k < coords.size(); ++k) {
    out |= ((index >> coords[k]) & 1U) << k;
  }
  return out;
}

std::vector<double> normalize_log(std::vector<double> logw) {
  const double mx = *std::max_element(logw.begin(), logw.end());
  double total = 0.0;
  for (double& w : logw) {
    w = std::exp(w - mx);
    total += w;
  }
  for (double& w : logw) w /= total;
  return logw;
}

// P[X_c = +1 | all other coordinates] for the state `base` (bit c ignored),
// from the enumerated log-weights.
double full_conditional(const std::vector<double>& logw, std::uint64_t base, std::size_t c) {
  const std::uint64_t up = base | (std::uint64_t{1} << c);
  const std::uint64_t down = base & ~(std::uint64_t{1} << c);
  return 1.0 / (1.0 + std::exp(logw[down] - logw[up]));
}

}  // namespace

DistributionTable::DistributionTable(std::size_t m, std::vector<double> probs, std::size_t cap)
    : m_(m), probs_(std::move(probs)) {
  check_cap(m, cap, "distribution table");
  if (probs_.size() != (std::size_t{1} << m)) {
    throw InvalidArgument("distribution table over " + std::to_string(m) + " coordinates needs " +
                          std::to_string(std::size_t{1} << m) + " entries, got " +
                          std::to_string(probs_.size()));
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("negative or non-finite probability");
    total += p;
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    throw InvalidArgument("distribution table sums to " + std::to_string(total));
  }
}

DistributionTable DistributionTable::uniform(std::size_t m) {
  const std::size_t states = std::size_t{1} << m;
  return DistributionTable(m, std::vector<double>(states, 1.0 / static_cast<double>(states)));
}

DistributionTable DistributionTable::point_mass(std::size_t m, std::uint64_t index) {
  std::vector<double> p(std::size_t{1} << m, 0.0);
  p.at(index) = 1.0;
  return DistributionTable(m, std::move(p));
}

std::vector<double> log_weights(const IsingModel& model, EnumerationOptions opts) {
  const std::size_t n = model.size();
  check_cap(n, opts.cap, "full enumeration");
  const auto edges = model.edges();
  const auto biases = model.biases();
  const std::size_t states = std::size_t{1} << n;
  std::vector<double> out(states);
  for (std::uint64_t idx = 0; idx < states; ++idx) {
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e += ((idx >> i) & 1U) ? biases[i] : -biases[i];
    for (const Edge& edge : edges) {
      const bool same = ((idx >> edge.i) & 1U) == ((idx >> edge.j) & 1U);
      e += same ? edge.weight : -edge.weight;
    }
    out[idx] = e;
  }
  return out;
}

double log_partition(const IsingModel& model, EnumerationOptions opts) {
  const auto logw = log_weights(model, opts);
  const double mx = *std::max_element(logw.begin(), logw.end());
  double total = 0.0;
  for (double w : logw) total += std::exp(w - mx);
  return mx + std::log(total);
}

DistributionTable full_distribution(const IsingModel& model, EnumerationOptions opts) {
  return DistributionTable(model.size(), normalize_log(log_weights(model, opts)), opts.cap);
}

DistributionTable marginalize(const DistributionTable& table, std::span<const std::size_t> coords) {
  for (std::size_t c : coords) {
    if (c >= table.dimension()) throw InvalidArgument("marginalize: coordinate out of range");
  }
  std::vector<double> out(std::size_t{1} << coords.size(), 0.0);
  const auto probs = table.probs();
  for (std::uint64_t idx = 0; idx < probs.size(); ++idx) {
    out[gather_bits(idx, coords)] += probs[idx];
  }
  return DistributionTable(coords.size(), std::move(out));
}

DistributionTable visible_marginal(const Cmrf& cmrf, EnumerationOptions opts) {
  const auto full = full_distribution(cmrf.model(), opts);
  if (cmrf.visible_count() == cmrf.model().size()) return full;
  return marginalize(full, cmrf.visible());
}

double table_conditional(const DistributionTable& table, std::size_t c, const Condition& cond) {
  if (cond.vertices.size() != cond.values.size()) {
    throw InvalidArgument("condition vertices and values differ in length");
  }
  if (c >= table.dimension()) throw InvalidArgument("conditional: coordinate out of range");
  std::uint64_t mask = 0;
  std::uint64_t want = 0;
  for (std::size_t k = 0; k < cond.vertices.size(); ++k) {
    const std::size_t w = cond.vertices[k];
    if (w >= table.dimension()) throw InvalidArgument("condition coordinate out of range");
    if (w == c) throw InvalidArgument("condition includes the queried coordinate");
    mask |= std::uint64_t{1} << w;
    if (cond.values[k] > 0) want |= std::uint64_t{1} << w;
  }
  double num = 0.0;
  double den = 0.0;
  const auto probs = table.probs();
  for (std::uint64_t idx = 0; idx < probs.size(); ++idx) {
    if ((idx & mask) != want) continue;
    den += probs[idx];
    if ((idx >> c) & 1U) num += probs[idx];
  }
  if (den <= 0.0) throw ZeroProbability("conditioning event has zero probability");
  return num / den;
}

double exact_conditional(const Cmrf& cmrf, std::size_t v, const Condition& condition,
                         EnumerationOptions opts) {
  const auto cv = cmrf.coordinate(v);
  if (!cv) throw InvalidArgument("exact_conditional: vertex " + std::to_string(v) + " is not visible");
  Condition coords;
  coords.values = condition.values;
  for (std::size_t w : condition.vertices) {
    const auto cw = cmrf.coordinate(w);
    if (!cw) throw InvalidArgument("exact_conditional: condition vertex " + std::to_string(w) + " is not visible");
    coords.vertices.push_back(*cw);
  }
  return table_conditional(visible_marginal(cmrf, opts), *cv, coords);
}

double exact_influence_on(const IsingModel& model, std::size_t v) {
  const std::size_t n = model.size();
  check_cap(n, kInfluenceCap, "exact influence");
  if (v >= n) throw InvalidArgument("vertex out of range");
  const auto logw = log_weights(model);
  const std::uint64_t vbit = std::uint64_t{1} << v;
  double total = 0.0;
  for (std::size_t u = 0; u < n; ++u) {
    if (u == v) continue;
    const std::uint64_t ubit = std::uint64_t{1} << u;
    double worst = 0.0;
    for (std::uint64_t idx = 0; idx < logw.size(); ++idx) {
      if (idx & (vbit | ubit)) continue;
      const double plus = full_conditional(logw, idx | ubit, v);
      const double minus = full_conditional(logw, idx, v);
      worst = std::max(worst, std::abs(plus - minus));
    }
    total += worst;
  }
  return total;
}

double exact_influence_of(const IsingModel& model, std::size_t v) {
  const std::size_t n = model.size();
  check_cap(n, kInfluenceCap, "exact influence");
  if (v >= n) throw InvalidArgument("vertex out of range");
  const auto logw = log_weights(model);
  const std::uint64_t vbit = std::uint64_t{1} << v;
  double worst = 0.0;
  for (std::uint64_t idx = 0; idx < logw.size(); ++idx) {
    if (idx & vbit) continue;
    double sum = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      if (u == v) continue;
      const double plus = full_conditional(logw, idx | vbit, u);
      const double minus = full_conditional(logw, idx, u);
      sum += std::abs(plus - minus);
    }
    worst = std::max(worst, sum);
  }
  return worst;
}

TableSampler::TableSampler(const DistributionTable& table)
    : m_(table.dimension()), cumulative_(table.states()) {
  double acc = 0.0;
  const auto probs = table.probs();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cumulative_[i] = acc;
    if (probs[i] > 0.0) last_nonzero_ = i;
  }
}

std::uint64_t TableSampler::draw_index(Stream& rng) const {
  const double u = rng.uniform() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) return last_nonzero_;
  return static_cast<std::uint64_t>(it - cumulative_.begin());
}

SpinVector sample_exact(const DistributionTable& table, Stream& rng) {
  return TableSampler(table).draw(rng);
}

}  // namespace cmrf
