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

#include "cmrf/high_temp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <unordered_map>

#include "cmrf/errors.hpp"
#include "cmrf/parallel.hpp"

namespace cmrf {

namespace {

constexpr std::size_t kHardSubsetCap = 4;

std::uint64_t gather(std::uint64_t bits, std::span<const std::size_t> positions) {
  std::uint64_t out = 0;
  for (std::size_t k = 0; k < positions.size(); ++k) out |= ((bits >> positions[k]) & 1U) << k;
  return out;
}

std::uint64_t mask_of(std::span<const std::size_t> positions) {
  std::uint64_t m = 0;
  for (std::size_t p : positions) m |= std::uint64_t{1} << p;
  return m;
}

std::vector<std::size_t> positions_of(std::uint64_t mask) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; mask; ++i, mask >>= 1)
    if (mask & 1U) out.push_back(i);
  return out;
}

// Weighted counts of X_v = +1 and of all mass, per assignment to a set.
struct CellTable {
  std::vector<std::size_t> positions;
  std::vector<double> plus;
  std::vector<double> total;

  CellTable(const WeightedStates& data, std::size_t v, std::vector<std::size_t> pos)
      : positions(std::move(pos)), plus(std::size_t{1} << positions.size(), 0.0), total(plus.size(), 0.0) {
    for (std::size_t k = 0; k < data.states.size(); ++k) {
      const std::uint64_t cell = gather(data.states[k], positions);
      total[cell] += data.weights[k];
      if ((data.states[k] >> v) & 1U) plus[cell] += data.weights[k];
    }
  }
};

// Location of each coordinate of `sub` inside `super` (sub must be a subset).
std::vector<std::size_t> relative_positions(std::span<const std::size_t> sub, std::span<const std::size_t> super) {
  std::vector<std::size_t> out;
  out.reserve(sub.size());
  for (std::size_t p : sub) {
    out.push_back(static_cast<std::size_t>(std::lower_bound(super.begin(), super.end(), p) - super.begin()));
  }
  return out;
}

DStatistic compare(const CellTable& a, const CellTable& b, const CellTable& u) {
  const auto in_a = relative_positions(a.positions, u.positions);
  const auto in_b = relative_positions(b.positions, u.positions);
  DStatistic out;
  for (std::uint64_t c = 0; c < u.total.size(); ++c) {
    ++out.cells;
    if (u.total[c] <= 0.0) {
      ++out.skipped;
      continue;
    }
    const std::uint64_t ca = gather(c, in_a);
    const std::uint64_t cb = gather(c, in_b);
    const double pa = a.plus[ca] / a.total[ca];
    const double pb = b.plus[cb] / b.total[cb];
    out.value = std::max(out.value, std::abs(pa - pb));
  }
  return out;
}

void check_sets(std::size_t m, std::size_t v, std::span<const std::size_t> s) {
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] >= m) throw InvalidArgument("conditioning coordinate out of range");
    if (s[k] == v) throw InvalidArgument("conditioning set contains the target coordinate");
    if (k > 0 && s[k] <= s[k - 1]) throw InvalidArgument("conditioning set must be sorted and duplicate-free");
  }
}

// All subsets of `pool` with at most `cap` elements, by size then lexicographic.
std::vector<std::vector<std::size_t>> candidate_subsets(const std::vector<std::size_t>& pool, std::size_t cap) {
  std::vector<std::vector<std::size_t>> out{{}};
  std::vector<std::vector<std::size_t>> frontier{{}};
  for (std::size_t size = 1; size <= cap && size <= pool.size(); ++size) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& s : frontier) {
      const std::size_t start = s.empty() ? 0 : static_cast<std::size_t>(std::find(pool.begin(), pool.end(), s.back()) - pool.begin()) + 1;
      for (std::size_t k = start; k < pool.size(); ++k) {
        auto t = s;
        t.push_back(pool[k]);
        next.push_back(std::move(t));
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

class VertexSearch {
 public:
  VertexSearch(const WeightedStates& data, std::size_t v) : data_(data), v_(v) {}

  const CellTable& table(std::uint64_t mask) {
    auto it = cache_.find(mask);
    if (it == cache_.end()) it = cache_.emplace(mask, CellTable(data_, v_, positions_of(mask))).first;
    return it->second;
  }

 private:
  const WeightedStates& data_;
  std::size_t v_;
  std::unordered_map<std::uint64_t, CellTable> cache_;
};

VertexNeighborhood search_vertex(const WeightedStates& data, std::size_t v, std::size_t cap, double threshold) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < data.m; ++i)
    if (i != v) pool.push_back(i);
  const auto candidates = candidate_subsets(pool, cap);
  std::vector<std::uint64_t> masks;
  masks.reserve(candidates.size());
  for (const auto& c : candidates) masks.push_back(mask_of(c));

  VertexSearch search(data, v);
  VertexNeighborhood best;
  best.worst_d = std::numeric_limits<double>::infinity();
  best.fallback = true;
  std::size_t cells = 0, skipped = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const CellTable& t1 = search.table(masks[i]);
    double worst = 0.0;
    bool complete = true;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      const std::uint64_t u = masks[i] | masks[j];
      if (u == masks[i]) continue;
      const CellTable& tu = search.table(u);
      const DStatistic d = compare(t1, tu, tu);
      cells += d.cells;
      skipped += d.skipped;
      worst = std::max(worst, d.value);
      if (worst > threshold && worst >= best.worst_d) {
        complete = false;
        break;
      }
    }
    if (!complete) continue;
    if (worst <= threshold) {
      best = {candidates[i], worst, false, 0, 0};
      break;
    }
    if (worst < best.worst_d) best = {candidates[i], worst, true, 0, 0};
  }
  best.cells = cells;
  best.skipped = skipped;
  return best;
}

}  // namespace

WeightedStates WeightedStates::from_samples(const SampleSet& samples) {
  WeightedStates out;
  out.m = samples.dimension();
  std::vector<std::uint64_t> idx(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) idx[i] = samples.index(i);
  std::sort(idx.begin(), idx.end());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && idx[j] == idx[i]) ++j;
    out.states.push_back(idx[i]);
    out.weights.push_back(static_cast<double>(j - i));
    i = j;
  }
  return out;
}

WeightedStates WeightedStates::from_table(const DistributionTable& table) {
  WeightedStates out;
  out.m = table.dimension();
  for (std::uint64_t s = 0; s < table.states(); ++s) {
    if (table[s] > 0.0) {
      out.states.push_back(s);
      out.weights.push_back(table[s]);
    }
  }
  return out;
}

std::size_t default_radius(double b, double d, double epsilon) {
  const double bd = b * d;
  if (!(bd > 0.0 && bd < 1.0)) throw InvalidArgument("default_radius requires 0 < b*d < 1");
  const double r = std::ceil(std::log((1.0 - bd) * epsilon / 4.0) / std::log(bd));
  return static_cast<std::size_t>(std::max(1.0, r));
}

void HighTempConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
  if (!(b > 0.0) || !(d >= 1.0) || !(b * d < 1.0)) throw InvalidArgument("high-temperature learner needs b > 0, d >= 1, b*d < 1");
  if (subset_cap && *subset_cap == 0) throw InvalidArgument("subset cap must be at least 1");
  if (!(sample_multiplier > 0.0) || !(mcmc_multiplier > 0.0)) throw InvalidArgument("multipliers must be positive");
  if ((search_samples && *search_samples == 0) || (fit_samples && *fit_samples == 0)) {
    throw InvalidArgument("sample budgets must be positive");
  }
}

std::size_t HighTempConfig::effective_radius() const { return radius ? *radius : default_radius(b, d, epsilon); }

std::size_t HighTempConfig::effective_subset_cap() const {
  if (subset_cap) return *subset_cap;
  const std::size_t r = effective_radius();
  double reach = 1.0;
  for (std::size_t k = 0; k < r && reach < kHardSubsetCap; ++k) reach *= d;
  return static_cast<std::size_t>(std::min<double>(reach, kHardSubsetCap));
}

std::size_t HighTempConfig::effective_search_samples(std::size_t n_s) const {
  if (search_samples) return *search_samples;
  const double l = std::log(static_cast<double>(std::max<std::size_t>(n_s, 2)));
  return static_cast<std::size_t>(std::ceil(sample_multiplier * l * l));
}

std::size_t HighTempConfig::effective_fit_samples(std::size_t n_s) const {
  return fit_samples ? *fit_samples : effective_search_samples(n_s);
}

double HighTempConfig::epsilon_prime() const {
  const double bd = b * d;
  return epsilon * (1.0 - 2.0 * bd) / (4.0 * (1.0 - bd));
}

DStatistic d_statistic(const WeightedStates& data, std::size_t v, std::span<const std::size_t> s1,
                       std::span<const std::size_t> s2) {
  if (v >= data.m) throw InvalidArgument("d_statistic: coordinate out of range");
  check_sets(data.m, v, s1);
  check_sets(data.m, v, s2);
  const CellTable a(data, v, {s1.begin(), s1.end()});
  const CellTable b(data, v, {s2.begin(), s2.end()});
  const CellTable u(data, v, positions_of(mask_of(s1) | mask_of(s2)));
  const DStatistic out = compare(a, b, u);
  if (out.skipped == out.cells) throw LearnerError("d_statistic: every conditioning cell is empty");
  return out;
}

DStatistic d_statistic(const DistributionTable& table, std::size_t v, std::span<const std::size_t> s1,
                       std::span<const std::size_t> s2) {
  return d_statistic(WeightedStates::from_table(table), v, s1, s2);
}

std::size_t Neighborhoods::fallbacks() const {
  std::size_t n = 0;
  for (const auto& v : vertices) n += v.fallback;
  return n;
}

double Neighborhoods::skip_fraction() const {
  std::size_t cells = 0, skipped = 0;
  for (const auto& v : vertices) {
    cells += v.cells;
    skipped += v.skipped;
  }
  return cells ? static_cast<double>(skipped) / static_cast<double>(cells) : 0.0;
}

Neighborhoods find_neighborhoods(const WeightedStates& data, const HighTempConfig& cfg) {
  cfg.validate();
  if (data.states.empty()) throw InvalidArgument("find_neighborhoods: no data");
  const std::size_t cap = cfg.effective_subset_cap();
  Neighborhoods out;
  out.vertices.resize(data.m);
  double samples = 0.0;
  for (double w : data.weights) samples += w;
  out.samples = static_cast<std::size_t>(std::llround(samples));
  parallel_for(
      data.m, [&](std::size_t v) { out.vertices[v] = search_vertex(data, v, cap, cfg.threshold()); },
      cfg.workers);
  if (out.skip_fraction() > cfg.max_skip_fraction) {
    throw LearnerError("neighborhood search skipped " + std::to_string(100.0 * out.skip_fraction()) +
                       "% of conditioning cells (limit " + std::to_string(100.0 * cfg.max_skip_fraction) +
                       "%); raise the sample budget or lower the subset cap");
  }
  return out;
}

Neighborhoods find_neighborhoods(SampleSource& source, const HighTempConfig& cfg) {
  cfg.validate();
  const auto samples = source.draw(cfg.effective_search_samples(source.dimension()));
  return find_neighborhoods(WeightedStates::from_samples(samples), cfg);
}

FittedTables fit_conditional_tables(const WeightedStates& data,
                                    const std::vector<std::vector<std::size_t>>& neighborhoods) {
  if (neighborhoods.size() != data.m) throw InvalidArgument("one neighborhood per coordinate is required");
  std::size_t cap = kDefaultEstimatorCap;
  for (const auto& s : neighborhoods) cap = std::max(cap, s.size());
  FittedTables out{ConditionalEstimator(data.m, cap), std::vector<std::size_t>(data.m, 0)};
  for (std::size_t v = 0; v < data.m; ++v) {
    check_sets(data.m, v, neighborhoods[v]);
    const CellTable t(data, v, neighborhoods[v]);
    double plus = 0.0, total = 0.0;
    for (std::size_t c = 0; c < t.total.size(); ++c) {
      plus += t.plus[c];
      total += t.total[c];
    }
    if (total <= 0.0) throw InvalidArgument("fit_conditional_tables: no data");
    const double marginal = plus / total;
    std::vector<double> table(t.total.size());
    for (std::size_t c = 0; c < table.size(); ++c) {
      if (t.total[c] > 0.0) {
        table[c] = t.plus[c] / t.total[c];
      } else {
        table[c] = marginal;
        ++out.empty_cells[v];
      }
    }
    out.estimator.set(v, neighborhoods[v], std::move(table));
  }
  return out;
}

FittedTables fit_conditional_tables(const SampleSet& samples,
                                    const std::vector<std::vector<std::size_t>>& neighborhoods) {
  return fit_conditional_tables(WeightedStates::from_samples(samples), neighborhoods);
}

SpinVector FrozenSampler::operator()(Stream& rng) const {
  return approximate_mcmc(estimator, SpinVector(estimator.dimension(), 1), steps, rng);
}

HighTempFit fit_high_temp(SampleSource& source, const HighTempConfig& cfg) {
  cfg.validate();
  const std::size_t n_s = source.dimension();
  Neighborhoods hoods = find_neighborhoods(source, cfg);
  std::vector<std::vector<std::size_t>> sets;
  for (const auto& v : hoods.vertices) sets.push_back(v.set);
  const auto fit_samples = source.draw(cfg.effective_fit_samples(n_s));
  FittedTables tables = fit_conditional_tables(fit_samples, sets);
  const double md = static_cast<double>(n_s);
  const auto steps = n_s > 1 ? static_cast<std::size_t>(std::ceil(cfg.mcmc_multiplier * md * std::log(md))) : 0;
  FrozenSampler sampler{tables.estimator, steps};
  return {std::move(hoods), std::move(tables), std::move(sampler)};
}

SpinVector learn_and_sample(SampleSource& source, const HighTempConfig& cfg, Stream& rng) {
  return fit_high_temp(source, cfg).sampler(rng);
}

Learner high_temp_learner(HighTempConfig cfg) {
  cfg.validate();
  return [cfg](SampleSource& source, Stream&) -> OutputSampler {
    auto frozen = std::make_shared<const FrozenSampler>(fit_high_temp(source, cfg).sampler);
    return [frozen](Stream& rng) { return (*frozen)(rng); };
  };
}

}  // namespace cmrf
