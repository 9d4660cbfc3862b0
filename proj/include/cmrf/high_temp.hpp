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

#ifndef CMRF_HIGH_TEMP_HPP
#define CMRF_HIGH_TEMP_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cmrf/dynamics.hpp"
#include "cmrf/exact.hpp"
#include "cmrf/learner.hpp"
#include "cmrf/spin.hpp"

namespace cmrf {

/// Distinct states over m coordinates with nonnegative weights. Built either
/// from samples (weights are counts) or from an exact table (probabilities).
struct WeightedStates {
  std::size_t m = 0;
  std::vector<std::uint64_t> states;
  std::vector<double> weights;

  static WeightedStates from_samples(const SampleSet& samples);
  static WeightedStates from_table(const DistributionTable& table);
};

struct HighTempConfig {
  double epsilon = 0.3;
  double b = 0.1;
  double d = 4;
  std::optional<std::size_t> radius;       // default from epsilon, b, d
  std::optional<std::size_t> subset_cap;   // default min(d^r, 4)
  double sample_multiplier = 200;          // search budget = ceil(mult * ln^2 n_s)
  std::optional<std::size_t> search_samples;
  std::optional<std::size_t> fit_samples;  // default: same as search budget
  double mcmc_multiplier = 1.0;            // T = ceil(mult * n_s ln n_s)
  double max_skip_fraction = 0.05;
  unsigned workers = 0;

  /// Throws InvalidArgument unless b*d < 1, epsilon in (0, 1) and budgets positive.
  void validate() const;
  std::size_t effective_radius() const;
  std::size_t effective_subset_cap() const;
  std::size_t effective_search_samples(std::size_t n_s) const;
  std::size_t effective_fit_samples(std::size_t n_s) const;
  double threshold() const { return 3.0 * epsilon / 8.0; }
  /// epsilon (1 - 2bd) / (4 (1 - bd))
  double epsilon_prime() const;
};

/// ceil(log((1 - bd) eps / 4) / log(bd)), at least 1.
std::size_t default_radius(double b, double d, double epsilon);

struct DStatistic {
  double value = 0.0;
  std::size_t cells = 0;    // cells of S1 u S2 examined
  std::size_t skipped = 0;  // cells with zero mass
};

/// max over assignments x to S1 u S2 with positive mass of
/// |P[X_v=1 | X_S1 = x_S1] - P[X_v=1 | X_S2 = x_S2]|. Sets hold coordinate
/// positions. Throws LearnerError if every cell is empty.
DStatistic d_statistic(const WeightedStates& data, std::size_t v, std::span<const std::size_t> s1,
                       std::span<const std::size_t> s2);
DStatistic d_statistic(const DistributionTable& table, std::size_t v, std::span<const std::size_t> s1,
                       std::span<const std::size_t> s2);

struct VertexNeighborhood {
  std::vector<std::size_t> set;  // S'_v, sorted coordinate positions
  double worst_d = 0.0;          // max over S2 of D(S'_v, S'_v u S2)
  bool fallback = false;         // no candidate met the threshold
  std::size_t cells = 0;
  std::size_t skipped = 0;
};

struct Neighborhoods {
  std::vector<VertexNeighborhood> vertices;
  std::size_t samples = 0;

  std::size_t fallbacks() const;
  double skip_fraction() const;
};

/// Brute-force neighborhood search: for each v, the first S1 (by size, then
/// lexicographic) with |S1| <= cap such that D(S1, S1 u S2) <= 3 eps / 8 for
/// every S2 with |S2| <= cap. Without a passing S1 the minimizer of the
/// worst-case D is used and flagged. Throws LearnerError if more than
/// max_skip_fraction of the examined cells were empty.
Neighborhoods find_neighborhoods(const WeightedStates& data, const HighTempConfig& cfg);
Neighborhoods find_neighborhoods(SampleSource& source, const HighTempConfig& cfg);

struct FittedTables {
  ConditionalEstimator estimator;
  std::vector<std::size_t> empty_cells;  // per vertex, cells filled by the marginal
};

/// f_v(x) = #{X_v = +1, X_S' = x} / #{X_S' = x}; empty cells receive the
/// overall frequency of X_v = +1.
FittedTables fit_conditional_tables(const WeightedStates& data,
                                    const std::vector<std::vector<std::size_t>>& neighborhoods);
FittedTables fit_conditional_tables(const SampleSet& samples,
                                    const std::vector<std::vector<std::size_t>>& neighborhoods);

/// Frozen output of a neighborhood learner: run approximate MCMC from the
/// all-ones state for `steps` updates.
struct FrozenSampler {
  ConditionalEstimator estimator;
  std::size_t steps = 0;

  SpinVector operator()(Stream& rng) const;
};

struct HighTempFit {
  Neighborhoods neighborhoods;
  FittedTables tables;
  FrozenSampler sampler;
};

HighTempFit fit_high_temp(SampleSource& source, const HighTempConfig& cfg);

/// Draws search and fit samples from the source, then returns one output.
SpinVector learn_and_sample(SampleSource& source, const HighTempConfig& cfg, Stream& rng);

Learner high_temp_learner(HighTempConfig cfg);

}  // namespace cmrf

#endif  // CMRF_HIGH_TEMP_HPP
