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

#ifndef CMRF_HIGH_GIRTH_HPP
#define CMRF_HIGH_GIRTH_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "cmrf/high_temp.hpp"
#include "cmrf/learner.hpp"
#include "cmrf/spin.hpp"

namespace cmrf {

/// Empirical Pearson correlations between coordinates. Columns that never
/// vary get correlation 0 with every other column and are flagged.
struct CorrelationMatrix {
  std::size_t m = 0;
  std::size_t samples = 0;
  std::vector<double> values;  // row-major m x m
  std::vector<bool> constant;

  double operator()(std::size_t i, std::size_t j) const { return values[i * m + j]; }
  std::size_t constant_columns() const;
};

/// Sums are accumulated exactly in integers over fixed-size blocks, so the
/// result does not depend on the worker count. Requires at least 2 samples.
CorrelationMatrix pairwise_correlations(const SampleSet& samples, unsigned workers = 0);

struct NeighborSets {
  std::vector<std::vector<std::size_t>> sets;  // sorted
  std::vector<bool> truncated;                 // more than `cap` passed the threshold

  std::size_t truncations() const;
};

/// S_v = {u != v : |rho(v, u)| >= rho0}; when more than `cap` qualify, the cap
/// largest |rho| are kept (ties to the smaller index).
NeighborSets neighbor_sets_by_threshold(const CorrelationMatrix& rho, double rho0, std::size_t cap = 8);

/// 1 / ln(ln(n_s)); requires n_s >= 3.
double asymptotic_rho0(std::size_t n_s);

struct HighGirthConfig {
  std::optional<std::size_t> samples;  // default n_s
  double rho0 = 0.15;
  bool asymptotic_threshold = false;   // use 1 / ln(ln(n_s)) instead of rho0
  std::size_t table_cap = 8;
  double mcmc_multiplier = 1.0;        // T = ceil(mult * n_s ln n_s)
  unsigned workers = 0;

  void validate() const;
  std::size_t effective_samples(std::size_t n_s) const { return samples ? *samples : n_s; }
  double effective_rho0(std::size_t n_s) const;
};

struct HighGirthFit {
  CorrelationMatrix rho;
  NeighborSets neighbors;
  FittedTables tables;
  FrozenSampler sampler;
};

HighGirthFit fit_high_girth(SampleSource& source, const HighGirthConfig& cfg);

/// Draws the configured samples and returns one output of the fitted sampler.
SpinVector high_girth_sample(SampleSource& source, const HighGirthConfig& cfg, Stream& rng);

Learner high_girth_learner(HighGirthConfig cfg);

/// e^{-4 r'} tanh^{r'}(delta) - 2 (bd)^{r/2} / (1 - bd). Requires bd < 1,
/// 0 < delta <= b and r' < r / 2. May be negative.
double girth_correlation_lower_bound(double b, double delta, double d, std::size_t r, std::size_t r_prime);

}  // namespace cmrf

#endif  // CMRF_HIGH_GIRTH_HPP
