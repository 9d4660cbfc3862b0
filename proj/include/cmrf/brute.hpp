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

#ifndef CMRF_BRUTE_HPP
#define CMRF_BRUTE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cmrf/exact.hpp"
#include "cmrf/ising.hpp"
#include "cmrf/learner.hpp"
#include "cmrf/rng.hpp"
#include "cmrf/spin.hpp"

namespace cmrf {

/// (2/e)^m
double default_mixing_rate(std::size_t m);

/// Candidate laws over m coordinates. Selection uses each table mixed with the
/// uniform law at rate lambda, so every mixed probability is at least
/// lambda 2^-m = e^-m at the default rate.
class CandidateFamily {
 public:
  explicit CandidateFamily(std::size_t m, std::optional<double> lambda = std::nullopt);

  void add(DistributionTable table, std::string label = {});
  std::size_t size() const { return tables_.size(); }
  std::size_t dimension() const { return m_; }
  double lambda() const { return lambda_; }
  const DistributionTable& table(std::size_t i) const { return tables_.at(i); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  DistributionTable mixed(std::size_t i) const;

 private:
  std::size_t m_;
  double lambda_;
  std::vector<DistributionTable> tables_;
  std::vector<std::string> labels_;
};

struct Selection {
  std::size_t index = 0;
  std::vector<double> log_likelihoods;  // per candidate, on the mixed tables
};

/// argmax_j sum_t log p*_j(X_t); ties go to the lowest index.
Selection likelihood_select(const CandidateFamily& family, const SampleSet& samples, unsigned workers = 0);

/// (4 m^2 ln k / T)^{1/4} + sqrt(e^m eps0 / 2)
double selection_error_bound(std::size_t m, std::size_t k, std::size_t samples, double eps0);

/// Each sample is independently replaced by a uniform state with probability lambda.
SampleSet mix_with_uniform(const SampleSet& samples, double lambda, Stream& rng);

struct ConversionOptions {
  std::size_t max_vertices = 4;
  double tolerance = 1e-9;        // KKT residual
  std::size_t max_sweeps = 10000;  // active-set iterations
};

struct ConversionResult {
  IsingModel model;
  std::uint64_t anchor = 0;        // most likely state of the input
  std::vector<double> lower;       // r_x' per state (anchor entry unused)
  double residual = 0.0;           // KKT residual of the fit
  double max_violation = 0.0;      // worst ratio-constraint violation, ratio space
  std::size_t sweeps = 0;         // active-set iterations
};

/// Rounds each probability ratio P[x'] / P[x_max] down to a multiple of
/// epsilon and returns the parameters of least squared norm whose ratios lie
/// in [r, r + epsilon]. Solved in log-ratio space, where the constraints are
/// linear; r = 0 keeps only the upper bound. Throws ConvergenceError when the
/// KKT residual stays above tolerance.
ConversionResult mrf_list_conversion(const IsingModel& model, double epsilon, const ConversionOptions& opts = {});

/// 2^{n^3 + n} (2 + 1/epsilon)^{n^2}, as a base-2 logarithm.
double conversion_count_bound_log2(std::size_t n, double epsilon);

struct ExhaustiveOptions {
  double grid_min = -3.0;
  double grid_max = 3.0;
  double step = 0.1;
  std::size_t samples = 100000;
  std::optional<double> lambda;       // default (2/e)^m
  bool mix_samples = true;            // draw the inputs from the mixed law
  double max_candidates = 2e9;
  unsigned workers = 0;
};

struct ExhaustiveResult {
  DistributionTable table;      // selected visible law, unmixed
  IsingModel model;             // its grid parameters
  std::uint64_t index = 0;      // position in the grid enumeration
  double candidates = 0;
  double lambda = 0.0;
  double log_likelihood = 0.0;
};

/// Grid values grid_min + i * step up to grid_max.
std::vector<double> grid_values(const ExhaustiveOptions& opts);

/// Grid model with the given enumeration index on n vertices: parameters are
/// ordered as biases 0..n-1 then weights (i, j), i < j, row-major; the first
/// parameter varies slowest.
IsingModel grid_model(std::size_t n, std::uint64_t index, const ExhaustiveOptions& opts);

/// Exhaustive maximum likelihood over every grid model on n vertices whose
/// first m vertices are visible. Draws opts.samples samples from the source.
/// Throws CapExceeded when the grid exceeds max_candidates.
ExhaustiveResult exhaustive_learn(SampleSource& source, std::size_t n, std::size_t m, const ExhaustiveOptions& opts,
                                  Stream& rng);

/// Same selection on an explicit sample set (already mixed if desired).
ExhaustiveResult exhaustive_select(const SampleSet& samples, std::size_t n, const ExhaustiveOptions& opts);

}  // namespace cmrf

#endif  // CMRF_BRUTE_HPP
