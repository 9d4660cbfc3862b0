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

#ifndef CMRF_DYNAMICS_HPP
#define CMRF_DYNAMICS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cmrf/exact.hpp"
#include "cmrf/ising.hpp"
#include "cmrf/rng.hpp"
#include "cmrf/spin.hpp"

namespace cmrf {

inline constexpr std::size_t kDefaultEstimatorCap = 20;

/// Per-vertex conditional lookup tables.
///
/// f_v depends only on the coordinates in neighbors(v); its table is indexed
/// by the assignment to those coordinates under the usual bit convention
/// (bit k <-> neighbors(v)[k]). A vertex that was never set has no
/// neighbors and f_v = 1/2.
class ConditionalEstimator {
 public:
  explicit ConditionalEstimator(std::size_t m, std::size_t cap = kDefaultEstimatorCap);

  /// Replaces f_v. `neighbors` must be sorted, duplicate-free, in range and
  /// exclude v; `table` must have 2^|neighbors| entries in [0, 1].
  void set(std::size_t v, std::vector<std::size_t> neighbors, std::vector<double> table);

  double operator()(std::size_t v, std::span<const Spin> x) const;

  std::size_t dimension() const { return m_; }
  std::size_t cap() const { return cap_; }
  std::span<const std::size_t> neighbors(std::size_t v) const { return neighbors_[v]; }
  std::span<const double> table(std::size_t v) const { return tables_[v]; }

 private:
  std::size_t m_;
  std::size_t cap_;
  std::vector<std::vector<std::size_t>> neighbors_;
  std::vector<std::vector<double>> tables_;
};

/// f_v = P[X_v = +1 | X_{-v}] of the model, with S'_v the graph neighbors.
ConditionalEstimator exact_estimator(const IsingModel& model);

/// f_v = P[X_v = +1 | all other coordinates] under `table`, with S'_v every
/// other coordinate. Used for censored laws where no sparse form exists.
ConditionalEstimator table_estimator(const DistributionTable& table);

/// Every table entry shifted by `shift` and clipped to [0, 1].
ConditionalEstimator shifted(const ConditionalEstimator& f, double shift);

/// ceil(m ln m); 0 for m <= 1.
std::size_t default_steps(std::size_t m);

/// Approximate MRF MCMC: T single-site updates at uniformly chosen vertices,
/// x_v = +1 iff p < f_v(x) with p uniform on [0, 1).
SpinVector approximate_mcmc(const ConditionalEstimator& f, const SpinVector& x0, std::size_t steps,
                            Stream& rng);

/// Glauber dynamics updating only vertices of W (coordinates outside W never
/// change). W may be given in any order; duplicates are ignored.
SpinVector glauber_boundary(const IsingModel& model, const SpinVector& x0, std::size_t steps,
                            std::span<const std::size_t> window, Stream& rng);

struct TraceStep {
  std::size_t step;
  std::size_t vertex;
  std::size_t hamming;
};

struct CoupledTrace {
  SpinVector first;
  SpinVector second;
  std::vector<TraceStep> steps;  // empty unless recording was requested

  std::size_t final_hamming() const { return hamming(first.view(), second.view()); }
};

/// Runs both chains on one shared stream of (v, p) draws.
CoupledTrace coupled_chains(const ConditionalEstimator& fa, const ConditionalEstimator& fb,
                            const SpinVector& x0a, const SpinVector& x0b, std::size_t steps,
                            Stream& rng, bool record = false);

}  // namespace cmrf

#endif  // CMRF_DYNAMICS_HPP
