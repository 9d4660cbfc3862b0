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

#ifndef CMRF_METRICS_HPP
#define CMRF_METRICS_HPP

#include <cstddef>
#include <vector>

#include "cmrf/exact.hpp"
#include "cmrf/ising.hpp"
#include "cmrf/learner.hpp"
#include "cmrf/rng.hpp"
#include "cmrf/spin.hpp"

namespace cmrf {

/// 1/2 sum |p_i - q_i|
double tv_distance(const DistributionTable& p, const DistributionTable& q);

struct EmdOptions {
  std::size_t max_dimension = 12;
  double prune_below = 1e-15;
};

struct EmdResult {
  double value = 0.0;        // optimal transport cost
  double dual_bound = 0.0;   // certified lower bound from 1-Lipschitz potentials
  std::size_t phases = 0;
  double pruned_mass = 0.0;  // total mass dropped before solving (both tables)
};

/// Earthmover distance under Hamming cost.
///
/// Solved as an uncapacitated transshipment on the hypercube graph (unit cost
/// per edge), whose optimum equals optimal transport under the Hamming
/// metric. Primal-dual: each phase raises integer potentials by a multi-source
/// Dijkstra and then routes a maximum flow over zero-reduced-cost arcs. The
/// final potentials are 1-Lipschitz, so sum_x pi(x)(q(x) - p(x)) is a lower
/// bound on the optimum; a gap above 1e-9 throws ConvergenceError.
EmdResult emd_solve(const DistributionTable& p, const DistributionTable& q, EmdOptions opts = {});

inline double emd_exact(const DistributionTable& p, const DistributionTable& q, EmdOptions opts = {}) {
  return emd_solve(p, q, opts).value;
}

/// Frequency table of the samples (no smoothing).
DistributionTable empirical_distribution(const SampleSet& samples,
                                         std::size_t cap = kDefaultEnumerationCap);

struct DistortionReport {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation across streams
  std::vector<double> per_stream;
  std::size_t streams = 0;
  std::size_t samples_per_stream = 0;  // most samples any stream consumed
  std::size_t outputs_per_stream = 0;
};

struct DistortionOptions {
  EmdOptions emd;
  unsigned workers = 0;
};

/// For each of K sample streams: train the learner, freeze it, draw R outputs
/// with fresh randomness and measure emd between the empirical output table
/// and `truth`. Stream k uses children "samples", "learner" and "outputs" of
/// `rng` with index k.
DistortionReport distortion_estimate(const Learner& learner, const DistributionTable& truth,
                                     std::size_t streams, std::size_t outputs_per_stream,
                                     const Stream& rng, DistortionOptions opts = {});

DistortionReport distortion_estimate(const Learner& learner, const Cmrf& cmrf, std::size_t streams,
                                     std::size_t outputs_per_stream, const Stream& rng,
                                     DistortionOptions opts = {});

}  // namespace cmrf

#endif  // CMRF_METRICS_HPP
