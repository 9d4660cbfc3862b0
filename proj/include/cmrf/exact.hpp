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

#ifndef CMRF_EXACT_HPP
#define CMRF_EXACT_HPP

// Brute-force ground truth. Everything here enumerates all 2^n states and is
// meant as the reference other modules are checked against.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cmrf/ising.hpp"
#include "cmrf/rng.hpp"
#include "cmrf/spin.hpp"

namespace cmrf {

inline constexpr std::size_t kDefaultEnumerationCap = 22;

/// Explicit law over {-1,+1}^m, indexed by the shared bit convention.
/// Entries are nonnegative and sum to 1 within 1e-10.
class DistributionTable {
 public:
  DistributionTable(std::size_t m, std::vector<double> probs,
                    std::size_t cap = kDefaultEnumerationCap);

  static DistributionTable uniform(std::size_t m);
  static DistributionTable point_mass(std::size_t m, std::uint64_t index);

  std::size_t dimension() const { return m_; }
  std::size_t states() const { return probs_.size(); }
  double operator[](std::uint64_t index) const { return probs_[index]; }
  std::span<const double> probs() const { return probs_; }

 private:
  std::size_t m_;
  std::vector<double> probs_;
};

struct EnumerationOptions {
  std::size_t cap = kDefaultEnumerationCap;
};

/// Log-weights theta.x + 1/2 x.Mx of every state, in index order.
std::vector<double> log_weights(const IsingModel& model, EnumerationOptions opts = {});

/// log Z by log-sum-exp over all states.
double log_partition(const IsingModel& model, EnumerationOptions opts = {});

DistributionTable full_distribution(const IsingModel& model, EnumerationOptions opts = {});

/// Law of X_S with coordinates in ascending vertex order.
DistributionTable visible_marginal(const Cmrf& cmrf, EnumerationOptions opts = {});

/// Marginal of `table` on the listed coordinates (in the order given).
DistributionTable marginalize(const DistributionTable& table, std::span<const std::size_t> coords);

/// A partial assignment on vertices (or coordinates, depending on context).
struct Condition {
  std::vector<std::size_t> vertices;
  std::vector<Spin> values;
};

/// P[X_c = +1 | X_{cond} = values] computed from a table; coordinates index
/// the table. Throws ZeroProbability if the conditioning event has no mass.
double table_conditional(const DistributionTable& table, std::size_t c, const Condition& cond);

/// P[X_v = +1 | X_{S'} = condition] for visible vertex v and S' a subset of S \ {v},
/// addressed by vertex index.
double exact_conditional(const Cmrf& cmrf, std::size_t v, const Condition& condition,
                         EnumerationOptions opts = {});

/// sum_{u != v} max_x |P[X_v=1 | X_u=1, x_{-{v,u}}] - P[X_v=1 | X_u=-1, x_{-{v,u}}]|
double exact_influence_on(const IsingModel& model, std::size_t v);

/// max_x sum_{u != v} |P[X_u=1 | X_v=1, x_{-{v,u}}] - P[X_u=1 | X_v=-1, x_{-{v,u}}]|
double exact_influence_of(const IsingModel& model, std::size_t v);

/// Inverse-CDF draw from the table.
SpinVector sample_exact(const DistributionTable& table, Stream& rng);

/// Precomputed cumulative table for repeated inverse-CDF draws. Produces the
/// same states as sample_exact for the same stream.
class TableSampler {
 public:
  explicit TableSampler(const DistributionTable& table);
  std::uint64_t draw_index(Stream& rng) const;
  SpinVector draw(Stream& rng) const { return SpinVector::from_index(draw_index(rng), m_); }
  std::size_t dimension() const { return m_; }

 private:
  std::size_t m_;
  std::vector<double> cumulative_;
  std::uint64_t last_nonzero_ = 0;
};

}  // namespace cmrf

#endif  // CMRF_EXACT_HPP
