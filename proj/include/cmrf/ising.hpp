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

#ifndef CMRF_ISING_HPP
#define CMRF_ISING_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cmrf/spin.hpp"

namespace cmrf {

struct Edge {
  std::size_t i;
  std::size_t j;
  double weight;
};

struct Neighbor {
  std::size_t vertex;
  double weight;
};

/// Pairwise binary Markov random field
///
///   P[X = x] proportional to exp(theta . x + 1/2 x . M x)
///
/// with M symmetric and zero on the diagonal. Immutable after construction.
class IsingModel {
 public:
  /// Validates and stores a dense weight table. Entries asymmetric by at most
  /// 1e-12 are averaged; larger asymmetry, a nonzero diagonal, a dimension
  /// mismatch or a non-finite entry throws InvalidArgument.
  IsingModel(const std::vector<std::vector<double>>& weights, std::vector<double> biases);

  /// n vertices with the given biases and undirected edges (i != j; repeated
  /// pairs accumulate).
  static IsingModel from_edges(std::size_t n, std::vector<double> biases,
                               const std::vector<Edge>& edges);
  static IsingModel zero(std::size_t n);

  std::size_t size() const { return n_; }
  double weight(std::size_t i, std::size_t j) const { return weights_[i * n_ + j]; }
  double bias(std::size_t i) const { return biases_[i]; }
  std::span<const double> biases() const { return biases_; }
  std::span<const Neighbor> neighbors(std::size_t v) const { return adjacency_[v]; }
  /// Nonzero edges with i < j, row-major order.
  std::vector<Edge> edges() const;
  std::vector<std::vector<double>> weight_table() const;

  /// theta . x + 1/2 x . M x
  double log_weight(std::span<const Spin> x) const;

  bool operator==(const IsingModel& o) const {
    return n_ == o.n_ && weights_ == o.weights_ && biases_ == o.biases_;
  }

 private:
  IsingModel(std::size_t n, std::vector<double> flat, std::vector<double> biases);
  void build_adjacency();

  std::size_t n_ = 0;
  std::vector<double> weights_;
  std::vector<double> biases_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

/// An Ising model observed only on `visible` (sorted, duplicate-free, nonempty).
class Cmrf {
 public:
  Cmrf(IsingModel model, std::vector<std::size_t> visible);
  static Cmrf fully_visible(IsingModel model);

  const IsingModel& model() const { return model_; }
  std::span<const std::size_t> visible() const { return visible_; }
  std::size_t visible_count() const { return visible_.size(); }
  /// Position of vertex v within the visible coordinates, if visible.
  std::optional<std::size_t> coordinate(std::size_t v) const;
  bool operator==(const Cmrf&) const = default;

 private:
  IsingModel model_;
  std::vector<std::size_t> visible_;
};

struct ModelBounds {
  double b = 0.0;        // max |weight| and |bias|
  std::size_t d = 0;     // max number of nonzero weights in a row
  double row_sum = 0.0;  // max_v sum_u |M_{v,u}|
};

/// P[X_v = +1 | X_{-v} = x_{-v}] = 1 / (1 + exp(-2 (theta_v + sum_u M_{v,u} x_u))).
/// x_v is ignored.
double conditional_prob(const IsingModel& model, std::size_t v, std::span<const Spin> x);

/// theta_v + sum_u M_{v,u} x_u
double local_field(const IsingModel& model, std::size_t v, std::span<const Spin> x);

ModelBounds model_bounds(const IsingModel& model);

/// Shortest cycle length among nonzero-weight edges; nullopt for a forest.
std::optional<std::size_t> girth(const IsingModel& model);

/// sum_{k >= 0} (N^k)_{v,u} where N_{i,j} = |M_{i,j}| for i, j outside
/// `conditioned` and 0 otherwise. Throws DivergenceError when the row-sum of
/// N is >= 1 and InvalidArgument when v or u is conditioned.
double influence_bound(const IsingModel& model, std::span<const std::size_t> conditioned,
                       std::size_t v, std::size_t u);

/// Copy of `model` with vertex v gauge-flipped: theta_v and row/column v of M
/// negated.
IsingModel gauge_flip(const IsingModel& model, std::size_t v);

/// bd / (1 - bd): bound on the total influence of a vertex on the other
/// visible vertices at high temperature. Requires b >= 0, d >= 0, bd < 1.
double total_influence_bound(double b, double d);

/// [d delta + (bd)^r] / (1 - bd): error of conditioning only on the strong
/// neighborhood of radius r (see strong_neighborhood).
double local_conditioning_bound(double b, double d, double delta, std::size_t r);

/// Members of `visible` other than v joined to v by a path of fewer than r
/// edges, each of absolute weight at least delta. Path interiors may be
/// censored. Sorted.
std::vector<std::size_t> strong_neighborhood(const IsingModel& model, std::span<const std::size_t> visible,
                                             std::size_t v, std::size_t r, double delta);

}  // namespace cmrf

#endif  // CMRF_ISING_HPP
