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

#include "cmrf/ising.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "cmrf/errors.hpp"

namespace cmrf {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kNeumannTailTolerance = 1e-10;

void require_finite(double v, const std::string& what) {
  if (!std::isfinite(v)) throw InvalidArgument(what + " is not finite");
}

}  // namespace

IsingModel::IsingModel(const std::vector<std::vector<double>>& weights,
                       std::vector<double> biases)
    : n_(biases.size()), biases_(std::move(biases)) {
  if (weights.size() != n_) {
    throw InvalidArgument("weight table has " + std::to_string(weights.size()) +
                          " rows but there are " + std::to_string(n_) + " biases");
  }
  weights_.assign(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    if (weights[i].size() != n_) {
      throw InvalidArgument("weight table row " + std::to_string(i) + " has " +
                            std::to_string(weights[i].size()) + " entries, expected " +
                            std::to_string(n_));
    }
    require_finite(biases_[i], "bias " + std::to_string(i));
    for (std::size_t j = 0; j < n_; ++j) {
      require_finite(weights[i][j], "weight (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
    if (weights[i][i] != 0.0) {
      throw InvalidArgument("nonzero diagonal weight at vertex " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double a = weights[i][j];
      const double b = weights[j][i];
      if (std::abs(a - b) > kSymmetryTolerance) {
        throw InvalidArgument("weight table is asymmetric at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
      }
      const double avg = 0.5 * (a + b);
      weights_[i * n_ + j] = avg;
      weights_[j * n_ + i] = avg;
    }
  }
  build_adjacency();
}

IsingModel::IsingModel(std::size_t n, std::vector<double> flat, std::vector<double> biases)
    : n_(n), weights_(std::move(flat)), biases_(std::move(biases)) {
  build_adjacency();
}

IsingModel IsingModel::from_edges(std::size_t n, std::vector<double> biases,
                                  const std::vector<Edge>& edges) {
  if (biases.size() != n) throw InvalidArgument("bias vector length does not match n");
  for (std::size_t i = 0; i < n; ++i) require_finite(biases[i], "bias " + std::to_string(i));
  std::vector<double> flat(n * n, 0.0);
  for (const Edge& e : edges) {
    if (e.i >= n || e.j >= n) throw InvalidArgument("edge endpoint out of range");
    if (e.i == e.j) throw InvalidArgument("self-loop at vertex " + std::to_string(e.i));
    require_finite(e.weight, "edge weight");
    flat[e.i * n + e.j] += e.weight;
    flat[e.j * n + e.i] += e.weight;
  }
  return IsingModel(n, std::move(flat), std::move(biases));
}

IsingModel IsingModel::zero(std::size_t n) {
  return IsingModel(n, std::vector<double>(n * n, 0.0), std::vector<double>(n, 0.0));
}

void IsingModel::build_adjacency() {
  adjacency_.assign(n_, {});
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      const double w = weights_[i * n_ + j];
      if (w != 0.0) adjacency_[i].push_back({j, w});
    }
  }
}

std::vector<Edge> IsingModel::edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < n_; ++i) {
    for (const Neighbor& nb : adjacency_[i]) {
      if (nb.vertex > i) out.push_back({i, nb.vertex, nb.weight});
    }
  }
  return out;
}

std::vector<std::vector<double>> IsingModel::weight_table() const {
  std::vector<std::vector<double>> out(n_, std::vector<double>(n_));
  for (std::size_t i = 0; i < n_; ++i) {
    std::copy_n(weights_.begin() + static_cast<std::ptrdiff_t>(i * n_), n_, out[i].begin());
  }
  return out;
}

double IsingModel::log_weight(std::span<const Spin> x) const {
  if (x.size() != n_) throw InvalidArgument("assignment length does not match model size");
  double e = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    e += biases_[i] * x[i];
    for (const Neighbor& nb : adjacency_[i]) {
      if (nb.vertex > i) e += nb.weight * x[i] * x[nb.vertex];
    }
  }
  return e;
}

Cmrf::Cmrf(IsingModel model, std::vector<std::size_t> visible)
    : model_(std::move(model)), visible_(std::move(visible)) {
  if (visible_.empty()) throw InvalidArgument("visible set is empty");
  std::sort(visible_.begin(), visible_.end());
  if (std::adjacent_find(visible_.begin(), visible_.end()) != visible_.end()) {
    throw InvalidArgument("visible set has duplicates");
  }
  if (visible_.back() >= model_.size()) throw InvalidArgument("visible vertex out of range");
}

Cmrf Cmrf::fully_visible(IsingModel model) {
  std::vector<std::size_t> all(model.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return Cmrf(std::move(model), std::move(all));
}

std::optional<std::size_t> Cmrf::coordinate(std::size_t v) const {
  auto it = std::lower_bound(visible_.begin(), visible_.end(), v);
  if (it == visible_.end() || *it != v) return std::nullopt;
  return static_cast<std::size_t>(it - visible_.begin());
}

double local_field(const IsingModel& model, std::size_t v, std::span<const Spin> x) {
  if (v >= model.size()) throw InvalidArgument("vertex out of range");
  double h = model.bias(v);
  for (const Neighbor& nb : model.neighbors(v)) h += nb.weight * x[nb.vertex];
  return h;
}

double conditional_prob(const IsingModel& model, std::size_t v, std::span<const Spin> x) {
  if (x.size() != model.size()) throw InvalidArgument("assignment length does not match model size");
  return 1.0 / (1.0 + std::exp(-2.0 * local_field(model, v, x)));
}

ModelBounds model_bounds(const IsingModel& model) {
  ModelBounds out;
  for (std::size_t i = 0; i < model.size(); ++i) {
    out.b = std::max(out.b, std::abs(model.bias(i)));
    double row = 0.0;
    for (const Neighbor& nb : model.neighbors(i)) {
      out.b = std::max(out.b, std::abs(nb.weight));
      row += std::abs(nb.weight);
    }
    out.d = std::max(out.d, model.neighbors(i).size());
    out.row_sum = std::max(out.row_sum, row);
  }
  return out;
}

std::optional<std::size_t> girth(const IsingModel& model) {
  const std::size_t n = model.size();
  constexpr std::size_t kUnseen = std::numeric_limits<std::size_t>::max();
  std::size_t best = kUnseen;
  std::vector<std::size_t> dist(n);
  std::vector<std::size_t> parent(n);
  for (std::size_t root = 0; root < n; ++root) {
    std::fill(dist.begin(), dist.end(), kUnseen);
    dist[root] = 0;
    parent[root] = kUnseen;
    std::queue<std::size_t> queue;
    queue.push(root);
    while (!queue.empty()) {
      const std::size_t a = queue.front();
      queue.pop();
      if (2 * dist[a] + 1 >= best) break;
      for (const Neighbor& nb : model.neighbors(a)) {
        const std::size_t c = nb.vertex;
        if (dist[c] == kUnseen) {
          dist[c] = dist[a] + 1;
          parent[c] = a;
          queue.push(c);
        } else if (parent[a] != c) {
          best = std::min(best, dist[a] + dist[c] + 1);
        }
      }
    }
  }
  if (best == kUnseen) return std::nullopt;
  return best;
}

double influence_bound(const IsingModel& model, std::span<const std::size_t> conditioned,
                       std::size_t v, std::size_t u) {
  const std::size_t n = model.size();
  if (v >= n || u >= n) throw InvalidArgument("vertex out of range");
  std::vector<char> in_s(n, 0);
  for (std::size_t s : conditioned) {
    if (s >= n) throw InvalidArgument("conditioned vertex out of range");
    in_s[s] = 1;
  }
  if (in_s[v] || in_s[u]) throw InvalidArgument("influence_bound: v and u must not be conditioned");

  double row_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_s[i]) continue;
    double row = 0.0;
    for (const Neighbor& nb : model.neighbors(i)) {
      if (!in_s[nb.vertex]) row += std::abs(nb.weight);
    }
    row_sum = std::max(row_sum, row);
  }
  if (row_sum >= 1.0) {
    throw DivergenceError("influence_bound: row sum " + std::to_string(row_sum) + " >= 1");
  }

  // y_k = N^k e_u; accumulate (y_k)_v until the geometric tail is negligible.
  std::vector<double> y(n, 0.0);
  std::vector<double> next(n);
  y[u] = 1.0;
  double total = y[v];
  double tail_factor = row_sum;  // row_sum^(k+1)
  for (std::size_t k = 0; tail_factor / (1.0 - row_sum) >= kNeumannTailTolerance; ++k) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (in_s[i]) continue;
      double acc = 0.0;
      for (const Neighbor& nb : model.neighbors(i)) {
        if (!in_s[nb.vertex]) acc += std::abs(nb.weight) * y[nb.vertex];
      }
      next[i] = acc;
    }
    y.swap(next);
    total += y[v];
    tail_factor *= row_sum;
  }
  return total;
}

IsingModel gauge_flip(const IsingModel& model, std::size_t v) {
  if (v >= model.size()) throw InvalidArgument("vertex out of range");
  auto table = model.weight_table();
  std::vector<double> biases(model.biases().begin(), model.biases().end());
  biases[v] = -biases[v];
  for (std::size_t j = 0; j < model.size(); ++j) {
    table[v][j] = -table[v][j];
    table[j][v] = -table[j][v];
  }
  return IsingModel(table, std::move(biases));
}

namespace {

void check_high_temp(double b, double d) {
  if (!(b >= 0.0) || !(d >= 0.0) || !(b * d < 1.0)) throw InvalidArgument("bound requires b, d >= 0 and bd < 1");
}

}  // namespace

double total_influence_bound(double b, double d) {
  check_high_temp(b, d);
  return b * d / (1.0 - b * d);
}

double local_conditioning_bound(double b, double d, double delta, std::size_t r) {
  check_high_temp(b, d);
  if (!(delta >= 0.0)) throw InvalidArgument("delta must be nonnegative");
  return (d * delta + std::pow(b * d, static_cast<double>(r))) / (1.0 - b * d);
}

std::vector<std::size_t> strong_neighborhood(const IsingModel& model, std::span<const std::size_t> visible,
                                             std::size_t v, std::size_t r, double delta) {
  const std::size_t n = model.size();
  if (v >= n) throw InvalidArgument("vertex out of range");
  constexpr auto kUnreached = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(n, kUnreached);
  std::queue<std::size_t> frontier;
  dist[v] = 0;
  frontier.push(v);
  while (!frontier.empty()) {
    const std::size_t w = frontier.front();
    frontier.pop();
    if (dist[w] + 1 >= r) continue;
    for (const Neighbor& nb : model.neighbors(w)) {
      if (std::abs(nb.weight) < delta || dist[nb.vertex] != kUnreached) continue;
      dist[nb.vertex] = dist[w] + 1;
      frontier.push(nb.vertex);
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t s : visible) {
    if (s >= n) throw InvalidArgument("visible vertex out of range");
    if (s != v && dist[s] != kUnreached) out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace cmrf
