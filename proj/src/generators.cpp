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

#include "cmrf/generators.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "cmrf/errors.hpp"
#include "cmrf/gadgets.hpp"

namespace cmrf {

namespace {

using Adjacency = std::vector<std::vector<std::size_t>>;

std::size_t distance(const Adjacency& adj, std::size_t from, std::size_t to, std::size_t limit) {
  std::vector<std::size_t> dist(adj.size(), std::numeric_limits<std::size_t>::max());
  std::deque<std::size_t> queue{from};
  dist[from] = 0;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    if (v == to) return dist[v];
    if (dist[v] >= limit) continue;
    for (std::size_t u : adj[v])
      if (dist[u] == std::numeric_limits<std::size_t>::max()) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
  }
  return std::numeric_limits<std::size_t>::max();
}

template <class T>
void shuffle(std::vector<T>& items, Stream& rng) {
  for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[rng.index(i)]);
}

std::vector<std::size_t> censored_set(const CensoringSpec& c, std::size_t n, Stream& rng) {
  std::size_t count = 0;
  switch (c.rule) {
    case CensorRule::kNone:
    case CensorRule::kGadgetBackground:
      return {};
    case CensorRule::kExplicit:
      return c.censored;
    case CensorRule::kRandomFraction:
      if (!(c.fraction >= 0.0 && c.fraction < 1.0)) throw InvalidArgument("censoring fraction must lie in [0, 1)");
      count = static_cast<std::size_t>(std::llround(c.fraction * static_cast<double>(n)));
      break;
    case CensorRule::kRandomCount:
      count = c.count;
      break;
  }
  if (count >= n) throw InvalidArgument("censoring would hide every vertex");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  shuffle(order, rng);
  order.resize(count);
  return order;
}

}  // namespace

GraphKind parse_graph_kind(const std::string& name) {
  if (name == "path") return GraphKind::kPath;
  if (name == "cycle") return GraphKind::kCycle;
  if (name == "random-tree") return GraphKind::kRandomTree;
  if (name == "random-bounded-degree") return GraphKind::kRandomBoundedDegree;
  if (name == "gadget") return GraphKind::kGadget;
  throw InvalidArgument("unknown generator '" + name + "'");
}

CensorRule parse_censor_rule(const std::string& name) {
  if (name == "none") return CensorRule::kNone;
  if (name == "explicit") return CensorRule::kExplicit;
  if (name == "random-fraction") return CensorRule::kRandomFraction;
  if (name == "random-count") return CensorRule::kRandomCount;
  if (name == "gadget-background") return CensorRule::kGadgetBackground;
  throw InvalidArgument("unknown censoring rule '" + name + "'");
}

std::string to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::kPath: return "path";
    case GraphKind::kCycle: return "cycle";
    case GraphKind::kRandomTree: return "random-tree";
    case GraphKind::kRandomBoundedDegree: return "random-bounded-degree";
    case GraphKind::kGadget: return "gadget";
  }
  return "?";
}

std::string to_string(CensorRule rule) {
  switch (rule) {
    case CensorRule::kNone: return "none";
    case CensorRule::kExplicit: return "explicit";
    case CensorRule::kRandomFraction: return "random-fraction";
    case CensorRule::kRandomCount: return "random-count";
    case CensorRule::kGadgetBackground: return "gadget-background";
  }
  return "?";
}

std::size_t moore_bound(std::size_t d, std::size_t g) {
  if (d < 3 || g < 3) return 0;
  const std::size_t r = g / 2;
  std::size_t sum = 0, term = 1;
  if (g % 2 == 1) {
    for (std::size_t i = 0; i < r; ++i, term *= d - 1) sum += term;
    return 1 + d * sum;
  }
  for (std::size_t i = 0; i < r; ++i, term *= d - 1) sum += term;
  return 2 * sum;
}

Cmrf generate_model(const GeneratorSpec& spec, Stream rng) {
  if (spec.kind == GraphKind::kGadget) {
    if (!(spec.b > 0.0)) throw InvalidArgument("gadget needs b > 0");
    const ParityGadget g = spec.k == 1 ? build_parity_gadget(spec.b) : build_chained_parity(spec.b, spec.k);
    if (spec.censoring.rule == CensorRule::kNone || spec.censoring.rule == CensorRule::kGadgetBackground)
      return g.cmrf();
    Stream crng = rng.child("censoring");
    auto hidden = censored_set(spec.censoring, g.model.size(), crng);
    std::vector<std::size_t> visible;
    for (std::size_t v = 0; v < g.model.size(); ++v)
      if (std::find(hidden.begin(), hidden.end(), v) == hidden.end()) visible.push_back(v);
    return Cmrf(g.model, visible);
  }

  const std::size_t n = spec.n;
  if (n == 0) throw InvalidArgument("generator needs n >= 1");
  if (!(spec.b >= 0.0) || !(spec.bias >= 0.0) || spec.bias > spec.b)
    throw InvalidArgument("generator needs 0 <= bias <= b");
  if (!(spec.weight_floor >= 0.0 && spec.weight_floor <= 1.0)) throw InvalidArgument("weight_floor must lie in [0, 1]");
  std::size_t degree_cap = spec.d;
  if (spec.kind == GraphKind::kPath || spec.kind == GraphKind::kCycle) {
    if (spec.d != 0 && spec.d < 2 && n > 2) throw InvalidArgument("paths and cycles need d >= 2");
    degree_cap = 2;
  }
  if (spec.kind == GraphKind::kRandomBoundedDegree && spec.d == 0)
    throw InvalidArgument("random-bounded-degree needs d >= 1");
  if (spec.kind == GraphKind::kCycle && n < 3) throw InvalidArgument("cycle needs n >= 3");
  if (spec.high_temperature) {
    const double bd = spec.b * static_cast<double>(degree_cap == 0 ? n - 1 : degree_cap);
    if (!(bd < 1.0)) throw InvalidArgument("high-temperature class needs b d < 1, got " + std::to_string(bd));
  }
  if (spec.kind == GraphKind::kRandomBoundedDegree && spec.min_girth > 2) {
    if (spec.min_girth > n)
      throw InvalidArgument("girth " + std::to_string(spec.min_girth) + " exceeds n = " + std::to_string(n));
    const std::size_t moore = moore_bound(spec.d, spec.min_girth);
    if (n < moore) {
      throw InvalidArgument("degree " + std::to_string(spec.d) + " with girth " + std::to_string(spec.min_girth) +
                            " needs at least " + std::to_string(moore) + " vertices");
    }
  }

  Stream grng = rng.child("graph");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  Adjacency adj(n);
  auto link = [&](std::size_t i, std::size_t j) {
    pairs.emplace_back(std::min(i, j), std::max(i, j));
    adj[i].push_back(j);
    adj[j].push_back(i);
  };
  switch (spec.kind) {
    case GraphKind::kPath:
      for (std::size_t i = 0; i + 1 < n; ++i) link(i, i + 1);
      break;
    case GraphKind::kCycle:
      for (std::size_t i = 0; i < n; ++i) link(i, (i + 1) % n);
      break;
    case GraphKind::kRandomTree:
      if (spec.d == 1 && n > 2) throw InvalidArgument("tree with d = 1 has at most 2 vertices");
      for (std::size_t v = 1; v < n; ++v) {
        std::size_t parent = grng.index(v);
        while (spec.d != 0 && adj[parent].size() >= spec.d) parent = grng.index(v);
        link(parent, v);
      }
      break;
    case GraphKind::kRandomBoundedDegree: {
      std::vector<std::pair<std::size_t, std::size_t>> candidates;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) candidates.emplace_back(i, j);
      shuffle(candidates, grng);
      for (auto [i, j] : candidates) {
        if (adj[i].size() >= spec.d || adj[j].size() >= spec.d) continue;
        if (spec.min_girth > 2 && distance(adj, i, j, spec.min_girth) + 1 < spec.min_girth) continue;
        link(i, j);
      }
      break;
    }
    case GraphKind::kGadget:
      break;
  }

  Stream wrng = rng.child("weights");
  std::vector<double> biases(n, 0.0);
  for (auto& t : biases) t = (2 * wrng.uniform() - 1) * spec.bias;
  std::vector<Edge> edges;
  std::sort(pairs.begin(), pairs.end());
  for (auto [i, j] : pairs) {
    double w = spec.b * (spec.weight_floor + (1 - spec.weight_floor) * wrng.uniform());
    if (spec.random_signs && wrng.bernoulli(0.5)) w = -w;
    edges.push_back({i, j, w});
  }
  IsingModel model = IsingModel::from_edges(n, std::move(biases), edges);

  const ModelBounds bounds = model_bounds(model);
  if (bounds.b > spec.b || (degree_cap != 0 && bounds.d > degree_cap)) {
    throw InvalidArgument("generated model violates its bounds");
  }
  if (spec.min_girth > 2) {
    const auto g = girth(model);
    if (g && *g < spec.min_girth) throw InvalidArgument("generated model violates its girth bound");
  }
  if (spec.high_temperature && !(spec.b * static_cast<double>(bounds.d) < 1.0))
    throw InvalidArgument("generated model is not high temperature");

  Stream crng = rng.child("censoring");
  const auto hidden = censored_set(spec.censoring, n, crng);
  std::vector<std::size_t> visible;
  for (std::size_t v = 0; v < n; ++v) {
    if (std::find(hidden.begin(), hidden.end(), v) == hidden.end()) visible.push_back(v);
  }
  for (std::size_t h : hidden)
    if (h >= n) throw InvalidArgument("censored vertex out of range");
  if (visible.empty()) throw InvalidArgument("censoring hides every vertex");
  return Cmrf(std::move(model), std::move(visible));
}

}  // namespace cmrf
