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

#include "cmrf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>

#include "cmrf/errors.hpp"
#include "cmrf/parallel.hpp"

namespace cmrf {

namespace {

constexpr double kFlowEps = 1e-17;
constexpr double kUnbounded = 4.0;  // exceeds any total mass routed in a phase
constexpr double kGapTolerance = 1e-9;

std::vector<double> pruned(const DistributionTable& t, double below, double& dropped) {
  std::vector<double> out(t.probs().begin(), t.probs().end());
  double kept = 0.0;
  for (double& p : out) {
    if (p < below) {
      dropped += p;
      p = 0.0;
    }
    kept += p;
  }
  for (double& p : out) p /= kept;
  return out;
}

// Dinic max-flow on a small explicit graph with real capacities.
class MaxFlow {
 public:
  struct Arc {
    std::uint32_t to;
    std::uint32_t rev;
    double cap;
  };

  explicit MaxFlow(std::size_t nodes) : adj_(nodes), level_(nodes), it_(nodes) {}

  std::size_t add(std::uint32_t from, std::uint32_t to, double cap) {
    adj_[from].push_back({to, static_cast<std::uint32_t>(adj_[to].size()), cap});
    adj_[to].push_back({from, static_cast<std::uint32_t>(adj_[from].size() - 1), 0.0});
    return adj_[from].size() - 1;
  }

  const Arc& arc(std::uint32_t from, std::size_t k) const { return adj_[from][k]; }

  void run(std::uint32_t s, std::uint32_t t) {
    while (bfs(s, t)) {
      std::fill(it_.begin(), it_.end(), 0);
      while (push(s, t, kUnbounded) > kFlowEps) {
      }
    }
  }

 private:
  bool bfs(std::uint32_t s, std::uint32_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<std::uint32_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const auto a = q.front();
      q.pop();
      for (const Arc& e : adj_[a]) {
        if (e.cap > kFlowEps && level_[e.to] < 0) {
          level_[e.to] = level_[a] + 1;
          q.push(e.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  double push(std::uint32_t a, std::uint32_t t, double limit) {
    if (a == t) return limit;
    for (std::size_t& k = it_[a]; k < adj_[a].size(); ++k) {
      Arc& e = adj_[a][k];
      if (e.cap <= kFlowEps || level_[e.to] != level_[a] + 1) continue;
      const double got = push(e.to, t, std::min(limit, e.cap));
      if (got > kFlowEps) {
        e.cap -= got;
        adj_[e.to][e.rev].cap += got;
        return got;
      }
    }
    return 0.0;
  }

  std::vector<std::vector<Arc>> adj_;
  std::vector<int> level_;
  std::vector<std::size_t> it_;
};

class HypercubeTransport {
 public:
  HypercubeTransport(std::size_t m, std::vector<double> excess)
      : m_(m), n_(std::size_t{1} << m), flow_(n_ * m, 0.0), pi_(n_, 0), excess_(std::move(excess)) {}

  std::size_t solve() {
    std::size_t phases = 0;
    const std::size_t limit = 4 * (m_ + 2);
    while (has_work()) {
      if (++phases > limit) {
        throw ConvergenceError("earthmover flow did not terminate", remaining());
      }
      if (!raise_potentials()) break;
      route();
    }
    return phases;
  }

  double cost() const {
    double c = 0.0;
    for (double f : flow_) c += f;
    return c;
  }

  double dual(const std::vector<double>& p, const std::vector<double>& q) const {
    double d = 0.0;
    for (std::size_t x = 0; x < n_; ++x) d += static_cast<double>(pi_[x]) * (q[x] - p[x]);
    return d;
  }

  double remaining() const {
    double r = 0.0;
    for (double e : excess_) r += std::max(e, 0.0);
    return r;
  }

 private:
  bool has_work() const {
    bool pos = false, neg = false;
    for (double e : excess_) {
      pos |= e > kFlowEps;
      neg |= e < -kFlowEps;
    }
    return pos && neg;
  }

  // Reduced cost of moving one more unit x -> y across dimension i, either by
  // adding flow on x->y or by cancelling flow on y->x. Returns the cheaper
  // available option.
  long reduced(std::size_t x, std::size_t y, std::size_t i, bool& cancel) const {
    cancel = flow_[y * m_ + i] > kFlowEps;
    const long base = pi_[x] - pi_[y];
    return cancel ? base - 1 : base + 1;
  }

  bool raise_potentials() {
    constexpr long kInf = std::numeric_limits<long>::max();
    std::vector<long> dist(n_, kInf);
    using Item = std::pair<long, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (std::size_t x = 0; x < n_; ++x) {
      if (excess_[x] > kFlowEps) {
        dist[x] = 0;
        heap.push({0, x});
      }
    }
    long cutoff = kInf;
    while (!heap.empty()) {
      auto [d, x] = heap.top();
      heap.pop();
      if (d != dist[x]) continue;
      if (d >= cutoff) break;
      if (excess_[x] < -kFlowEps) {
        cutoff = d;
        break;
      }
      for (std::size_t i = 0; i < m_; ++i) {
        const std::size_t y = x ^ (std::size_t{1} << i);
        bool cancel = false;
        const long rc = reduced(x, y, i, cancel);
        if (rc < 0) throw ConvergenceError("negative reduced cost in earthmover flow", static_cast<double>(rc));
        if (d + rc < dist[y]) {
          dist[y] = d + rc;
          heap.push({dist[y], y});
        }
      }
    }
    if (cutoff == kInf) return false;
    for (std::size_t x = 0; x < n_; ++x) pi_[x] += std::min(dist[x], cutoff);
    return true;
  }

  void route() {
    const auto src = static_cast<std::uint32_t>(n_);
    const auto dst = static_cast<std::uint32_t>(n_ + 1);
    MaxFlow g(n_ + 2);
    struct Tracked {
      std::uint32_t from;
      std::size_t slot;
      std::size_t flow_index;
      bool cancel;
      double cap;
    };
    std::vector<Tracked> tracked;
    std::vector<std::size_t> supply_slot(n_, SIZE_MAX), demand_slot(n_, SIZE_MAX);
    for (std::size_t x = 0; x < n_; ++x) {
      const auto xu = static_cast<std::uint32_t>(x);
      if (excess_[x] > kFlowEps) supply_slot[x] = g.add(src, xu, excess_[x]);
      if (excess_[x] < -kFlowEps) demand_slot[x] = g.add(xu, dst, -excess_[x]);
      for (std::size_t i = 0; i < m_; ++i) {
        const std::size_t y = x ^ (std::size_t{1} << i);
        bool cancel = false;
        if (reduced(x, y, i, cancel) != 0) continue;
        const double cap = cancel ? flow_[y * m_ + i] : kUnbounded;
        const std::size_t idx = cancel ? y * m_ + i : x * m_ + i;
        tracked.push_back({xu, g.add(xu, static_cast<std::uint32_t>(y), cap), idx, cancel, cap});
      }
    }
    g.run(src, dst);
    for (const Tracked& t : tracked) {
      const double moved = t.cap - g.arc(t.from, t.slot).cap;
      if (moved == 0.0) continue;
      flow_[t.flow_index] += t.cancel ? -moved : moved;
      if (t.cancel && flow_[t.flow_index] < kFlowEps) flow_[t.flow_index] = 0.0;
    }
    for (std::size_t x = 0; x < n_; ++x) {
      if (supply_slot[x] != SIZE_MAX) excess_[x] = g.arc(src, supply_slot[x]).cap;
      if (demand_slot[x] != SIZE_MAX) excess_[x] = -g.arc(static_cast<std::uint32_t>(x), demand_slot[x]).cap;
    }
  }

  std::size_t m_;
  std::size_t n_;
  std::vector<double> flow_;  // flow_[x * m + i]: flow on x -> x ^ (1 << i)
  std::vector<long> pi_;
  std::vector<double> excess_;
};

}  // namespace

double tv_distance(const DistributionTable& p, const DistributionTable& q) {
  if (p.dimension() != q.dimension()) throw InvalidArgument("tv_distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.states(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

EmdResult emd_solve(const DistributionTable& p, const DistributionTable& q, EmdOptions opts) {
  if (p.dimension() != q.dimension()) throw InvalidArgument("emd_exact: dimension mismatch");
  const std::size_t m = p.dimension();
  if (m > opts.max_dimension) {
    throw CapExceeded("emd_exact: " + std::to_string(m) + " coordinates exceeds flow cap " +
                      std::to_string(opts.max_dimension));
  }
  EmdResult out;
  const auto pp = pruned(p, opts.prune_below, out.pruned_mass);
  const auto qq = pruned(q, opts.prune_below, out.pruned_mass);
  std::vector<double> excess(pp.size());
  for (std::size_t x = 0; x < pp.size(); ++x) excess[x] = pp[x] - qq[x];
  HypercubeTransport solver(m, std::move(excess));
  out.phases = solver.solve();
  out.value = solver.cost();
  out.dual_bound = solver.dual(pp, qq);
  const double gap = out.value - out.dual_bound;
  if (std::abs(gap) > kGapTolerance) {
    throw ConvergenceError("earthmover optimality gap " + std::to_string(gap), gap);
  }
  return out;
}

DistributionTable empirical_distribution(const SampleSet& samples, std::size_t cap) {
  if (samples.empty()) throw InvalidArgument("empirical_distribution: no samples");
  const std::size_t m = samples.dimension();
  if (m > cap) {
    throw CapExceeded("empirical_distribution: " + std::to_string(m) + " coordinates exceeds cap " +
                      std::to_string(cap));
  }
  std::vector<double> counts(std::size_t{1} << m, 0.0);
  for (std::size_t i = 0; i < samples.size(); ++i) counts[samples.index(i)] += 1.0;
  const double total = static_cast<double>(samples.size());
  for (double& c : counts) c /= total;
  return DistributionTable(m, std::move(counts), cap);
}

DistortionReport distortion_estimate(const Learner& learner, const DistributionTable& truth,
                                     std::size_t streams, std::size_t outputs_per_stream,
                                     const Stream& rng, DistortionOptions opts) {
  if (streams == 0 || outputs_per_stream == 0) {
    throw InvalidArgument("distortion_estimate: streams and outputs must be positive");
  }
  if (truth.dimension() > opts.emd.max_dimension) {
    throw CapExceeded("distortion_estimate: visible dimension exceeds earthmover cap");
  }
  DistortionReport out;
  out.streams = streams;
  out.outputs_per_stream = outputs_per_stream;
  out.per_stream.assign(streams, 0.0);
  std::vector<std::size_t> consumed(streams, 0);
  parallel_for(
      streams,
      [&](std::size_t k) {
        TableSource source(truth, rng.child("samples", k));
        Stream internal = rng.child("learner", k);
        OutputSampler sampler = learner(source, internal);
        consumed[k] = source.drawn();
        Stream draws = rng.child("outputs", k);
        SampleSet outputs(truth.dimension());
        outputs.reserve(outputs_per_stream);
        for (std::size_t r = 0; r < outputs_per_stream; ++r) outputs.push_back(sampler(draws));
        out.per_stream[k] = emd_exact(empirical_distribution(outputs), truth, opts.emd);
      },
      opts.workers);
  double sum = 0.0;
  for (double d : out.per_stream) sum += d;
  out.mean = sum / static_cast<double>(streams);
  if (streams > 1) {
    double ss = 0.0;
    for (double d : out.per_stream) ss += (d - out.mean) * (d - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(streams - 1));
  }
  out.samples_per_stream = *std::max_element(consumed.begin(), consumed.end());
  return out;
}

DistortionReport distortion_estimate(const Learner& learner, const Cmrf& cmrf, std::size_t streams,
                                     std::size_t outputs_per_stream, const Stream& rng,
                                     DistortionOptions opts) {
  return distortion_estimate(learner, visible_marginal(cmrf), streams, outputs_per_stream, rng, opts);
}

}  // namespace cmrf
