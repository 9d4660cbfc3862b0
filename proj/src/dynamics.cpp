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

#include "cmrf/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cmrf/errors.hpp"

namespace cmrf {

ConditionalEstimator::ConditionalEstimator(std::size_t m, std::size_t cap)
    : m_(m), cap_(cap), neighbors_(m), tables_(m, std::vector<double>{0.5}) {}

void ConditionalEstimator::set(std::size_t v, std::vector<std::size_t> neighbors,
                               std::vector<double> table) {
  if (v >= m_) throw InvalidArgument("estimator vertex out of range");
  if (neighbors.size() > cap_) {
    throw InvalidArgument("neighbor set of vertex " + std::to_string(v) + " has " +
                          std::to_string(neighbors.size()) + " entries, cap is " +
                          std::to_string(cap_));
  }
  for (std::size_t k = 0; k < neighbors.size(); ++k) {
    if (neighbors[k] >= m_ || neighbors[k] == v || (k > 0 && neighbors[k] <= neighbors[k - 1])) {
      throw InvalidArgument("neighbor set of vertex " + std::to_string(v) +
                            " must be sorted, in range and exclude v");
    }
  }
  if (table.size() != (std::size_t{1} << neighbors.size())) {
    throw InvalidArgument("conditional table size does not match neighbor set");
  }
  for (double p : table) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("conditional table entry outside [0, 1]");
  }
  neighbors_[v] = std::move(neighbors);
  tables_[v] = std::move(table);
}

double ConditionalEstimator::operator()(std::size_t v, std::span<const Spin> x) const {
  const auto& nb = neighbors_[v];
  std::uint64_t idx = 0;
  for (std::size_t k = 0; k < nb.size(); ++k) {
    if (x[nb[k]] > 0) idx |= std::uint64_t{1} << k;
  }
  return tables_[v][idx];
}

ConditionalEstimator exact_estimator(const IsingModel& model) {
  const std::size_t n = model.size();
  std::size_t cap = 0;
  for (std::size_t v = 0; v < n; ++v) cap = std::max(cap, model.neighbors(v).size());
  ConditionalEstimator f(n, std::max(cap, kDefaultEstimatorCap));
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<std::size_t> nb;
    std::vector<double> w;
    for (const Neighbor& e : model.neighbors(v)) {
      nb.push_back(e.vertex);
      w.push_back(e.weight);
    }
    std::vector<double> table(std::size_t{1} << nb.size());
    for (std::uint64_t idx = 0; idx < table.size(); ++idx) {
      double h = model.bias(v);
      for (std::size_t k = 0; k < nb.size(); ++k) h += ((idx >> k) & 1U) ? w[k] : -w[k];
      table[idx] = 1.0 / (1.0 + std::exp(-2.0 * h));
    }
    f.set(v, std::move(nb), std::move(table));
  }
  return f;
}

ConditionalEstimator table_estimator(const DistributionTable& table) {
  const std::size_t m = table.dimension();
  ConditionalEstimator f(m, std::max(m, kDefaultEstimatorCap));
  for (std::size_t v = 0; v < m; ++v) {
    std::vector<std::size_t> nb;
    for (std::size_t u = 0; u < m; ++u)
      if (u != v) nb.push_back(u);
    std::vector<double> out(std::size_t{1} << nb.size());
    const std::uint64_t low = (std::uint64_t{1} << v) - 1;
    for (std::uint64_t idx = 0; idx < out.size(); ++idx) {
      // Re-insert a zero bit at position v.
      const std::uint64_t base = (idx & low) | ((idx & ~low) << 1);
      const double down = table[base];
      const double up = table[base | (std::uint64_t{1} << v)];
      out[idx] = (up + down > 0.0) ? up / (up + down) : 0.5;
    }
    f.set(v, std::move(nb), std::move(out));
  }
  return f;
}

ConditionalEstimator shifted(const ConditionalEstimator& f, double shift) {
  ConditionalEstimator out(f.dimension(), f.cap());
  for (std::size_t v = 0; v < f.dimension(); ++v) {
    std::vector<double> t(f.table(v).begin(), f.table(v).end());
    for (double& p : t) p = std::clamp(p + shift, 0.0, 1.0);
    out.set(v, std::vector<std::size_t>(f.neighbors(v).begin(), f.neighbors(v).end()), std::move(t));
  }
  return out;
}

std::size_t default_steps(std::size_t m) {
  if (m <= 1) return 0;
  const double md = static_cast<double>(m);
  return static_cast<std::size_t>(std::ceil(md * std::log(md)));
}

SpinVector approximate_mcmc(const ConditionalEstimator& f, const SpinVector& x0, std::size_t steps,
                            Stream& rng) {
  if (x0.size() != f.dimension()) throw InvalidArgument("initial state length does not match estimator");
  SpinVector x = x0;
  auto xs = x.mutable_view();
  const std::size_t m = f.dimension();
  for (std::size_t t = 0; t < steps; ++t) {
    const std::size_t v = rng.index(m);
    const double p = rng.uniform();
    xs[v] = (p < f(v, xs)) ? 1 : -1;
  }
  return x;
}

SpinVector glauber_boundary(const IsingModel& model, const SpinVector& x0, std::size_t steps,
                            std::span<const std::size_t> window, Stream& rng) {
  if (x0.size() != model.size()) throw InvalidArgument("initial state length does not match model");
  std::vector<std::size_t> w(window.begin(), window.end());
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());
  if (w.empty()) throw InvalidArgument("glauber_boundary: empty update window");
  if (w.back() >= model.size()) throw InvalidArgument("glauber_boundary: window vertex out of range");
  SpinVector x = x0;
  auto xs = x.mutable_view();
  for (std::size_t t = 0; t < steps; ++t) {
    const std::size_t v = w[rng.index(w.size())];
    const double p = rng.uniform();
    xs[v] = (p < conditional_prob(model, v, xs)) ? 1 : -1;
  }
  return x;
}

CoupledTrace coupled_chains(const ConditionalEstimator& fa, const ConditionalEstimator& fb,
                            const SpinVector& x0a, const SpinVector& x0b, std::size_t steps,
                            Stream& rng, bool record) {
  const std::size_t m = fa.dimension();
  if (fb.dimension() != m) throw InvalidArgument("coupled_chains: estimators differ in dimension");
  if (x0a.size() != m || x0b.size() != m) {
    throw InvalidArgument("coupled_chains: initial state length does not match estimators");
  }
  CoupledTrace out{x0a, x0b, {}};
  auto a = out.first.mutable_view();
  auto b = out.second.mutable_view();
  std::size_t dist = hamming(a, b);
  if (record) out.steps.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    const std::size_t v = rng.index(m);
    const double p = rng.uniform();
    const bool before = a[v] != b[v];
    a[v] = (p < fa(v, a)) ? 1 : -1;
    b[v] = (p < fb(v, b)) ? 1 : -1;
    const bool after = a[v] != b[v];
    dist = dist - before + after;
    if (record) out.steps.push_back({t, v, dist});
  }
  return out;
}

}  // namespace cmrf
