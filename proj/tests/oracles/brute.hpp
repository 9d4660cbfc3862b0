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

#ifndef CMRF_TESTS_ORACLES_BRUTE_HPP
#define CMRF_TESTS_ORACLES_BRUTE_HPP

// Test-side reference computations. Deliberately naive and independent of
// the library's enumeration code.

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cmrf/ising.hpp"
#include "cmrf/rng.hpp"
#include "cmrf/spin.hpp"

namespace oracle {

inline std::vector<cmrf::Spin> decode(std::uint64_t idx, std::size_t n) {
  std::vector<cmrf::Spin> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = ((idx >> i) & 1U) ? 1 : -1;
  return x;
}

// Energy from the dense double sum theta.x + 1/2 sum_ij M_ij x_i x_j.
inline long double energy(const cmrf::IsingModel& m, const std::vector<cmrf::Spin>& x) {
  long double e = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    e += m.bias(i) * x[i];
    for (std::size_t j = 0; j < m.size(); ++j) e += 0.5L * m.weight(i, j) * x[i] * x[j];
  }
  return e;
}

inline std::vector<double> probs(const cmrf::IsingModel& m) {
  const std::size_t states = std::size_t{1} << m.size();
  std::vector<long double> w(states);
  long double mx = -1e300L;
  for (std::uint64_t s = 0; s < states; ++s) {
    w[s] = energy(m, decode(s, m.size()));
    mx = std::max(mx, w[s]);
  }
  long double z = 0;
  for (auto& v : w) {
    v = std::exp(v - mx);
    z += v;
  }
  std::vector<double> out(states);
  for (std::uint64_t s = 0; s < states; ++s) out[s] = static_cast<double>(w[s] / z);
  return out;
}

// Marginal on `keep` (in the given order) of a full table over n coordinates.
inline std::vector<double> marginal(const std::vector<double>& p, const std::vector<std::size_t>& keep) {
  std::vector<double> out(std::size_t{1} << keep.size(), 0.0);
  for (std::uint64_t s = 0; s < p.size(); ++s) {
    std::uint64_t t = 0;
    for (std::size_t k = 0; k < keep.size(); ++k) t |= ((s >> keep[k]) & 1U) << k;
    out[t] += p[s];
  }
  return out;
}

// P[X_c = +1 | X_w = val for (w, val) in fixed] over a full table.
inline double conditional(const std::vector<double>& p, std::size_t c,
                          const std::vector<std::pair<std::size_t, int>>& fixed) {
  long double num = 0, den = 0;
  for (std::uint64_t s = 0; s < p.size(); ++s) {
    bool ok = true;
    for (auto [w, val] : fixed) {
      if ((((s >> w) & 1U) ? 1 : -1) != val) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    den += p[s];
    if ((s >> c) & 1U) num += p[s];
  }
  return static_cast<double>(num / den);
}

// Random model: each pair becomes an edge with probability `density`, weight
// uniform in [-b, b]; biases uniform in [-b, b].
inline cmrf::IsingModel random_model(cmrf::Stream& rng, std::size_t n, double b, double density) {
  std::vector<double> biases(n);
  for (auto& t : biases) t = (2 * rng.uniform() - 1) * b;
  std::vector<cmrf::Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.uniform() < density) edges.push_back({i, j, (2 * rng.uniform() - 1) * b});
  return cmrf::IsingModel::from_edges(n, biases, edges);
}

// (I - N)^{-1} for N = |M| restricted to vertices outside `conditioned`.
inline Eigen::MatrixXd neumann_dense(const cmrf::IsingModel& m, const std::vector<std::size_t>& conditioned) {
  const auto n = static_cast<Eigen::Index>(m.size());
  std::vector<bool> in_s(m.size(), false);
  for (auto s : conditioned) in_s[s] = true;
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (!in_s[i] && !in_s[j]) N(i, j) = std::abs(m.weight(i, j));
  return (Eigen::MatrixXd::Identity(n, n) - N).inverse();
}

}  // namespace oracle

#endif  // CMRF_TESTS_ORACLES_BRUTE_HPP
