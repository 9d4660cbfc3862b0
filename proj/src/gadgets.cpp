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

#include "cmrf/gadgets.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include "cmrf/errors.hpp"
#include "cmrf/parallel.hpp"

namespace cmrf {

namespace {

constexpr std::size_t kLawCap = 24;
constexpr std::size_t kCircuitInputCap = 20;

double parity_sign(std::uint64_t state, std::uint64_t mask) {
  // prod x_i over mask, bit set <=> +1
  return (std::popcount(~state & mask) & 1U) ? -1.0 : 1.0;
}

double log_choose(std::size_t n, std::size_t t) {
  return std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(t) + 1) -
         std::lgamma(static_cast<double>(n - t) + 1);
}

// All t-subsets of [n] as bitmasks, lexicographic in their sorted elements.
std::vector<std::uint64_t> combinations(std::size_t n, std::size_t t) {
  std::vector<std::uint64_t> out;
  std::vector<std::size_t> c(t);
  for (std::size_t i = 0; i < t; ++i) c[i] = i;
  while (true) {
    std::uint64_t mask = 0;
    for (std::size_t i : c) mask |= std::uint64_t{1} << i;
    out.push_back(mask);
    std::size_t i = t;
    while (i > 0 && c[i - 1] == n - t + i - 1) --i;
    if (i == 0) break;
    ++c[i - 1];
    for (std::size_t j = i; j < t; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

std::vector<std::size_t> members(std::uint64_t mask) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; mask; ++i, mask >>= 1)
    if (mask & 1U) out.push_back(i);
  return out;
}

void fwht(std::vector<std::int64_t>& a) {
  for (std::size_t h = 1; h < a.size(); h <<= 1)
    for (std::size_t i = 0; i < a.size(); i += h << 1)
      for (std::size_t j = i; j < i + h; ++j) {
        const std::int64_t x = a[j], y = a[j + h];
        a[j] = x + y;
        a[j + h] = x - y;
      }
}

}  // namespace

double delta_b(double b) {
  if (!(b > 0.0)) throw InvalidArgument("delta_b requires b > 0");
  const double s = std::pow(std::sinh(2 * b), 4);
  const double c = std::pow(std::cosh(2 * b), 4);
  return s / (2 * c - s);
}

double parity_gadget_partition(double b) {
  return 128.0 * (2 * std::pow(std::cosh(2 * b), 4) - std::pow(std::sinh(2 * b), 4));
}

ParityGadget build_parity_gadget(double b) { return build_chained_parity(b, 1); }

std::size_t chained_v_index(std::size_t c, std::size_t i) {
  if (i < 1 || i > 4) throw InvalidArgument("gadget vertex index must be 1..4");
  if (c == 0) return i - 1;
  if (i == 1) return chained_v_index(c - 1, 4);
  return 8 + 7 * (c - 1) + (i - 2);
}

ParityGadget build_chained_parity(double b, std::size_t k) {
  if (!(b > 0.0)) throw InvalidArgument("parity gadget requires b > 0");
  if (k == 0) throw InvalidArgument("parity gadget chain length must be at least 1");
  const std::size_t n = 7 * k + 1;
  std::vector<Edge> edges;
  std::vector<std::size_t> focus;
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t u0 = c == 0 ? 4 : 8 + 7 * (c - 1) + 3;
    for (std::size_t i = 1; i <= 4; ++i)
      for (std::size_t j = 1; j <= 4; ++j) edges.push_back({chained_v_index(c, i), u0 + j - 1, i == j ? b : -b});
    for (std::size_t i = 1; i <= 4; ++i) {
      const bool shared = (i == 1 && c > 0) || (i == 4 && c + 1 < k);
      if (!shared) focus.push_back(chained_v_index(c, i));
    }
  }
  std::sort(focus.begin(), focus.end());
  return {IsingModel::from_edges(n, std::vector<double>(n, 0.0), edges), std::move(focus), b, k};
}

DistributionTable parity_gadget_law(double b, std::size_t k) {
  const double eta = std::pow(delta_b(b), static_cast<double>(k));
  PlantedParity pp{2 * k + 2, {}, eta};
  for (std::size_t i = 0; i < pp.n; ++i) pp.support.push_back(i);
  return planted_parity_law(pp);
}

void PlantedParity::validate() const {
  if (support.empty()) throw InvalidArgument("planted parity support must be nonempty");
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] >= n) throw InvalidArgument("planted parity support out of range");
    if (i > 0 && support[i] <= support[i - 1]) throw InvalidArgument("planted parity support must be sorted and unique");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("planted parity bias must lie in [0, 1]");
}

DistributionTable planted_parity_law(const PlantedParity& pp) {
  pp.validate();
  if (pp.n > kLawCap) throw CapExceeded("planted parity law over more than 24 coordinates");
  std::uint64_t mask = 0;
  for (std::size_t i : pp.support) mask |= std::uint64_t{1} << i;
  const std::size_t states = std::size_t{1} << pp.n;
  const double base = 1.0 / static_cast<double>(states);
  std::vector<double> p(states);
  for (std::uint64_t s = 0; s < states; ++s) p[s] = base * (1.0 + pp.eta * parity_sign(s, mask));
  return DistributionTable(pp.n, std::move(p), kLawCap);
}

SpinVector sample_planted_parity(const PlantedParity& pp, Stream& rng) {
  pp.validate();
  const Spin sigma = rng.bernoulli((1.0 + pp.eta) / 2) ? 1 : -1;
  std::vector<Spin> x(pp.n);
  for (auto& s : x) s = rng.bernoulli(0.5) ? 1 : -1;
  int prod = 1;
  for (std::size_t i : pp.support) prod *= x[i];
  if (prod != sigma) x[pp.support.front()] = static_cast<Spin>(-x[pp.support.front()]);
  return SpinVector(x);
}

SpinVector sample_with_decoy_blocks(const PlantedParity& pp, const std::vector<std::vector<std::size_t>>& blocks,
                                    Stream& rng) {
  std::vector<bool> used(pp.n, false);
  for (const auto& block : blocks) {
    if (block.empty()) throw InvalidArgument("decoy block must be nonempty");
    for (std::size_t i : block) {
      if (i >= pp.n) throw InvalidArgument("decoy block index out of range");
      if (used[i]) throw InvalidArgument("decoy blocks must be disjoint");
      used[i] = true;
    }
  }
  SpinVector base = sample_planted_parity(pp, rng);
  std::vector<Spin> x(base.view().begin(), base.view().end());
  for (const auto& block : blocks) {
    PlantedParity local{block.size(), {}, pp.eta};
    for (std::size_t i = 0; i < block.size(); ++i) local.support.push_back(i);
    const SpinVector y = sample_planted_parity(local, rng);
    for (std::size_t i = 0; i < block.size(); ++i) x[block[i]] = y[i];
  }
  return SpinVector(x);
}

ParityRecovery recover_parity_support(const SampleSet& samples, std::size_t k, const ParityRecoveryOptions& opts) {
  const std::size_t n = samples.dimension();
  const std::size_t t = 2 * k + 2;
  if (samples.size() == 0) throw InvalidArgument("parity recovery needs samples");
  if (k > opts.max_k) {
    throw CapExceeded("parity recovery with k = " + std::to_string(k) + " exceeds the allowed k = " +
                      std::to_string(opts.max_k));
  }
  if (t > n) throw InvalidArgument("parity support larger than the dimension");
  if (log_choose(n, t) > std::log(static_cast<double>(opts.max_candidates))) {
    throw CapExceeded("parity recovery: C(" + std::to_string(n) + ", " + std::to_string(t) +
                      ") candidates exceed the budget of " + std::to_string(opts.max_candidates));
  }
  ParityRoute route = opts.route;
  if (route == ParityRoute::kAuto) {
    route = n <= opts.max_transform_dimension ? ParityRoute::kWalshHadamard : ParityRoute::kDirect;
  }
  if (route == ParityRoute::kWalshHadamard && n > opts.max_transform_dimension) {
    throw CapExceeded("Walsh-Hadamard route over " + std::to_string(n) + " coordinates");
  }

  const auto candidates = combinations(n, t);
  std::vector<std::int64_t> sums(candidates.size());
  if (route == ParityRoute::kWalshHadamard) {
    std::vector<std::int64_t> spectrum(std::size_t{1} << n, 0);
    for (std::size_t s = 0; s < samples.size(); ++s) ++spectrum[samples.index(s)];
    fwht(spectrum);
    // spectrum[S] = sum (-1)^{|x & S|}; prod x_i = (-1)^{|S| - |x & S|}
    const std::int64_t sign = (t & 1U) ? -1 : 1;
    for (std::size_t c = 0; c < candidates.size(); ++c) sums[c] = sign * spectrum[candidates[c]];
  } else {
    std::vector<std::uint64_t> states(samples.size());
    for (std::size_t s = 0; s < samples.size(); ++s) states[s] = samples.index(s);
    parallel_for(
        candidates.size(),
        [&](std::size_t c) {
          std::int64_t acc = 0;
          for (std::uint64_t x : states) acc += (std::popcount(~x & candidates[c]) & 1U) ? -1 : 1;
          sums[c] = acc;
        },
        opts.workers);
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < candidates.size(); ++c)
    if (std::llabs(sums[c]) > std::llabs(sums[best])) best = c;
  return {members(candidates[best]), static_cast<double>(sums[best]) / static_cast<double>(samples.size()),
          candidates.size(), route};
}

double parity_null_threshold(std::size_t n, std::size_t k, std::size_t m) {
  if (2 * k + 2 > n || m == 0) throw InvalidArgument("parity threshold needs 2k+2 <= n and m > 0");
  return 4.0 * std::sqrt(log_choose(n, 2 * k + 2) / static_cast<double>(m));
}

bool parity_separation_holds(double eta, std::size_t n, std::size_t k, std::size_t m) {
  return eta >= 2.0 * parity_null_threshold(n, k, m);
}

IsingModel build_nand_gadget(double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("NAND gadget requires delta > 0");
  return IsingModel::from_edges(3, {delta, delta, 2 * delta},
                                {{0, 1, -delta}, {0, 2, -2 * delta}, {1, 2, -2 * delta}});
}

Fused attach_nand(const IsingModel& model, std::size_t v, std::size_t u, double delta) {
  const std::size_t n = model.size();
  if (v >= n || u >= n) throw InvalidArgument("attach_nand: vertex out of range");
  if (v == u) throw InvalidArgument("attach_nand: operands must differ");
  if (!(delta > 0.0)) throw InvalidArgument("attach_nand requires delta > 0");
  auto w = model.weight_table();
  for (auto& row : w) row.push_back(0.0);
  w.emplace_back(n + 1, 0.0);
  std::vector<double> theta(model.biases().begin(), model.biases().end());
  theta.push_back(2 * delta);
  theta[v] += delta;
  theta[u] += delta;
  w[v][u] -= delta;
  w[u][v] -= delta;
  w[v][n] = w[n][v] = -2 * delta;
  w[u][n] = w[n][u] = -2 * delta;
  return {IsingModel(w, std::move(theta)), n};
}

void NandCircuit::validate() const {
  if (inputs == 0) throw InvalidArgument("circuit needs at least one input");
  for (std::size_t g = 0; g < gates.size(); ++g) {
    const auto [a, b] = gates[g];
    if (a >= inputs + g || b >= inputs + g) {
      throw InvalidArgument("gate " + std::to_string(g) + " reads a node that is not earlier");
    }
    if (a == b) throw InvalidArgument("gate " + std::to_string(g) + " reads the same node twice");
  }
  if (outputs.empty()) throw InvalidArgument("circuit needs at least one output");
  for (std::size_t o : outputs)
    if (o >= nodes()) throw InvalidArgument("output " + std::to_string(o) + " is not a node");
}

std::vector<Spin> NandCircuit::evaluate(std::span<const Spin> in) const {
  if (in.size() != inputs) throw InvalidArgument("circuit input length mismatch");
  std::vector<Spin> val(in.begin(), in.end());
  for (const auto& [a, b] : gates) val.push_back((val[a] > 0 && val[b] > 0) ? -1 : 1);
  return val;
}

NandCircuit xor_circuit(bool with_inputs) {
  NandCircuit c;
  c.inputs = 2;
  c.gates = {{0, 1}, {0, 2}, {1, 2}, {3, 4}};
  c.outputs = with_inputs ? std::vector<std::size_t>{0, 1, 5} : std::vector<std::size_t>{5};
  return c;
}

double CompileOptions::effective_delta(const NandCircuit& c) const {
  return delta_from_size ? 2.0 * static_cast<double>(c.nodes()) : delta;
}

Cmrf compile_circuit(const NandCircuit& circuit, const CompileOptions& opts) {
  circuit.validate();
  const double delta = opts.effective_delta(circuit);
  IsingModel model = IsingModel::zero(circuit.inputs);
  for (const auto& [a, b] : circuit.gates) model = attach_nand(model, a, b, delta).model;
  std::vector<std::size_t> visible = circuit.outputs;
  std::sort(visible.begin(), visible.end());
  visible.erase(std::unique(visible.begin(), visible.end()), visible.end());
  return Cmrf(std::move(model), std::move(visible));
}

DistributionTable ideal_circuit_law(const NandCircuit& circuit) {
  circuit.validate();
  if (circuit.inputs > kCircuitInputCap) throw CapExceeded("ideal circuit law over more than 20 inputs");
  std::vector<std::size_t> visible = circuit.outputs;
  std::sort(visible.begin(), visible.end());
  visible.erase(std::unique(visible.begin(), visible.end()), visible.end());
  if (visible.size() > kLawCap) throw CapExceeded("ideal circuit law over more than 24 outputs");
  std::vector<double> p(std::size_t{1} << visible.size(), 0.0);
  const double w = std::ldexp(1.0, -static_cast<int>(circuit.inputs));
  std::vector<Spin> in(circuit.inputs);
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << circuit.inputs); ++s) {
    for (std::size_t i = 0; i < circuit.inputs; ++i) in[i] = ((s >> i) & 1U) ? 1 : -1;
    const auto val = circuit.evaluate(in);
    std::uint64_t out = 0;
    for (std::size_t k = 0; k < visible.size(); ++k)
      if (val[visible[k]] > 0) out |= std::uint64_t{1} << k;
    p[out] += w;
  }
  return DistributionTable(visible.size(), std::move(p), kLawCap);
}

}  // namespace cmrf
