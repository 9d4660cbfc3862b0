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

#ifndef CMRF_GADGETS_HPP
#define CMRF_GADGETS_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "cmrf/exact.hpp"
#include "cmrf/ising.hpp"
#include "cmrf/rng.hpp"
#include "cmrf/spin.hpp"

namespace cmrf {

/// sinh^4(2b) / (2 cosh^4(2b) - sinh^4(2b)); b > 0.
double delta_b(double b);

/// 128 [2 cosh^4(2b) - sinh^4(2b)], the partition function of H_b.
double parity_gadget_partition(double b);

struct ParityGadget {
  IsingModel model;
  std::vector<std::size_t> focus;  // sorted global indices of the non-identified v vertices
  double b = 0.0;
  std::size_t k = 1;

  /// The gadget with every background vertex censored.
  Cmrf cmrf() const { return Cmrf(model, focus); }
};

/// H_b: v1..v4 = 0..3, u1..u4 = 4..7, weight +b on v_i u_i and -b on v_i u_j
/// (i != j), zero biases.
ParityGadget build_parity_gadget(double b);

/// H_{b[k]}: k copies of H_b where copy c's v4 is copy c+1's v1. Copy 0 keeps
/// indices 0..7; copy c >= 1 uses v1 = previous v4 and fresh indices
/// 8 + 7(c-1) + {0..6} for v2, v3, v4, u1..u4. 7k + 1 vertices.
ParityGadget build_chained_parity(double b, std::size_t k);

/// Global index of vertex v_i (i in 1..4) of copy c in build_chained_parity.
std::size_t chained_v_index(std::size_t c, std::size_t i);

/// 2^{-(2k+2)} [1 + delta_b^k prod x] over the focus coordinates.
DistributionTable parity_gadget_law(double b, std::size_t k);

struct PlantedParity {
  std::size_t n = 0;
  std::vector<std::size_t> support;  // sorted, nonempty
  double eta = 0.0;                  // in [0, 1]

  void validate() const;
};

/// Law 2^{-n} [1 + eta prod_{i in S} x_i] as a table (n within the enumeration cap).
DistributionTable planted_parity_law(const PlantedParity& pp);

SpinVector sample_planted_parity(const PlantedParity& pp, Stream& rng);

/// Draw from the planted law, then overwrite each block (disjoint from each
/// other) with an independent draw of a (|block|)-coordinate planted parity of
/// the same eta.
SpinVector sample_with_decoy_blocks(const PlantedParity& pp, const std::vector<std::vector<std::size_t>>& blocks,
                                    Stream& rng);

enum class ParityRoute { kAuto, kWalshHadamard, kDirect };

struct ParityRecoveryOptions {
  ParityRoute route = ParityRoute::kAuto;
  std::size_t max_k = 1;                  // larger k needs an explicit opt-in
  std::size_t max_candidates = 5'000'000; // C(n, 2k+2) budget
  std::size_t max_transform_dimension = 24;
  unsigned workers = 0;
};

struct ParityRecovery {
  std::vector<std::size_t> support;
  double bias = 0.0;  // signed empirical mean of prod_{i in support} x_i
  std::size_t candidates = 0;
  ParityRoute route = ParityRoute::kAuto;
};

/// The (2k+2)-subset with the largest |empirical parity bias|; ties go to the
/// lexicographically smallest subset. Both routes work on exact integer sums.
ParityRecovery recover_parity_support(const SampleSet& samples, std::size_t k, const ParityRecoveryOptions& opts = {});

/// 4 sqrt(ln C(n, 2k+2) / m): null fluctuation scale of the maximal bias.
double parity_null_threshold(std::size_t n, std::size_t k, std::size_t m);

/// eta >= 8 sqrt(ln C(n, 2k+2) / m)
bool parity_separation_holds(double eta, std::size_t n, std::size_t k, std::size_t m);

/// J_delta: edge (0,1) = -delta, edges (0,2), (1,2) = -2 delta, biases
/// delta, delta, 2 delta. Vertex 2 is the NAND of vertices 0 and 1 (+1 = true).
IsingModel build_nand_gadget(double delta);

struct Fused {
  IsingModel model;
  std::size_t output;  // the new vertex, index = old size
};

/// Adds a copy of J_delta on (v, u, new vertex). v != u.
Fused attach_nand(const IsingModel& model, std::size_t v, std::size_t u, double delta);

/// Nodes 0..inputs-1 are inputs; gate g is node inputs + g and reads two
/// strictly earlier nodes.
struct NandCircuit {
  std::size_t inputs = 0;
  std::vector<std::pair<std::size_t, std::size_t>> gates;
  std::vector<std::size_t> outputs;

  std::size_t nodes() const { return inputs + gates.size(); }
  /// Throws InvalidArgument on forward references, self-NAND or bad outputs.
  void validate() const;
  /// Values of every node for the given inputs (+1 = true).
  std::vector<Spin> evaluate(std::span<const Spin> in) const;
};

/// a XOR b from four NANDs; outputs = {a, b, result} when `with_inputs`.
NandCircuit xor_circuit(bool with_inputs = false);

struct CompileOptions {
  double delta = 3.0;
  bool delta_from_size = false;  // use delta = 2 * nodes instead

  double effective_delta(const NandCircuit& c) const;
};

/// Inputs become isolated bias-0 vertices; each gate is attached in order and
/// takes the node's index. Visible set = outputs (sorted, deduplicated).
Cmrf compile_circuit(const NandCircuit& circuit, const CompileOptions& opts = {});

/// Law of the (sorted, deduplicated) outputs under uniform inputs.
DistributionTable ideal_circuit_law(const NandCircuit& circuit);

}  // namespace cmrf

#endif  // CMRF_GADGETS_HPP
