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

#ifndef CMRF_GENERATORS_HPP
#define CMRF_GENERATORS_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cmrf/ising.hpp"
#include "cmrf/rng.hpp"

namespace cmrf {

enum class GraphKind { kPath, kCycle, kRandomTree, kRandomBoundedDegree, kGadget };
enum class CensorRule { kNone, kExplicit, kRandomFraction, kRandomCount, kGadgetBackground };

GraphKind parse_graph_kind(const std::string& name);
CensorRule parse_censor_rule(const std::string& name);
std::string to_string(GraphKind kind);
std::string to_string(CensorRule rule);

struct CensoringSpec {
  CensorRule rule = CensorRule::kNone;
  std::vector<std::size_t> censored;  // kExplicit
  double fraction = 0.0;              // kRandomFraction, rounded to the nearest count
  std::size_t count = 0;              // kRandomCount
};

struct GeneratorSpec {
  GraphKind kind = GraphKind::kPath;
  std::size_t n = 0;
  double b = 0.0;             // max |M_ij|
  std::size_t d = 0;          // max degree; 0 means unbounded (trees only)
  std::size_t min_girth = 0;  // random-bounded-degree
  double bias = 0.0;          // biases uniform on [-bias, bias]; must not exceed b
  double weight_floor = 0.5;  // |M_ij| uniform on [weight_floor * b, b]
  bool random_signs = true;
  bool high_temperature = false;  // require b d < 1
  std::size_t k = 1;              // gadget chain length
  CensoringSpec censoring;
};

/// Smallest vertex count of a d-regular graph with girth g (d >= 3).
std::size_t moore_bound(std::size_t d, std::size_t g);

/// Instantiates the spec and re-checks that the result lies in its class
/// (weights, biases, degree, girth). random-bounded-degree adds random edges
/// greedily up to degree d while keeping every cycle at least min_girth long;
/// it throws InvalidArgument when no d-regular graph of that girth exists on
/// n vertices. Gadget models default to gadget-background censoring (only the
/// focus vertices are visible).
Cmrf generate_model(const GeneratorSpec& spec, Stream rng);

}  // namespace cmrf

#endif  // CMRF_GENERATORS_HPP
