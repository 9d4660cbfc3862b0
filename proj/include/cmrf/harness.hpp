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

#ifndef CMRF_HARNESS_HPP
#define CMRF_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cmrf/generators.hpp"
#include "cmrf/ising.hpp"
#include "json.hpp"

namespace cmrf {

/// Invalid experiment configuration (exit status 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind {
  kOracleCheck,
  kDynamicsCheck,
  kHighTempLearn,
  kHighGirthLearn,
  kGadgetVerify,
  kParityRecover,
  kCircuitCompile,
  kBruteLearn,
  kDistortionEval,
  kAcceptance,
};

ExperimentKind parse_experiment_kind(const std::string& name);
std::string to_string(ExperimentKind kind);

struct Budgets {
  std::size_t samples = 0;       // 0: the kind's default
  double mcmc_multiplier = 1.0;
  std::size_t streams = 5;       // K
  std::size_t outputs = 10000;   // R
  std::size_t runs = 100000;
  std::size_t trials = 20;
};

/// One experiment. The JSON form is
///
///   {"kind": "...", "seed": 7, "name": "...", "model": {...} | "path",
///    "budgets": {...}, "tolerances": {...}, "params": {...}}
///
/// "seed" is mandatory. "model" is either a model file path or a generator
/// object {"generator": "cycle", "n": 12, "b": 0.2, ...}.
struct ExperimentConfig {
  std::string name;
  ExperimentKind kind = ExperimentKind::kOracleCheck;
  std::uint64_t seed = 0;
  std::optional<std::string> model_file;
  std::optional<GeneratorSpec> generator;
  Budgets budgets;
  nlohmann::json tolerances = nlohmann::json::object();
  nlohmann::json params = nlohmann::json::object();
  unsigned workers = 0;
  std::string output_dir = "cmrf-out";

  double tolerance(const std::string& key, double fallback) const;
};

/// Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& j);
/// Relative model paths resolve against the config file's directory.
ExperimentConfig load_config(const std::string& path);
/// Canonical form; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const ExperimentConfig& c);

struct Check {
  std::string name;
  double value = 0.0;
  std::string op;  // "<=", ">=", "<" or ">"
  double bound = 0.0;
  bool pass = false;
};

struct RunReport {
  std::string name;
  std::string kind;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  std::vector<Check> checks;
  std::vector<std::pair<std::string, std::string>> metrics;      // measured values
  std::vector<std::pair<std::string, std::string>> diagnostics;  // module counters
  std::vector<std::pair<std::string, std::string>> artifacts;    // file name, contents
  double wall_seconds = 0.0;

  bool passed() const;
  void check(std::string name, double value, const std::string& op, double bound);
  void metric(std::string name, double value);
  void metric(std::string name, const std::string& value);
  void diagnostic(std::string name, double value);
  void diagnostic(std::string name, const std::string& value);
};

/// Text report followed by a CSV block. The wall-clock line is the only
/// nondeterministic content and is omitted when `with_wall_clock` is false.
std::string render_report(const RunReport& r, bool with_wall_clock = true);

/// The model named by the config (file or generator; generators draw from the
/// "model" child of the root seed). Throws ConfigError if none is given.
Cmrf config_model(const ExperimentConfig& c);

/// Dispatches to the experiment pipeline. Module errors propagate with the
/// experiment name prefixed.
RunReport run_experiment(const ExperimentConfig& c);

/// CMRF_OUTPUT_DIR if set, else the config's output directory.
std::string output_directory(const ExperimentConfig& c);

/// Writes <dir>/<name>.report.txt plus any artifacts and returns the report path.
std::string write_report(const RunReport& r, const std::string& dir);

inline constexpr int kExitPass = 0;
inline constexpr int kExitToleranceFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitInternalError = 3;

}  // namespace cmrf

#endif  // CMRF_HARNESS_HPP
