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

#include "cmrf/harness.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "cmrf/acceptance.hpp"
#include "cmrf/brute.hpp"
#include "cmrf/dynamics.hpp"
#include "cmrf/errors.hpp"
#include "cmrf/exact.hpp"
#include "cmrf/gadgets.hpp"
#include "cmrf/high_girth.hpp"
#include "cmrf/high_temp.hpp"
#include "cmrf/io.hpp"
#include "cmrf/learner.hpp"
#include "cmrf/metrics.hpp"
#include "cmrf/parallel.hpp"

namespace cmrf {

using nlohmann::json;

namespace {

const std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::kOracleCheck, "oracle-check"},       {ExperimentKind::kDynamicsCheck, "dynamics-check"},
    {ExperimentKind::kHighTempLearn, "high-temp-learn"},  {ExperimentKind::kHighGirthLearn, "high-girth-learn"},
    {ExperimentKind::kGadgetVerify, "gadget-verify"},     {ExperimentKind::kParityRecover, "parity-recover"},
    {ExperimentKind::kCircuitCompile, "circuit-compile"}, {ExperimentKind::kBruteLearn, "brute-learn"},
    {ExperimentKind::kDistortionEval, "distortion-eval"}, {ExperimentKind::kAcceptance, "acceptance"},
};

std::string format_value(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

// Field access with ConfigError diagnostics.
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      bool known = false;
      for (const char* k : keys) known = known || it.key() == k;
      if (!known) throw ConfigError(where_ + "." + it.key() + ": unknown field");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(path(key) + ": expected a number");
    return v.get<double>();
  }

  std::uint64_t count(const char* key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
      throw ConfigError(path(key) + ": expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  bool flag(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_boolean()) throw ConfigError(path(key) + ": expected true or false");
    return j_.at(key).get<bool>();
  }

  std::string text(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_string()) throw ConfigError(path(key) + ": expected a string");
    return j_.at(key).get<std::string>();
  }

  std::vector<std::size_t> indices(const char* key) const {
    std::vector<std::size_t> out;
    if (!has(key)) return out;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(path(key) + ": expected an array of indices");
    for (const json& e : v) {
      if (!e.is_number_unsigned()) throw ConfigError(path(key) + ": expected nonnegative integers");
      out.push_back(e.get<std::size_t>());
    }
    return out;
  }

  std::string path(const char* key) const { return where_ + "." + key; }

 private:
  const json& j_;
  std::string where_;
};

GeneratorSpec parse_generator(const json& j) {
  Fields f(j, "model");
  f.allow({"generator", "n", "b", "d", "min_girth", "bias", "weight_floor", "random_signs", "high_temperature", "k",
           "censoring"});
  if (!f.has("generator")) throw ConfigError("model.generator: required");
  GeneratorSpec g;
  try {
    g.kind = parse_graph_kind(f.text("generator", ""));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("model.generator: ") + e.what());
  }
  g.n = f.count("n", 0);
  g.b = f.number("b", 0.0);
  g.d = f.count("d", 0);
  g.min_girth = f.count("min_girth", 0);
  g.bias = f.number("bias", 0.0);
  g.weight_floor = f.number("weight_floor", 0.5);
  g.random_signs = f.flag("random_signs", true);
  g.high_temperature = f.flag("high_temperature", false);
  g.k = f.count("k", 1);
  if (g.kind != GraphKind::kGadget && g.n == 0) throw ConfigError("model.n: required and positive");
  if (f.has("censoring")) {
    Fields c(j.at("censoring"), "model.censoring");
    c.allow({"rule", "censored", "fraction", "count"});
    try {
      g.censoring.rule = parse_censor_rule(c.text("rule", "none"));
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("model.censoring.rule: ") + e.what());
    }
    g.censoring.censored = c.indices("censored");
    g.censoring.fraction = c.number("fraction", 0.0);
    g.censoring.count = c.count("count", 0);
  }
  return g;
}

json generator_json(const GeneratorSpec& g) {
  json c = {{"rule", to_string(g.censoring.rule)},
            {"censored", g.censoring.censored},
            {"fraction", g.censoring.fraction},
            {"count", g.censoring.count}};
  return {{"generator", to_string(g.kind)}, {"n", g.n},
          {"b", g.b},                       {"d", g.d},
          {"min_girth", g.min_girth},       {"bias", g.bias},
          {"weight_floor", g.weight_floor}, {"random_signs", g.random_signs},
          {"high_temperature", g.high_temperature}, {"k", g.k},
          {"censoring", c}};
}

bool needs_model(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kOracleCheck:
    case ExperimentKind::kDynamicsCheck:
    case ExperimentKind::kHighTempLearn:
    case ExperimentKind::kHighGirthLearn:
    case ExperimentKind::kBruteLearn:
    case ExperimentKind::kDistortionEval:
      return true;
    default:
      return false;
  }
}

// --- experiment pipelines --------------------------------------------------

struct Context {
  const ExperimentConfig& cfg;
  Fields params;
  Stream root;
  RunReport& report;
};

DistributionTable empirical_from_indices(const std::vector<std::uint64_t>& idx, std::size_t m) {
  std::vector<double> p(std::size_t{1} << m, 0.0);
  for (std::uint64_t s : idx) p[s] += 1.0;
  for (double& x : p) x /= static_cast<double>(idx.size());
  return DistributionTable(m, std::move(p));
}

void run_oracle_check(Context& ctx) {
  const Cmrf cmrf = config_model(ctx.cfg);
  const IsingModel& model = cmrf.model();
  const std::size_t n = model.size();
  const auto table = visible_marginal(cmrf);
  // Second route: per-state log weights from the model itself.
  std::vector<double> logw(std::size_t{1} << n);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::uint64_t s = 0; s < logw.size(); ++s) {
    logw[s] = model.log_weight(SpinVector::from_index(s, n).view());
    mx = std::max(mx, logw[s]);
  }
  double z = 0.0;
  for (double w : logw) z += std::exp(w - mx);
  std::vector<double> direct(table.states(), 0.0);
  for (std::uint64_t s = 0; s < logw.size(); ++s) {
    std::uint64_t vis = 0;
    for (std::size_t k = 0; k < cmrf.visible_count(); ++k) vis |= ((s >> cmrf.visible()[k]) & 1U) << k;
    direct[vis] += std::exp(logw[s] - mx) / z;
  }
  double dev = 0.0, total = 0.0, entropy = 0.0;
  for (std::size_t s = 0; s < direct.size(); ++s) {
    dev = std::max(dev, std::abs(direct[s] - table[s]));
    total += table[s];
    if (table[s] > 0) entropy -= table[s] * std::log(table[s]);
  }
  ctx.report.check("max_route_deviation", dev, "<=", ctx.cfg.tolerance("oracle", 1e-10));
  ctx.report.check("normalization_error", std::abs(total - 1.0), "<=", ctx.cfg.tolerance("oracle", 1e-10));
  ctx.report.metric("n", static_cast<double>(n));
  ctx.report.metric("visible", static_cast<double>(cmrf.visible_count()));
  ctx.report.metric("log_partition", log_partition(model));
  ctx.report.metric("visible_entropy", entropy);
  std::ostringstream out;
  write_table(out, table);
  ctx.report.artifacts.emplace_back(ctx.cfg.name + ".table.txt", out.str());
}

void run_dynamics_check(Context& ctx) {
  const Cmrf cmrf = config_model(ctx.cfg);
  const IsingModel& model = cmrf.model();
  const std::size_t n = model.size();
  const std::size_t runs = ctx.cfg.budgets.runs;
  if (runs == 0) throw ConfigError("budgets.runs: must be positive");
  const double mult = ctx.params.number("steps_multiplier", 10.0);
  auto window = ctx.params.indices("window");
  for (std::size_t w : window)
    if (w >= n) throw ConfigError("params.window: vertex out of range");
  SpinVector x0(n, 1);
  if (ctx.params.has("boundary")) {
    const json& b = ctx.cfg.params.at("boundary");
    if (!b.is_array() || b.size() != n) throw ConfigError("params.boundary: expected n values of +1/-1");
    for (std::size_t i = 0; i < n; ++i) {
      if (!b[i].is_number_integer() || std::abs(b[i].get<int>()) != 1) throw ConfigError("params.boundary: expected +1/-1");
      x0.set(i, static_cast<Spin>(b[i].get<int>()));
    }
  }
  std::sort(window.begin(), window.end());
  window.erase(std::unique(window.begin(), window.end()), window.end());
  const std::size_t span = window.empty() ? n : window.size();
  const std::size_t steps = static_cast<std::size_t>(
      std::ceil(mult * static_cast<double>(std::max<std::size_t>(1, default_steps(span)))));
  const auto full = full_distribution(model);
  std::vector<std::uint64_t> finals(runs);
  std::vector<std::uint8_t> moved(runs, 0);
  const ConditionalEstimator f = exact_estimator(model);
  parallel_for(
      runs,
      [&](std::size_t i) {
        Stream rng = ctx.root.child("run", i);
        if (window.empty()) {
          finals[i] = approximate_mcmc(f, x0, steps, rng).to_index();
        } else {
          const SpinVector x = glauber_boundary(model, x0, steps, window, rng);
          std::uint64_t w = 0;
          for (std::size_t k = 0; k < window.size(); ++k) w |= static_cast<std::uint64_t>(x[window[k]] > 0) << k;
          for (std::size_t v = 0; v < n; ++v)
            if (!std::binary_search(window.begin(), window.end(), v) && x[v] != x0[v]) moved[i] = 1;
          finals[i] = w;
        }
      },
      ctx.cfg.workers);
  DistributionTable target = full;
  if (!window.empty()) {
    std::vector<double> cond(std::size_t{1} << window.size(), 0.0);
    double mass = 0.0;
    for (std::uint64_t s = 0; s < full.states(); ++s) {
      bool match = true;
      std::uint64_t w = 0;
      for (std::size_t v = 0; v < n && match; ++v) {
        const bool up = (s >> v) & 1U;
        if (std::binary_search(window.begin(), window.end(), v)) continue;
        match = up == (x0[v] > 0);
      }
      if (!match) continue;
      for (std::size_t k = 0; k < window.size(); ++k) w |= ((s >> window[k]) & 1U) << k;
      cond[w] += full[s];
      mass += full[s];
    }
    for (double& c : cond) c /= mass;
    target = DistributionTable(window.size(), std::move(cond));
    std::size_t violations = 0;
    for (auto m : moved) violations += m;
    ctx.report.check("boundary_violations", static_cast<double>(violations), "<=", 0.0);
  }
  const double tv = tv_distance(empirical_from_indices(finals, span), target);
  ctx.report.check("tv_to_exact", tv, "<=", ctx.cfg.tolerance("tv", 0.02));
  ctx.report.metric("steps", static_cast<double>(steps));
  ctx.report.metric("runs", static_cast<double>(runs));
}

HighTempConfig high_temp_config(const Context& ctx, const Cmrf& cmrf) {
  HighTempConfig h;
  double wmax = 0.0;
  for (const Edge& e : cmrf.model().edges()) wmax = std::max(wmax, std::abs(e.weight));
  const auto bounds = model_bounds(cmrf.model());
  h.epsilon = ctx.params.number("epsilon", h.epsilon);
  h.b = ctx.params.number("b", wmax > 0 ? wmax : h.b);
  h.d = ctx.params.number("d", bounds.d > 0 ? static_cast<double>(bounds.d) : h.d);
  if (ctx.params.has("radius")) h.radius = ctx.params.count("radius", 1);
  if (ctx.params.has("subset_cap")) h.subset_cap = ctx.params.count("subset_cap", 1);
  h.sample_multiplier = ctx.params.number("sample_multiplier", h.sample_multiplier);
  if (ctx.cfg.budgets.samples) h.search_samples = h.fit_samples = ctx.cfg.budgets.samples;
  h.mcmc_multiplier = ctx.cfg.budgets.mcmc_multiplier;
  h.max_skip_fraction = ctx.params.number("max_skip_fraction", h.max_skip_fraction);
  h.workers = 1;
  try {
    h.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("high-temperature learner: ") + e.what());
  }
  return h;
}

HighGirthConfig high_girth_config(const Context& ctx) {
  HighGirthConfig h;
  if (ctx.cfg.budgets.samples) h.samples = ctx.cfg.budgets.samples;
  h.rho0 = ctx.params.number("rho0", h.rho0);
  h.asymptotic_threshold = ctx.params.flag("asymptotic_threshold", false);
  h.table_cap = ctx.params.count("table_cap", h.table_cap);
  h.mcmc_multiplier = ctx.cfg.budgets.mcmc_multiplier;
  h.workers = 1;
  try {
    h.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("high-girth learner: ") + e.what());
  }
  return h;
}

void distortion_versus_baseline(Context& ctx, const Cmrf& cmrf, const Learner& learner) {
  const auto truth = visible_marginal(cmrf);
  const std::size_t k = ctx.cfg.budgets.streams, r = ctx.cfg.budgets.outputs;
  if (k == 0 || r == 0) throw ConfigError("budgets.streams and budgets.outputs must be positive");
  DistortionOptions dopts;
  dopts.workers = ctx.cfg.workers;
  const auto learned = distortion_estimate(learner, cmrf, k, r, ctx.root.child("distortion"), dopts);
  const auto baseline =
      distortion_estimate(oracle_cheat_learner(truth), cmrf, k, r, ctx.root.child("distortion"), dopts);
  const double s = static_cast<double>(cmrf.visible_count());
  const double slack = ctx.cfg.tolerance("per_vertex", 0.2);
  ctx.report.check("distortion", learned.mean, "<=", slack * s + baseline.mean);
  ctx.report.metric("distortion_stddev", learned.stddev);
  ctx.report.metric("baseline", baseline.mean);
  ctx.report.metric("baseline_ratio", baseline.mean > 0 ? learned.mean / baseline.mean : 0.0);
  ctx.report.metric("visible", s);
  ctx.report.metric("samples_per_stream", static_cast<double>(learned.samples_per_stream));
}

void run_high_temp(Context& ctx) {
  const Cmrf cmrf = config_model(ctx.cfg);
  const HighTempConfig h = high_temp_config(ctx, cmrf);
  TableSource probe(visible_marginal(cmrf), ctx.root.child("probe"));
  const auto fit = fit_high_temp(probe, h);
  ctx.report.diagnostic("radius", static_cast<double>(h.effective_radius()));
  ctx.report.diagnostic("subset_cap", static_cast<double>(h.effective_subset_cap()));
  ctx.report.diagnostic("fallbacks", static_cast<double>(fit.neighborhoods.fallbacks()));
  ctx.report.diagnostic("skip_fraction", fit.neighborhoods.skip_fraction());
  std::size_t empty = 0;
  for (auto e : fit.tables.empty_cells) empty += e;
  ctx.report.diagnostic("empty_cells", static_cast<double>(empty));
  distortion_versus_baseline(ctx, cmrf, high_temp_learner(h));
}

void run_high_girth(Context& ctx) {
  const Cmrf cmrf = config_model(ctx.cfg);
  const HighGirthConfig h = high_girth_config(ctx);
  TableSource probe(visible_marginal(cmrf), ctx.root.child("probe"));
  const auto fit = fit_high_girth(probe, h);
  const auto g = girth(cmrf.model());
  ctx.report.diagnostic("girth", g ? std::to_string(*g) : std::string("inf"));
  ctx.report.diagnostic("rho0", h.effective_rho0(cmrf.visible_count()));
  ctx.report.diagnostic("truncations", static_cast<double>(fit.neighbors.truncations()));
  ctx.report.diagnostic("constant_columns", static_cast<double>(fit.rho.constant_columns()));
  distortion_versus_baseline(ctx, cmrf, high_girth_learner(h));
}

void run_gadget_verify(Context& ctx) {
  const double b = ctx.params.number("b", 0.1);
  const std::size_t k = ctx.params.count("k", 1);
  if (!(b > 0.0) || k == 0) throw ConfigError("params: gadget needs b > 0 and k >= 1");
  const ParityGadget g = k == 1 ? build_parity_gadget(b) : build_chained_parity(b, k);
  const auto exact = visible_marginal(g.cmrf());
  const double delta = std::pow(delta_b(b), static_cast<double>(k));
  double dev = 0.0;
  for (std::uint64_t s = 0; s < exact.states(); ++s) {
    const int prod = (std::popcount(s) % 2 == static_cast<int>(exact.dimension() % 2)) ? 1 : -1;
    const double want = (1.0 + delta * prod) / static_cast<double>(exact.states());
    dev = std::max(dev, std::abs(exact[s] - want));
  }
  ctx.report.check("max_law_deviation", dev, "<", ctx.cfg.tolerance("law", 1e-10));
  if (k == 1) {
    const double z = std::exp(log_partition(g.model));
    const double want = 128 * (2 * std::pow(std::cosh(2 * b), 4) - std::pow(std::sinh(2 * b), 4));
    ctx.report.check("partition_relative_error", std::abs(z / want - 1), "<=", ctx.cfg.tolerance("partition", 1e-10));
  }
  ctx.report.metric("delta_b_k", delta);
  ctx.report.metric("vertices", static_cast<double>(g.model.size()));
}

void run_parity_recover(Context& ctx) {
  const std::size_t n = ctx.params.count("n", 16);
  const std::size_t k = ctx.params.count("k", 1);
  const bool null = ctx.params.flag("null", false);
  const double eta = null ? 0.0 : ctx.params.number("eta", std::pow(delta_b(ctx.params.number("b", 0.1)), double(k)));
  const std::size_t m = ctx.cfg.budgets.samples ? ctx.cfg.budgets.samples : 100000;
  const std::size_t trials = ctx.cfg.budgets.trials;
  if (2 * k + 2 > n) throw ConfigError("params: support size 2k+2 exceeds n");
  ParityRecoveryOptions opts;
  opts.max_k = k;
  opts.workers = ctx.cfg.workers;
  const double threshold = parity_null_threshold(n, k, m);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Stream trng = ctx.root.child("trial", t);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[trng.index(i)]);
    PlantedParity pp{n, std::vector<std::size_t>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(2 * k + 2)),
                     eta};
    std::sort(pp.support.begin(), pp.support.end());
    SampleSet samples(n);
    samples.reserve(m);
    Stream srng = trng.child("samples");
    for (std::size_t i = 0; i < m; ++i) samples.push_back(sample_planted_parity(pp, srng));
    const auto rec = recover_parity_support(samples, k, opts);
    hits += null ? std::abs(rec.bias) > threshold : rec.support == pp.support;
  }
  if (null) {
    ctx.report.check("null_exceedances", static_cast<double>(hits), "<=",
                     ctx.cfg.tolerance("max_false_alarms", std::floor(static_cast<double>(trials) / 20)));
  } else {
    ctx.report.check("recoveries", static_cast<double>(hits), ">=",
                     ctx.cfg.tolerance("min_successes", static_cast<double>(trials) * 0.9));
  }
  ctx.report.metric("eta", eta);
  ctx.report.metric("null_threshold", threshold);
  ctx.report.metric("separation_holds", parity_separation_holds(eta, n, k, m) ? 1.0 : 0.0);
}

NandCircuit circuit_from_params(const Context& ctx) {
  if (!ctx.params.has("circuit") || ctx.cfg.params.at("circuit").is_string()) {
    const std::string name = ctx.params.text("circuit", "xor");
    if (name != "xor") throw ConfigError("params.circuit: unknown circuit '" + name + "'");
    return xor_circuit(ctx.params.flag("with_inputs", true));
  }
  const json& c = ctx.cfg.params.at("circuit");
  Fields f(c, "params.circuit");
  f.allow({"inputs", "gates", "outputs"});
  NandCircuit out;
  out.inputs = f.count("inputs", 0);
  if (!c.contains("gates") || !c.at("gates").is_array()) throw ConfigError("params.circuit.gates: expected pairs");
  for (const json& g : c.at("gates")) {
    if (!g.is_array() || g.size() != 2 || !g[0].is_number_unsigned() || !g[1].is_number_unsigned())
      throw ConfigError("params.circuit.gates: expected pairs of node indices");
    out.gates.emplace_back(g[0].get<std::size_t>(), g[1].get<std::size_t>());
  }
  out.outputs = f.indices("outputs");
  try {
    out.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("params.circuit: ") + e.what());
  }
  return out;
}

void run_circuit_compile(Context& ctx) {
  const NandCircuit circuit = circuit_from_params(ctx);
  CompileOptions opts;
  opts.delta = ctx.params.number("delta", 3.0);
  opts.delta_from_size = ctx.params.flag("delta_from_size", false);
  const Cmrf compiled = compile_circuit(circuit, opts);
  const double tv = tv_distance(visible_marginal(compiled), ideal_circuit_law(circuit));
  ctx.report.check("tv_to_truth_table", tv, "<=", ctx.cfg.tolerance("tv", 0.01));
  ctx.report.metric("delta", opts.effective_delta(circuit));
  ctx.report.metric("vertices", static_cast<double>(compiled.model().size()));
  ctx.report.metric("gates", static_cast<double>(circuit.gates.size()));
  std::ostringstream out;
  write_cmrf(out, compiled);
  ctx.report.artifacts.emplace_back(ctx.cfg.name + ".model.txt", out.str());
}

void run_brute_learn(Context& ctx) {
  const Cmrf cmrf = config_model(ctx.cfg);
  const std::size_t m = cmrf.visible_count();
  for (std::size_t i = 0; i < m; ++i)
    if (cmrf.visible()[i] != i) throw ConfigError("brute-learn: visible vertices must be 0..m-1");
  ExhaustiveOptions opts;
  opts.step = ctx.params.number("step", opts.step);
  opts.grid_min = ctx.params.number("grid_min", opts.grid_min);
  opts.grid_max = ctx.params.number("grid_max", opts.grid_max);
  opts.mix_samples = ctx.params.flag("mix_samples", true);
  opts.samples = ctx.cfg.budgets.samples ? ctx.cfg.budgets.samples : 100000;
  opts.workers = ctx.cfg.workers;
  const auto truth = visible_marginal(cmrf);
  const double tol = ctx.cfg.tolerance("tv", 0.05);
  const std::size_t trials = ctx.cfg.budgets.trials;
  std::size_t hits = 0;
  double total = 0.0, candidates = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    TableSource src(truth, ctx.root.child("samples", t));
    Stream rng = ctx.root.child("mixing", t);
    const auto out = exhaustive_learn(src, cmrf.model().size(), m, opts, rng);
    const double tv = tv_distance(out.table, truth);
    total += tv;
    hits += tv <= tol;
    candidates = out.candidates;
  }
  ctx.report.check("trials_within_tv", static_cast<double>(hits), ">=",
                   ctx.cfg.tolerance("min_successes", static_cast<double>(trials) * 0.9));
  ctx.report.metric("mean_tv", total / static_cast<double>(trials));
  ctx.report.metric("candidates", candidates);
}

void run_distortion_eval(Context& ctx) {
  const Cmrf cmrf = config_model(ctx.cfg);
  const std::string name = ctx.params.text("learner", "oracle-cheat");
  const auto truth = visible_marginal(cmrf);
  Learner learner;
  if (name == "oracle-cheat") learner = oracle_cheat_learner(truth);
  else if (name == "parrot") learner = parrot_learner();
  else if (name == "constant") learner = constant_learner(SpinVector(cmrf.visible_count(), 1));
  else if (name == "high-temp") learner = high_temp_learner(high_temp_config(ctx, cmrf));
  else if (name == "high-girth") learner = high_girth_learner(high_girth_config(ctx));
  else throw ConfigError("params.learner: unknown learner '" + name + "'");
  DistortionOptions dopts;
  dopts.workers = ctx.cfg.workers;
  const auto rep = distortion_estimate(learner, cmrf, ctx.cfg.budgets.streams, ctx.cfg.budgets.outputs,
                                       ctx.root.child("distortion"), dopts);
  if (ctx.cfg.tolerances.contains("max_distortion"))
    ctx.report.check("distortion", rep.mean, "<=", ctx.cfg.tolerance("max_distortion", 0.0));
  else
    ctx.report.metric("distortion", rep.mean);
  ctx.report.metric("distortion_stddev", rep.stddev);
  for (std::size_t i = 0; i < rep.per_stream.size(); ++i)
    ctx.report.metric("stream_" + std::to_string(i), rep.per_stream[i]);
}

}  // namespace

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (const auto& [k, n] : kKindNames)
    if (name == n) return k;
  throw ConfigError("kind: unknown experiment kind '" + name + "'");
}

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, n] : kKindNames)
    if (k == kind) return n;
  return "?";
}

double ExperimentConfig::tolerance(const std::string& key, double fallback) const {
  if (!tolerances.contains(key)) return fallback;
  return tolerances.at(key).get<double>();
}

ExperimentConfig parse_config(const json& j) {
  Fields f(j, "config");
  f.allow({"kind", "name", "seed", "model", "budgets", "tolerances", "params", "workers", "output_dir"});
  if (!f.has("kind")) throw ConfigError("config.kind: required");
  if (!f.has("seed")) throw ConfigError("config.seed: required (no default seed)");
  ExperimentConfig c;
  c.kind = parse_experiment_kind(f.text("kind", ""));
  c.seed = f.count("seed", 0);
  c.name = f.text("name", to_string(c.kind));
  if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos)
    throw ConfigError("config.name: must be a nonempty file-name-safe string");
  c.workers = static_cast<unsigned>(f.count("workers", 0));
  c.output_dir = f.text("output_dir", c.output_dir);
  if (f.has("model")) {
    const json& m = j.at("model");
    if (m.is_string()) c.model_file = m.get<std::string>();
    else c.generator = parse_generator(m);
  }
  if (f.has("budgets")) {
    Fields b(j.at("budgets"), "budgets");
    b.allow({"samples", "mcmc_multiplier", "streams", "outputs", "runs", "trials"});
    c.budgets.samples = b.count("samples", c.budgets.samples);
    c.budgets.mcmc_multiplier = b.number("mcmc_multiplier", c.budgets.mcmc_multiplier);
    c.budgets.streams = b.count("streams", c.budgets.streams);
    c.budgets.outputs = b.count("outputs", c.budgets.outputs);
    c.budgets.runs = b.count("runs", c.budgets.runs);
    c.budgets.trials = b.count("trials", c.budgets.trials);
    if (!(c.budgets.mcmc_multiplier > 0)) throw ConfigError("budgets.mcmc_multiplier: must be positive");
  }
  if (f.has("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object()) throw ConfigError("tolerances: expected an object");
    for (auto it = t.begin(); it != t.end(); ++it)
      if (!it.value().is_number()) throw ConfigError("tolerances." + it.key() + ": expected a number");
    c.tolerances = t;
  }
  if (f.has("params")) {
    if (!j.at("params").is_object()) throw ConfigError("params: expected an object");
    c.params = j.at("params");
  }
  if (needs_model(c.kind) && !c.model_file && !c.generator) throw ConfigError("model: required for " + to_string(c.kind));
  if (c.kind == ExperimentKind::kAcceptance) {
    const auto id = Fields(c.params, "params").count("criterion", 0);
    if (id < 1 || id > static_cast<std::uint64_t>(kAcceptanceCriteria))
      throw ConfigError("params.criterion: expected 1.." + std::to_string(kAcceptanceCriteria));
  }
  if (c.budgets.trials == 0) throw ConfigError("budgets.trials: must be positive");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  ExperimentConfig c = parse_config(j);
  if (c.model_file && std::filesystem::path(*c.model_file).is_relative())
    c.model_file =
        std::filesystem::absolute(std::filesystem::path(path).parent_path() / *c.model_file).lexically_normal().string();
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j = {{"kind", to_string(c.kind)},
            {"name", c.name},
            {"seed", c.seed},
            {"workers", c.workers},
            {"output_dir", c.output_dir},
            {"budgets",
             {{"samples", c.budgets.samples},
              {"mcmc_multiplier", c.budgets.mcmc_multiplier},
              {"streams", c.budgets.streams},
              {"outputs", c.budgets.outputs},
              {"runs", c.budgets.runs},
              {"trials", c.budgets.trials}}},
            {"tolerances", c.tolerances},
            {"params", c.params}};
  if (c.model_file) j["model"] = *c.model_file;
  if (c.generator) j["model"] = generator_json(*c.generator);
  return j;
}

bool RunReport::passed() const {
  for (const Check& c : checks)
    if (!c.pass) return false;
  return true;
}

void RunReport::check(std::string n, double value, const std::string& op, double bound) {
  bool ok = false;
  if (op == "<=") ok = value <= bound;
  else if (op == "<") ok = value < bound;
  else if (op == ">=") ok = value >= bound;
  else if (op == ">") ok = value > bound;
  else throw InvalidArgument("unknown comparison " + op);
  checks.push_back({std::move(n), value, op, bound, ok});
}

void RunReport::metric(std::string n, double value) { metrics.emplace_back(std::move(n), format_value(value)); }
void RunReport::metric(std::string n, const std::string& value) { metrics.emplace_back(std::move(n), value); }
void RunReport::diagnostic(std::string n, double value) { diagnostics.emplace_back(std::move(n), format_value(value)); }
void RunReport::diagnostic(std::string n, const std::string& value) { diagnostics.emplace_back(std::move(n), value); }

std::string render_report(const RunReport& r, bool with_wall_clock) {
  std::ostringstream out;
  out << "experiment " << r.name << "\n";
  out << "kind " << r.kind << "\n";
  out << "seed " << r.seed << "\n";
  out << "config " << r.config.dump() << "\n";
  out << "result " << (r.passed() ? "PASS" : "FAIL") << "\n";
  for (const Check& c : r.checks)
    out << "check " << c.name << " " << format_value(c.value) << " " << c.op << " " << format_value(c.bound) << " "
        << (c.pass ? "PASS" : "FAIL") << "\n";
  for (const auto& [k, v] : r.metrics) out << "metric " << k << " " << v << "\n";
  for (const auto& [k, v] : r.diagnostics) out << "diagnostic " << k << " " << v << "\n";
  for (const auto& a : r.artifacts) out << "artifact " << a.first << "\n";
  if (with_wall_clock) out << "wall_seconds " << format_value(r.wall_seconds) << "\n";
  out << "# csv\n";
  out << "section,name,value,op,bound,status\n";
  for (const Check& c : r.checks)
    out << "check," << c.name << "," << format_value(c.value) << "," << c.op << "," << format_value(c.bound) << ","
        << (c.pass ? "PASS" : "FAIL") << "\n";
  for (const auto& [k, v] : r.metrics) out << "metric," << k << "," << v << ",,,\n";
  for (const auto& [k, v] : r.diagnostics) out << "diagnostic," << k << "," << v << ",,,\n";
  return out.str();
}

Cmrf config_model(const ExperimentConfig& c) {
  if (c.model_file) return read_cmrf_file(*c.model_file);
  if (!c.generator) throw ConfigError("model: required for " + to_string(c.kind));
  try {
    return generate_model(*c.generator, Stream(c.seed).child("model"));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

RunReport run_experiment(const ExperimentConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  if (c.kind == ExperimentKind::kAcceptance) {
    AcceptanceOptions opts;
    opts.seed = c.seed;
    opts.workers = c.workers;
    report = run_criterion(static_cast<int>(c.params.at("criterion").get<std::uint64_t>()), opts);
  } else {
    Context ctx{c, Fields(c.params, "params"), Stream(c.seed).child("experiment"), report};
    try {
      switch (c.kind) {
        case ExperimentKind::kOracleCheck: run_oracle_check(ctx); break;
        case ExperimentKind::kDynamicsCheck: run_dynamics_check(ctx); break;
        case ExperimentKind::kHighTempLearn: run_high_temp(ctx); break;
        case ExperimentKind::kHighGirthLearn: run_high_girth(ctx); break;
        case ExperimentKind::kGadgetVerify: run_gadget_verify(ctx); break;
        case ExperimentKind::kParityRecover: run_parity_recover(ctx); break;
        case ExperimentKind::kCircuitCompile: run_circuit_compile(ctx); break;
        case ExperimentKind::kBruteLearn: run_brute_learn(ctx); break;
        case ExperimentKind::kDistortionEval: run_distortion_eval(ctx); break;
        case ExperimentKind::kAcceptance: break;
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw std::runtime_error(c.name + " (" + to_string(c.kind) + "): " + e.what());
    }
  }
  report.name = c.name;
  report.kind = to_string(c.kind);
  report.seed = c.seed;
  report.config = to_json(c);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string output_directory(const ExperimentConfig& c) {
  if (const char* env = std::getenv("CMRF_OUTPUT_DIR"); env && *env) return env;
  return c.output_dir;
}

std::string write_report(const RunReport& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / (r.name + ".report.txt")).string();
  write_text_file(path, render_report(r));
  for (const auto& [file, text] : r.artifacts) write_text_file((std::filesystem::path(dir) / file).string(), text);
  return path;
}

}  // namespace cmrf
