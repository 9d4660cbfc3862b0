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

#include "cmrf/brute.hpp"

#include <cmath>
#include <set>

#include "cmrf/errors.hpp"
#include "cmrf/metrics.hpp"
#include "gtest/gtest.h"
#include "oracles/brute.hpp"

using cmrf::CandidateFamily;
using cmrf::DistributionTable;
using cmrf::IsingModel;
using cmrf::Stream;

namespace {

double tv(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return s / 2;
}

std::vector<double> as_vector(const DistributionTable& t) { return {t.probs().begin(), t.probs().end()}; }

DistributionTable table_of(const IsingModel& m) { return DistributionTable(m.size(), oracle::probs(m)); }

double parameter_norm2(const IsingModel& m) {
  double s = 0.0;
  for (double t : m.biases()) s += t * t;
  for (const auto& e : m.edges()) s += e.weight * e.weight;
  return s;
}

cmrf::SampleSet draw(const DistributionTable& t, std::size_t count, Stream rng) {
  cmrf::TableSource src(t, rng);
  return src.draw(count);
}

// (1 - t) p + t q: TV distance exactly t * TV(p, q).
DistributionTable blend(const DistributionTable& p, const DistributionTable& q, double t) {
  std::vector<double> out(p.states());
  for (std::size_t s = 0; s < out.size(); ++s) out[s] = (1 - t) * p[s] + t * q[s];
  return DistributionTable(p.dimension(), out);
}

IsingModel single_edge(double b) { return IsingModel::from_edges(2, {0.0, 0.0}, {{0, 1, b}}); }

}  // namespace

TEST(Mixing, DefaultRateAndFloor) {
  EXPECT_NEAR(cmrf::default_mixing_rate(3), std::pow(2 / std::exp(1.0), 3), 1e-15);
  Stream rng(1);
  CandidateFamily family(3);
  for (int k = 0; k < 5; ++k) family.add(table_of(oracle::random_model(rng, 3, 2.0, 1.0)));
  family.add(DistributionTable::point_mass(3, 5));
  for (std::size_t j = 0; j < family.size(); ++j) {
    const auto mixed = family.mixed(j);
    for (std::size_t s = 0; s < mixed.states(); ++s) EXPECT_GE(mixed[s], std::exp(-3.0) * (1 - 1e-12));
  }
  EXPECT_THROW(CandidateFamily(2, 0.0), cmrf::InvalidArgument);
  EXPECT_THROW(CandidateFamily(2, 1.0), cmrf::InvalidArgument);
  EXPECT_THROW(family.add(DistributionTable::uniform(2)), cmrf::InvalidArgument);
}

TEST(Mixing, ReplacesAboutLambdaOfTheSamples) {
  cmrf::SampleSet ones(3);
  for (int i = 0; i < 40000; ++i) ones.push_back(std::vector<cmrf::Spin>{1, 1, 1});
  Stream rng(2);
  EXPECT_EQ(cmrf::mix_with_uniform(ones, 0.0, rng), ones);
  const auto mixed = cmrf::mix_with_uniform(ones, 0.5, rng);
  double moved = 0;
  for (std::size_t i = 0; i < mixed.size(); ++i) moved += mixed.index(i) != 7;
  // A replaced sample lands back on the all-ones state with probability 1/8.
  EXPECT_NEAR(moved / 40000, 0.5 * 7 / 8, 0.01);
}

TEST(LikelihoodSelect, TrivialCases) {
  const auto samples = draw(DistributionTable::uniform(2), 100, Stream(3));
  CandidateFamily empty(2);
  EXPECT_THROW(cmrf::likelihood_select(empty, samples), cmrf::InvalidArgument);
  CandidateFamily one(2);
  one.add(table_of(single_edge(0.7)));
  EXPECT_EQ(cmrf::likelihood_select(one, samples).index, 0u);
  CandidateFamily twins(2);
  twins.add(table_of(single_edge(0.7)));
  twins.add(table_of(single_edge(0.7)));
  const auto sel = cmrf::likelihood_select(twins, samples);
  EXPECT_EQ(sel.index, 0u);
  EXPECT_EQ(sel.log_likelihoods[0], sel.log_likelihoods[1]);
}

TEST(LikelihoodSelect, MatchesDirectSum) {
  Stream rng(4);
  CandidateFamily family(3, 0.2);
  for (int k = 0; k < 4; ++k) family.add(table_of(oracle::random_model(rng, 3, 1.0, 1.0)));
  const auto samples = draw(family.table(0), 500, rng.child("samples"));
  const auto sel = cmrf::likelihood_select(family, samples, 2);
  for (std::size_t j = 0; j < family.size(); ++j) {
    double ll = 0.0;
    for (std::size_t t = 0; t < samples.size(); ++t)
      ll += std::log(0.8 * family.table(j)[samples.index(t)] + 0.2 / 8);
    EXPECT_NEAR(sel.log_likelihoods[j], ll, 1e-9 * std::abs(ll));
  }
}

TEST(LikelihoodSelect, PicksTruthOverFarTable) {
  const IsingModel truth = single_edge(0.5);
  CandidateFamily family(2);
  family.add(table_of(IsingModel::from_edges(2, {2.0, -2.0}, {{0, 1, -1.5}})));
  family.add(table_of(truth));
  int hits = 0;
  for (int trial = 0; trial < 20; ++trial)
    hits += cmrf::likelihood_select(family, draw(family.table(1), 10000, Stream(100 + trial))).index == 1;
  EXPECT_EQ(hits, 20);
}

TEST(LikelihoodSelect, SelectionErrorBoundHolds) {
  Stream rng(5);
  const std::size_t m = 3, k = 10, T = 10000;
  const double eps0 = 0.005;
  const auto truth = table_of(oracle::random_model(rng, 3, 0.8, 1.0));
  CandidateFamily family(m);
  for (std::size_t j = 0; j + 1 < k; ++j) family.add(table_of(oracle::random_model(rng, 3, 1.5, 1.0)));
  // Close candidate: TV to the truth exactly eps0 * TV(truth, point mass) <= eps0.
  family.add(blend(truth, DistributionTable::point_mass(3, 0), eps0));
  const double bound = cmrf::selection_error_bound(m, k, T, eps0);
  EXPECT_NEAR(bound, std::pow(4.0 * 9 * std::log(10.0) / T, 0.25) + std::sqrt(std::exp(3.0) * eps0 / 2), 1e-12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto sel = cmrf::likelihood_select(family, draw(truth, T, rng.child("trial", trial)));
    EXPECT_LE(tv(as_vector(family.table(sel.index)), as_vector(truth)), bound + 0.02);
  }
}

TEST(Conversion, ZeroModelStaysAtOrigin) {
  const auto out = cmrf::mrf_list_conversion(IsingModel::zero(3), 1e-4);
  EXPECT_LE(std::sqrt(parameter_norm2(out.model)), 1e-6);
  EXPECT_LE(out.residual, 1e-9);
}

TEST(Conversion, RandomModelsWithinCompressionBound) {
  Stream rng(6);
  const double eps = 1e-4;
  for (int trial = 0; trial < 50; ++trial) {
    const IsingModel model = oracle::random_model(rng, 3, 1.0, 0.8);
    const auto out = cmrf::mrf_list_conversion(model, eps);
    const auto p = oracle::probs(model);
    const auto q = oracle::probs(out.model);
    EXPECT_LE(tv(p, q), 8 * eps) << "trial " << trial;
    // Own constraints, rechecked from the oracle tables.
    for (std::size_t s = 0; s < q.size(); ++s) {
      if (s == out.anchor) continue;
      const double ratio = q[s] / q[out.anchor];
      EXPECT_GE(ratio, out.lower[s] - 1e-7);
      EXPECT_LE(ratio, out.lower[s] + eps + 1e-7);
      EXPECT_NEAR(out.lower[s], eps * std::floor(p[s] / p[out.anchor] / eps), 1e-12);
    }
    EXPECT_LE(out.max_violation, 1e-7);
    // The input itself is feasible, so the minimum-norm output is no larger.
    EXPECT_LE(parameter_norm2(out.model), parameter_norm2(model) + 1e-9);
  }
}

TEST(Conversion, FourVerticesAndCap) {
  Stream rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const IsingModel model = oracle::random_model(rng, 4, 1.0, 0.7);
    const auto out = cmrf::mrf_list_conversion(model, 1e-4);
    EXPECT_LE(tv(oracle::probs(model), oracle::probs(out.model)), 16e-4);
    EXPECT_LE(out.max_violation, 1e-7);
    EXPECT_LE(parameter_norm2(out.model), parameter_norm2(model) + 1e-9);
  }
  const IsingModel model = oracle::random_model(rng, 4, 0.6, 0.7);
  EXPECT_THROW(cmrf::mrf_list_conversion(IsingModel::zero(5), 1e-4), cmrf::CapExceeded);
  EXPECT_THROW(cmrf::mrf_list_conversion(model, 0.0), cmrf::InvalidArgument);
}

TEST(Conversion, NearIdempotent) {
  Stream rng(8);
  const double eps = 1e-4;
  for (int trial = 0; trial < 10; ++trial) {
    const IsingModel model = oracle::random_model(rng, 3, 1.0, 1.0);
    const auto once = cmrf::mrf_list_conversion(model, eps);
    const auto twice = cmrf::mrf_list_conversion(once.model, eps);
    EXPECT_LE(tv(oracle::probs(once.model), oracle::probs(twice.model)), 2 * 8 * eps);
  }
}

TEST(Conversion, SmallOutputSetAtCoarseEpsilon) {
  Stream rng(9);
  const double eps = 0.25;
  std::set<std::vector<long long>> distinct;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto out = cmrf::mrf_list_conversion(oracle::random_model(rng, 2, 2.0, 1.0), eps);
    std::vector<long long> key;
    for (double t : out.model.biases()) key.push_back(std::llround(t * 1e6));
    key.push_back(out.model.edges().empty() ? 0 : std::llround(out.model.edges()[0].weight * 1e6));
    distinct.insert(key);
  }
  const double bound_log2 = cmrf::conversion_count_bound_log2(2, eps);
  EXPECT_NEAR(bound_log2, 8 + 2 + 4 * std::log2(6.0), 1e-12);
  RecordProperty("distinct_outputs", static_cast<int>(distinct.size()));
  EXPECT_LE(std::log2(static_cast<double>(distinct.size())), bound_log2);
  EXPECT_LT(distinct.size(), 1000u);
}

TEST(Grid, ValuesAndIndexing) {
  cmrf::ExhaustiveOptions opts;
  const auto values = cmrf::grid_values(opts);
  ASSERT_EQ(values.size(), 61u);
  EXPECT_EQ(values[30], 0.0);
  EXPECT_NEAR(values.back(), 3.0, 1e-12);
  // n = 2: parameters (theta0, theta1, M01), first slowest.
  const auto m = cmrf::grid_model(2, 30 * 61 * 61 + 35 * 61 + 40, opts);
  EXPECT_EQ(m.bias(0), 0.0);
  EXPECT_NEAR(m.bias(1), 0.5, 1e-12);
  EXPECT_NEAR(m.weight(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(cmrf::grid_model(2, 0, opts).weight(0, 1), -3.0, 1e-12);
}

TEST(Exhaustive, BudgetExceeded) {
  cmrf::ExhaustiveOptions opts;
  const auto samples = draw(DistributionTable::uniform(3), 10, Stream(10));
  EXPECT_THROW(cmrf::exhaustive_select(samples, 3, opts), cmrf::CapExceeded);
  EXPECT_THROW(cmrf::exhaustive_select(samples, 2, opts), cmrf::InvalidArgument);
}

// Same selection through the separable enumeration and through an explicit
// family of marginal tables.
TEST(Exhaustive, MatchesMaterializedFamily) {
  struct Case {
    std::size_t n, m;
    double step;
  };
  for (const Case c : {Case{2, 2, 1.0}, Case{3, 2, 1.5}, Case{3, 1, 2.0}}) {
    cmrf::ExhaustiveOptions opts;
    opts.step = c.step;
    opts.workers = 2;
    Stream rng(11);
    const IsingModel truth = oracle::random_model(rng, c.n, 1.0, 1.0);
    std::vector<std::size_t> vis(c.m);
    for (std::size_t i = 0; i < c.m; ++i) vis[i] = i;
    const DistributionTable target(c.m, oracle::marginal(oracle::probs(truth), vis));
    const auto samples = draw(target, 2000, rng.child("s"));
    const auto fast = cmrf::exhaustive_select(samples, c.n, opts);

    CandidateFamily family(c.m);
    const auto count = static_cast<std::uint64_t>(fast.candidates);
    for (std::uint64_t i = 0; i < count; ++i) {
      const IsingModel g = cmrf::grid_model(c.n, i, opts);
      family.add(DistributionTable(c.m, oracle::marginal(oracle::probs(g), vis)));
    }
    const auto slow = cmrf::likelihood_select(family, samples);
    EXPECT_NEAR(fast.log_likelihood, slow.log_likelihoods[slow.index], 1e-9 * std::abs(fast.log_likelihood));
    EXPECT_LE(tv(as_vector(fast.table), as_vector(family.table(slow.index))), 1e-9);
    EXPECT_NEAR(slow.log_likelihoods[fast.index], fast.log_likelihood, 1e-9 * std::abs(fast.log_likelihood));
    if (c.n == c.m) EXPECT_EQ(fast.index, slow.index);
  }
}

TEST(Exhaustive, DeterministicAcrossWorkers) {
  cmrf::ExhaustiveOptions opts;
  opts.step = 0.5;
  const auto samples = draw(table_of(single_edge(0.4)), 3000, Stream(12));
  opts.workers = 1;
  const auto a = cmrf::exhaustive_select(samples, 2, opts);
  opts.workers = 3;
  const auto b = cmrf::exhaustive_select(samples, 2, opts);
  EXPECT_EQ(a.index, b.index);
  EXPECT_EQ(a.log_likelihood, b.log_likelihood);
}

TEST(Exhaustive, SingleEdge) {
  const auto truth = table_of(single_edge(0.5));
  cmrf::TableSource src(truth, Stream(13));
  Stream rng(14);
  const auto out = cmrf::exhaustive_learn(src, 2, 2, cmrf::ExhaustiveOptions{}, rng);
  EXPECT_LE(cmrf::tv_distance(out.table, truth), 0.05);
  EXPECT_EQ(src.drawn(), 100000u);
}

TEST(Exhaustive, ZeroModel) {
  const auto truth = DistributionTable::uniform(2);
  cmrf::TableSource src(truth, Stream(15));
  Stream rng(16);
  const auto out = cmrf::exhaustive_learn(src, 2, 2, cmrf::ExhaustiveOptions{}, rng);
  EXPECT_LE(cmrf::tv_distance(out.table, truth), 0.05);
}

TEST(Exhaustive, OneCensoredVertex) {
  const IsingModel model = IsingModel::from_edges(3, {0.0, 0.0, 0.0}, {{0, 2, 0.8}, {1, 2, 0.8}});
  const DistributionTable truth(2, oracle::marginal(oracle::probs(model), {0, 1}));
  cmrf::TableSource src(truth, Stream(17));
  Stream rng(18);
  cmrf::ExhaustiveOptions opts;
  opts.step = 0.2;
  const auto out = cmrf::exhaustive_learn(src, 3, 2, opts, rng);
  EXPECT_EQ(out.candidates, std::pow(31.0, 6));
  EXPECT_LE(cmrf::tv_distance(out.table, truth), 0.1);
}

TEST(Exhaustive, ErrorShrinksWithSamples) {
  const auto truth = table_of(IsingModel::from_edges(2, {0.3, -0.2}, {{0, 1, 0.6}}));
  std::vector<double> mean;
  for (std::size_t T : {300u, 3000u, 30000u}) {
    double total = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      cmrf::TableSource src(truth, Stream(1000 * T + trial));
      Stream rng(trial);
      cmrf::ExhaustiveOptions opts;
      opts.step = 0.2;
      opts.samples = T;
      total += cmrf::tv_distance(cmrf::exhaustive_learn(src, 2, 2, opts, rng).table, truth);
    }
    mean.push_back(total / 20);
  }
  EXPECT_LE(mean[1], mean[0] + 0.005);
  EXPECT_LE(mean[2], mean[1] + 0.005);
  EXPECT_LT(mean[2], mean[0]);
}
