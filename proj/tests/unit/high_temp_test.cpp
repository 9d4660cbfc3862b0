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

#include "cmrf/high_temp.hpp"

#include <algorithm>
#include <cmath>

#include "cmrf/errors.hpp"
#include "cmrf/metrics.hpp"
#include "gtest/gtest.h"
#include "oracles/brute.hpp"

using cmrf::DistributionTable;
using cmrf::HighTempConfig;
using cmrf::IsingModel;
using cmrf::Stream;
using cmrf::WeightedStates;
using Set = std::vector<std::size_t>;

namespace {

IsingModel path(std::size_t n, double w) {
  std::vector<cmrf::Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, w});
  return IsingModel::from_edges(n, std::vector<double>(n, 0.0), edges);
}

// Single parity gadget: v1..v4 = 0..3, u1..u4 = 4..7.
IsingModel parity_gadget(double b) {
  std::vector<cmrf::Edge> edges;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) edges.push_back({i, 4 + j, i == j ? b : -b});
  return IsingModel::from_edges(8, std::vector<double>(8, 0.0), edges);
}

// Exact D(S1, S2) for coordinate v from a full probability vector.
double exact_d(const std::vector<double>& p, std::size_t n, std::size_t v, const Set& s1, const Set& s2) {
  Set u = s1;
  u.insert(u.end(), s2.begin(), s2.end());
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  double worst = 0.0;
  for (std::uint64_t c = 0; c < (std::uint64_t{1} << u.size()); ++c) {
    auto fix = [&](const Set& s) {
      std::vector<std::pair<std::size_t, int>> f;
      for (std::size_t w : s) {
        const std::size_t k = static_cast<std::size_t>(std::find(u.begin(), u.end(), w) - u.begin());
        f.push_back({w, ((c >> k) & 1U) ? 1 : -1});
      }
      return f;
    };
    worst = std::max(worst, std::abs(oracle::conditional(p, v, fix(s1)) - oracle::conditional(p, v, fix(s2))));
  }
  (void)n;
  return worst;
}

std::vector<Set> subsets_up_to(const Set& pool, std::size_t cap) {
  std::vector<Set> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pool.size()); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) > cap) continue;
    Set s;
    for (std::size_t k = 0; k < pool.size(); ++k)
      if ((mask >> k) & 1U) s.push_back(pool[k]);
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST(HighTempConfig, Defaults) {
  HighTempConfig cfg;
  cfg.b = 0.1;
  cfg.d = 4;
  cfg.epsilon = 0.3;
  // log(0.6 * 0.3 / 4) / log(0.4) = 3.39...
  EXPECT_EQ(cfg.effective_radius(), 4u);
  EXPECT_EQ(cfg.effective_subset_cap(), 4u);
  cfg.d = 1;
  EXPECT_EQ(cfg.effective_subset_cap(), 1u);
  EXPECT_EQ(cfg.effective_search_samples(10), static_cast<std::size_t>(std::ceil(200 * std::pow(std::log(10.0), 2))));
  EXPECT_DOUBLE_EQ(cfg.threshold(), 3 * 0.3 / 8);
  EXPECT_NEAR(cfg.epsilon_prime(), 0.3 * 0.8 / (4 * 0.9), 1e-15);
  cfg.b = 0.5;
  cfg.d = 2;
  EXPECT_THROW(cfg.validate(), cmrf::InvalidArgument);
  cfg.b = 0.1;
  cfg.subset_cap = 0;
  EXPECT_THROW(cfg.validate(), cmrf::InvalidArgument);
}

TEST(DStatistic, EqualSetsGiveZero) {
  Stream rng(1);
  const auto table = cmrf::full_distribution(oracle::random_model(rng, 4, 0.5, 0.8));
  const Set s{1, 3};
  EXPECT_EQ(cmrf::d_statistic(table, 0, s, s).value, 0.0);
}

TEST(DStatistic, ZeroModelGivesZero) {
  const auto table = cmrf::full_distribution(IsingModel::zero(4));
  EXPECT_NEAR(cmrf::d_statistic(table, 0, Set{}, Set{1, 2, 3}).value, 0.0, 1e-15);
  EXPECT_NEAR(cmrf::d_statistic(table, 2, Set{1}, Set{3}).value, 0.0, 1e-15);
}

TEST(DStatistic, ChainMatchesExactConditionals) {
  const auto model = path(3, 0.3);
  const auto p = oracle::probs(model);
  const double got = cmrf::d_statistic(cmrf::full_distribution(model), 0, Set{1}, Set{2}).value;
  EXPECT_NEAR(got, exact_d(p, 3, 0, {1}, {2}), 1e-12);
  // The gap is attained at x_1 = -x_2: (tanh 0.3 + tanh^2 0.3) / 2.
  const double t = std::tanh(0.3);
  EXPECT_NEAR(got, (t + t * t) / 2, 1e-12);
}

TEST(DStatistic, SkipsEmptyCellsAndRejectsNoData) {
  cmrf::SampleSet s(3);
  s.push_back({1, 1, 1});
  s.push_back({-1, -1, 1});
  const auto data = WeightedStates::from_samples(s);
  const auto d = cmrf::d_statistic(data, 0, Set{1}, Set{1, 2});
  EXPECT_EQ(d.cells, 4u);
  EXPECT_EQ(d.skipped, 2u);
  EXPECT_EQ(d.value, 0.0);
  WeightedStates empty;
  empty.m = 3;
  EXPECT_THROW(cmrf::d_statistic(empty, 0, Set{1}, Set{2}), cmrf::LearnerError);
  EXPECT_THROW(cmrf::d_statistic(data, 0, Set{0}, Set{2}), cmrf::InvalidArgument);
}

TEST(WeightedStates, CountsDuplicates) {
  cmrf::SampleSet s(2);
  for (int k = 0; k < 3; ++k) s.push_back({1, -1});
  s.push_back({-1, -1});
  const auto w = WeightedStates::from_samples(s);
  ASSERT_EQ(w.states.size(), 2u);
  EXPECT_EQ(w.states[0], 0u);
  EXPECT_EQ(w.weights[0], 1.0);
  EXPECT_EQ(w.states[1], 1u);
  EXPECT_EQ(w.weights[1], 3.0);
}

// D(S1, S1 u S2) from the exact law never exceeds the spread of the fully
// conditioned probabilities consistent with the S1 assignment.
TEST(DStatistic, SandwichProperty) {
  Stream rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 3 + trial % 3;
    const auto model = oracle::random_model(rng, n, 0.6, 0.7);
    const auto table = cmrf::full_distribution(model);
    const std::size_t v = rng.index(n);
    Set pool;
    for (std::size_t i = 0; i < n; ++i)
      if (i != v) pool.push_back(i);
    for (const Set& s1 : subsets_up_to(pool, 2)) {
      for (const Set& s2 : subsets_up_to(pool, 2)) {
        Set u = s1;
        u.insert(u.end(), s2.begin(), s2.end());
        std::sort(u.begin(), u.end());
        u.erase(std::unique(u.begin(), u.end()), u.end());
        const double d = cmrf::d_statistic(table, v, s1, u).value;
        double bound = 0.0;
        for (std::uint64_t c = 0; c < (std::uint64_t{1} << s1.size()); ++c) {
          double lo = 1.0, hi = 0.0;
          for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
            bool ok = true;
            for (std::size_t k = 0; k < s1.size(); ++k) ok &= ((x >> s1[k]) & 1U) == ((c >> k) & 1U);
            if (!ok) continue;
            const double f = cmrf::conditional_prob(model, v, oracle::decode(x, n));
            lo = std::min(lo, f);
            hi = std::max(hi, f);
          }
          bound = std::max(bound, hi - lo);
        }
        EXPECT_LE(d, bound + 1e-12);
      }
    }
  }
}

TEST(FindNeighborhoods, ZeroModelGivesEmptySets) {
  const auto data = WeightedStates::from_table(cmrf::full_distribution(IsingModel::zero(5)));
  HighTempConfig cfg;
  cfg.subset_cap = 2;
  const auto hoods = cmrf::find_neighborhoods(data, cfg);
  for (const auto& v : hoods.vertices) {
    EXPECT_TRUE(v.set.empty());
    EXPECT_FALSE(v.fallback);
  }
  EXPECT_EQ(hoods.fallbacks(), 0u);
}

TEST(FindNeighborhoods, ChainOfFiveMeetsExactCriterion) {
  const auto model = path(5, 0.3);
  const auto p = oracle::probs(model);
  HighTempConfig cfg;
  cfg.epsilon = 0.2;
  cfg.subset_cap = 2;
  const auto hoods = cmrf::find_neighborhoods(WeightedStates::from_table(cmrf::full_distribution(model)), cfg);
  for (std::size_t v = 0; v < 5; ++v) {
    const auto& got = hoods.vertices[v];
    EXPECT_FALSE(got.fallback);
    for (std::size_t w : got.set) {
      EXPECT_LE(std::max(v, w) - std::min(v, w), 2u) << "vertex " << v;
    }
    Set pool;
    for (std::size_t i = 0; i < 5; ++i)
      if (i != v) pool.push_back(i);
    for (const Set& s2 : subsets_up_to(pool, 2)) {
      Set u = got.set;
      u.insert(u.end(), s2.begin(), s2.end());
      std::sort(u.begin(), u.end());
      u.erase(std::unique(u.begin(), u.end()), u.end());
      EXPECT_LE(exact_d(p, 5, v, got.set, u), cfg.epsilon);
    }
  }
  // End vertices need exactly their single neighbor; the middle needs both.
  EXPECT_EQ(hoods.vertices[0].set, (Set{1}));
  EXPECT_EQ(hoods.vertices[4].set, (Set{3}));
  EXPECT_EQ(hoods.vertices[2].set, (Set{1, 3}));
}

TEST(FindNeighborhoods, ParityGadgetNeedsAllOtherFocusVertices) {
  const double b = 0.5;
  const auto cm = cmrf::Cmrf(parity_gadget(b), {0, 1, 2, 3});
  const auto table = cmrf::visible_marginal(cm);
  HighTempConfig cfg;
  cfg.epsilon = 0.1;
  cfg.subset_cap = 3;
  const auto hoods = cmrf::find_neighborhoods(WeightedStates::from_table(table), cfg);
  const double s = std::pow(std::sinh(2 * b), 4), c = std::pow(std::cosh(2 * b), 4);
  const double delta = s / (2 * c - s);
  ASSERT_GT(delta / 2, cfg.threshold());
  for (std::size_t v = 0; v < 4; ++v) {
    Set others;
    for (std::size_t w = 0; w < 4; ++w)
      if (w != v) others.push_back(w);
    EXPECT_EQ(hoods.vertices[v].set, others);
    EXPECT_FALSE(hoods.vertices[v].fallback);
    // Any proper subset leaves the conditional at exactly 1/2.
    EXPECT_NEAR(cmrf::d_statistic(table, v, Set{}, others).value, delta / 2, 1e-12);
  }
}

TEST(FindNeighborhoods, FallbackPicksSmallestWorstCase) {
  const auto model = path(4, 0.6);
  const auto table = cmrf::full_distribution(model);
  HighTempConfig cfg;
  cfg.epsilon = 0.01;
  cfg.subset_cap = 1;
  const auto hoods = cmrf::find_neighborhoods(WeightedStates::from_table(table), cfg);
  // Ends pass with their neighbor; interior vertices cannot with one coordinate.
  EXPECT_FALSE(hoods.vertices[0].fallback);
  EXPECT_EQ(hoods.vertices[0].set, (Set{1}));
  EXPECT_EQ(hoods.fallbacks(), 2u);
  for (std::size_t v : {1u, 2u}) {
    ASSERT_TRUE(hoods.vertices[v].fallback);
    Set pool;
    for (std::size_t i = 0; i < 4; ++i)
      if (i != v) pool.push_back(i);
    const auto candidates = subsets_up_to(pool, 1);
    double best = 1e9;
    Set best_set;
    for (const Set& s1 : candidates) {
      double worst = 0.0;
      for (const Set& s2 : candidates) {
        Set u = s1;
        u.insert(u.end(), s2.begin(), s2.end());
        std::sort(u.begin(), u.end());
        u.erase(std::unique(u.begin(), u.end()), u.end());
        worst = std::max(worst, cmrf::d_statistic(table, v, s1, u).value);
      }
      if (worst < best) {
        best = worst;
        best_set = s1;
      }
    }
    EXPECT_EQ(hoods.vertices[v].set, best_set);
    EXPECT_NEAR(hoods.vertices[v].worst_d, best, 1e-12);
    EXPECT_GT(hoods.vertices[v].worst_d, cfg.threshold());
  }
}

TEST(FindNeighborhoods, DeterministicAcrossWorkers) {
  Stream rng(11);
  const auto table = cmrf::full_distribution(oracle::random_model(rng, 7, 0.25, 0.5));
  cmrf::TableSource source(table, Stream(5));
  const auto data = WeightedStates::from_samples(source.draw(4000));
  HighTempConfig cfg;
  cfg.subset_cap = 2;
  cfg.workers = 1;
  const auto a = cmrf::find_neighborhoods(data, cfg);
  cfg.workers = 4;
  const auto b = cmrf::find_neighborhoods(data, cfg);
  for (std::size_t v = 0; v < 7; ++v) {
    EXPECT_EQ(a.vertices[v].set, b.vertices[v].set);
    EXPECT_EQ(a.vertices[v].worst_d, b.vertices[v].worst_d);
  }
}

TEST(FindNeighborhoods, TooManyEmptyCellsFailsLoudly) {
  Stream rng(3);
  const auto table = cmrf::full_distribution(oracle::random_model(rng, 8, 0.2, 0.5));
  cmrf::TableSource source(table, Stream(4));
  HighTempConfig cfg;
  cfg.search_samples = 20;
  cfg.subset_cap = 3;
  EXPECT_THROW(cmrf::find_neighborhoods(source, cfg), cmrf::LearnerError);
}

TEST(FitConditionalTables, ExactWeightsReproduceConditionals) {
  Stream rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5;
    const auto model = oracle::random_model(rng, n, 0.8, 0.6);
    const auto cm = cmrf::Cmrf::fully_visible(model);
    const auto data = WeightedStates::from_table(cmrf::full_distribution(model));
    std::vector<Set> hoods(n);
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t w = 0; w < n; ++w)
        if (w != v && (w + trial) % 3 != 0) hoods[v].push_back(w);
    const auto fit = cmrf::fit_conditional_tables(data, hoods);
    for (std::size_t v = 0; v < n; ++v) {
      const auto t = fit.estimator.table(v);
      for (std::uint64_t c = 0; c < t.size(); ++c) {
        cmrf::Condition cond;
        for (std::size_t k = 0; k < hoods[v].size(); ++k) {
          cond.vertices.push_back(hoods[v][k]);
          cond.values.push_back(((c >> k) & 1U) ? 1 : -1);
        }
        EXPECT_NEAR(t[c], cmrf::exact_conditional(cm, v, cond), 1e-10);
      }
      EXPECT_EQ(fit.empty_cells[v], 0u);
    }
  }
}

TEST(FitConditionalTables, ZeroModelConcentrates) {
  cmrf::TableSource source(cmrf::full_distribution(IsingModel::zero(4)), Stream(8));
  const auto samples = source.draw(100000);
  const auto fit = cmrf::fit_conditional_tables(samples, {{1}, {0}, {}, {0, 1}});
  for (std::size_t v = 0; v < 4; ++v)
    for (double f : fit.estimator.table(v)) EXPECT_NEAR(f, 0.5, 0.01);
}

TEST(FitConditionalTables, SingleEdge) {
  const auto model = IsingModel::from_edges(2, {0, 0}, {{0, 1, 0.3}});
  cmrf::TableSource source(cmrf::full_distribution(model), Stream(9));
  const auto fit = cmrf::fit_conditional_tables(source.draw(100000), {{1}, {0}});
  EXPECT_NEAR(fit.estimator.table(0)[1], 1 / (1 + std::exp(-0.6)), 0.01);
  EXPECT_NEAR(fit.estimator.table(1)[0], 1 / (1 + std::exp(0.6)), 0.01);
}

TEST(FitConditionalTables, EmptyCellsUseMarginal) {
  cmrf::SampleSet s(2);
  s.push_back({1, 1});
  s.push_back({1, 1});
  s.push_back({-1, 1});
  const auto fit = cmrf::fit_conditional_tables(s, {{}, {0}});
  ASSERT_EQ(fit.estimator.table(0).size(), 1u);
  EXPECT_NEAR(fit.estimator.table(0)[0], 2.0 / 3, 1e-15);
  EXPECT_EQ(fit.empty_cells[0], 0u);
  EXPECT_EQ(fit.estimator.table(1)[0], 1.0);
  EXPECT_EQ(fit.estimator.table(1)[1], 1.0);

  cmrf::SampleSet t(2);
  t.push_back({1, 1});
  t.push_back({1, -1});
  const auto g = cmrf::fit_conditional_tables(t, {{1}, {0}});
  EXPECT_EQ(g.empty_cells[1], 1u);
  EXPECT_EQ(g.estimator.table(1)[0], 0.5);
}

// With T = n ln n from the all-ones start, a coordinate is never refreshed
// with probability (1 - 1/n)^T, which leaves a known bias on the zero model.
TEST(LearnAndSample, ZeroModelStartBias) {
  const std::size_t n = 4;
  const auto truth = cmrf::full_distribution(IsingModel::zero(n));
  HighTempConfig cfg;
  cfg.subset_cap = 2;
  const auto report = cmrf::distortion_estimate(cmrf::high_temp_learner(cfg), truth, 10, 10000, Stream(12));
  const double stale = std::pow(1.0 - 1.0 / n, std::ceil(n * std::log(n)));
  EXPECT_NEAR(report.mean, n * stale / 2, 0.05);
}

TEST(LearnAndSample, ZeroModelNearUniform) {
  const auto truth = cmrf::full_distribution(IsingModel::zero(4));
  HighTempConfig cfg;
  cfg.subset_cap = 2;
  cfg.mcmc_multiplier = 4;
  const auto report = cmrf::distortion_estimate(cmrf::high_temp_learner(cfg), truth, 10, 10000, Stream(12));
  EXPECT_LE(report.mean, 0.3);
}

TEST(LearnAndSample, DeterministicGivenSeed) {
  Stream rng(13);
  const auto table = cmrf::full_distribution(oracle::random_model(rng, 5, 0.2, 0.5));
  HighTempConfig cfg;
  cfg.subset_cap = 2;
  cmrf::TableSource a(table, Stream(1)), b(table, Stream(1));
  Stream ra(2), rb(2);
  EXPECT_EQ(cmrf::learn_and_sample(a, cfg, ra), cmrf::learn_and_sample(b, cfg, rb));
  EXPECT_EQ(a.drawn(), cfg.effective_search_samples(5) + cfg.effective_fit_samples(5));
}

// Fully visible high-temperature models: the learner's distortion stays within
// twice the finite-sample baseline of a learner that knows the law.
TEST(LearnAndSample, WithinTwiceOracleBaseline) {
  Stream rng(17);
  for (int trial = 0; trial < 3; ++trial) {
    IsingModel model = IsingModel::zero(1);
    do {
      model = oracle::random_model(rng, 6, 0.2, 0.5);
    } while (cmrf::model_bounds(model).row_sum > 0.45);
    const auto truth = cmrf::full_distribution(model);
    HighTempConfig cfg;
    cfg.subset_cap = 2;
    cfg.sample_multiplier = 2000;
    cfg.mcmc_multiplier = 4;
    const std::size_t k = 3, r = 2000;
    const auto learned = cmrf::distortion_estimate(cmrf::high_temp_learner(cfg), truth, k, r, Stream(100 + trial));
    const auto baseline = cmrf::distortion_estimate(cmrf::oracle_cheat_learner(truth), truth, k, r, Stream(200 + trial));
    EXPECT_LE(learned.mean, 2 * baseline.mean) << "trial " << trial << " baseline " << baseline.mean;
  }
}
