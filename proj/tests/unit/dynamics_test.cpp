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

#include <cmath>

#include "cmrf/errors.hpp"
#include "cmrf/metrics.hpp"
#include "gtest/gtest.h"
#include "oracles/brute.hpp"

using cmrf::ConditionalEstimator;
using cmrf::DistributionTable;
using cmrf::IsingModel;
using cmrf::SpinVector;
using cmrf::Stream;

namespace {

ConditionalEstimator constant_estimator(std::size_t m, double value) {
  ConditionalEstimator f(m);
  for (std::size_t v = 0; v < m; ++v) f.set(v, {}, {value});
  return f;
}

DistributionTable run_many(const ConditionalEstimator& f, std::size_t steps, std::size_t runs, Stream rng,
                           const DistributionTable* start = nullptr) {
  cmrf::SampleSet out(f.dimension());
  out.reserve(runs);
  for (std::size_t r = 0; r < runs; ++r) {
    SpinVector x0 = start ? cmrf::sample_exact(*start, rng) : SpinVector(f.dimension(), 1);
    out.push_back(cmrf::approximate_mcmc(f, x0, steps, rng));
  }
  return cmrf::empirical_distribution(out);
}

}  // namespace

TEST(ApproximateMcmc, ZeroStepsReturnsStart) {
  Stream rng(61);
  SpinVector x{1, -1, -1, 1};
  EXPECT_EQ(cmrf::approximate_mcmc(constant_estimator(4, 0.5), x, 0, rng), x);
  EXPECT_EQ(rng.counter(), 0u);
}

TEST(ApproximateMcmc, AlwaysPlusOneConverges) {
  const std::size_t m = 6;
  const auto steps = static_cast<std::size_t>(50 * m * std::log(m));
  Stream rng(62);
  for (int r = 0; r < 100; ++r) {
    EXPECT_EQ(cmrf::approximate_mcmc(constant_estimator(m, 1.0), SpinVector(m, -1), steps, rng), SpinVector(m, 1));
  }
}

TEST(ApproximateMcmc, SingleEdgeMatchesExactLaw) {
  auto model = IsingModel::from_edges(2, {0, 0}, {{0, 1, 0.3}});
  const auto steps = static_cast<std::size_t>(std::ceil(10 * 2 * std::log(2.0)));
  auto emp = run_many(cmrf::exact_estimator(model), steps, 100000, Stream(63));
  EXPECT_LE(cmrf::tv_distance(emp, cmrf::full_distribution(model)), 0.02);
}

TEST(ApproximateMcmc, StationaryFromExactStart) {
  Stream gen(64);
  for (int trial = 0; trial < 4; ++trial) {
    auto model = oracle::random_model(gen, 2 + trial % 3, 0.6, 0.8);
    auto exact = cmrf::full_distribution(model);
    for (std::size_t steps : {0u, 1u, 7u}) {
      auto emp = run_many(cmrf::exact_estimator(model), steps, 100000, gen.child("run", trial * 10 + steps), &exact);
      EXPECT_LE(cmrf::tv_distance(emp, exact), 0.02);
    }
  }
}

TEST(ApproximateMcmc, Deterministic) {
  auto f = cmrf::exact_estimator(oracle::random_model(*std::make_unique<Stream>(65), 5, 0.5, 0.5));
  Stream a(66), b(66);
  EXPECT_EQ(cmrf::approximate_mcmc(f, SpinVector(5, 1), 100, a), cmrf::approximate_mcmc(f, SpinVector(5, 1), 100, b));
  EXPECT_THROW(cmrf::approximate_mcmc(f, SpinVector(4, 1), 1, a), cmrf::InvalidArgument);
}

TEST(Estimators, TableEstimatorMatchesExactEstimator) {
  Stream gen(67);
  auto model = oracle::random_model(gen, 5, 0.8, 0.6);
  auto exact = cmrf::exact_estimator(model);
  auto table = cmrf::table_estimator(cmrf::full_distribution(model));
  for (std::uint64_t s = 0; s < 32; ++s) {
    auto x = SpinVector::from_index(s, 5);
    for (std::size_t v = 0; v < 5; ++v) {
      EXPECT_NEAR(exact(v, x.view()), table(v, x.view()), 1e-12);
      EXPECT_NEAR(exact(v, x.view()), cmrf::conditional_prob(model, v, x.view()), 1e-15);
    }
  }
}

TEST(Estimators, ShiftClips) {
  auto f = cmrf::shifted(constant_estimator(2, 0.98), 0.05);
  EXPECT_EQ(f(0, SpinVector{1, 1}.view()), 1.0);
  auto g = cmrf::shifted(constant_estimator(2, 0.02), -0.05);
  EXPECT_EQ(g(1, SpinVector{1, 1}.view()), 0.0);
}

TEST(Estimators, Validation) {
  ConditionalEstimator f(3, 1);
  EXPECT_THROW(f.set(0, {1, 2}, {0.5, 0.5, 0.5, 0.5}), cmrf::InvalidArgument);
  EXPECT_THROW(f.set(0, {0}, {0.5, 0.5}), cmrf::InvalidArgument);
  EXPECT_THROW(f.set(0, {1}, {0.5}), cmrf::InvalidArgument);
  EXPECT_THROW(f.set(0, {1}, {0.5, 1.5}), cmrf::InvalidArgument);
  EXPECT_NO_THROW(f.set(0, {2}, {0.25, 0.75}));
  EXPECT_EQ(f(0, SpinVector{1, 1, -1}.view()), 0.25);
}

TEST(DefaultSteps, Formula) {
  EXPECT_EQ(cmrf::default_steps(1), 0u);
  EXPECT_EQ(cmrf::default_steps(2), 2u);
  EXPECT_EQ(cmrf::default_steps(8), 17u);
}

TEST(GlauberBoundary, ZeroModelUniform) {
  auto model = IsingModel::zero(3);
  std::vector<std::size_t> w = {0, 1, 2};
  Stream rng(68);
  cmrf::SampleSet out(3);
  for (int r = 0; r < 100000; ++r) out.push_back(cmrf::glauber_boundary(model, SpinVector(3, 1), 60, w, rng));
  EXPECT_LE(cmrf::tv_distance(cmrf::empirical_distribution(out), DistributionTable::uniform(3)), 0.02);
}

TEST(GlauberBoundary, SingleVertexWindow) {
  auto model = IsingModel::from_edges(2, {0.1, -0.2}, {{0, 1, 0.5}});
  std::vector<std::size_t> w = {0};
  Stream rng(69);
  int plus = 0;
  const int runs = 100000;
  for (int r = 0; r < runs; ++r) {
    auto x = cmrf::glauber_boundary(model, SpinVector{-1, 1}, 20, w, rng);
    ASSERT_EQ(x[1], 1);
    plus += x[0] > 0;
  }
  const double exact = cmrf::exact_conditional(cmrf::Cmrf::fully_visible(model), 0, {{1}, {1}});
  EXPECT_NEAR(static_cast<double>(plus) / runs, exact, 0.01);
}

TEST(GlauberBoundary, NeverTouchesOutsideWindow) {
  Stream gen(70);
  for (int trial = 0; trial < 50; ++trial) {
    auto model = oracle::random_model(gen, 6, 1.0, 0.6);
    std::vector<std::size_t> w = {1, 4, 4};
    auto x0 = SpinVector::from_index(gen.index(64), 6);
    auto x = cmrf::glauber_boundary(model, x0, 200, w, gen);
    for (std::size_t i : {0u, 2u, 3u, 5u}) EXPECT_EQ(x[i], x0[i]);
  }
  Stream rng(1);
  EXPECT_EQ(cmrf::glauber_boundary(IsingModel::zero(2), SpinVector{1, -1}, 0, std::vector<std::size_t>{0}, rng),
            (SpinVector{1, -1}));
  EXPECT_THROW(cmrf::glauber_boundary(IsingModel::zero(2), SpinVector{1, -1}, 5, {}, rng), cmrf::InvalidArgument);
}

TEST(CoupledChains, IdenticalChainsStayTogether) {
  Stream gen(71);
  auto f = cmrf::exact_estimator(oracle::random_model(gen, 6, 0.5, 0.5));
  auto x0 = SpinVector::from_index(37, 6);
  auto trace = cmrf::coupled_chains(f, f, x0, x0, 500, gen, true);
  ASSERT_EQ(trace.steps.size(), 500u);
  for (const auto& s : trace.steps) EXPECT_EQ(s.hamming, 0u);
  EXPECT_EQ(trace.first, trace.second);
}

TEST(CoupledChains, ReplaysSingleChainStream) {
  Stream gen(72);
  auto fa = cmrf::exact_estimator(oracle::random_model(gen, 5, 0.5, 0.5));
  auto fb = cmrf::shifted(fa, 0.1);
  Stream a(73), b(73), c(73);
  auto trace = cmrf::coupled_chains(fa, fb, SpinVector(5, 1), SpinVector(5, -1), 40, a, true);
  EXPECT_EQ(trace.first, cmrf::approximate_mcmc(fa, SpinVector(5, 1), 40, b));
  EXPECT_EQ(trace.second, cmrf::approximate_mcmc(fb, SpinVector(5, -1), 40, c));
  for (const auto& s : trace.steps) EXPECT_LE(s.hamming, 5u);
  EXPECT_EQ(trace.steps.back().hamming, trace.final_hamming());
}

TEST(CoupledChains, ZeroModelCollapsesPerCoordinate) {
  const std::size_t n = 6;
  auto model = IsingModel::zero(n);
  auto f = cmrf::exact_estimator(model);
  auto exact = cmrf::full_distribution(model);
  const std::size_t steps = cmrf::default_steps(n);
  Stream rng(74);
  const int runs = 20000;
  double total = 0, sq = 0;
  for (int r = 0; r < runs; ++r) {
    auto xb = cmrf::sample_exact(exact, rng);
    const double d = static_cast<double>(cmrf::coupled_chains(f, f, SpinVector(n, 1), xb, steps, rng).final_hamming());
    total += d;
    sq += d * d;
  }
  const double mean = total / runs;
  const double sigma = std::sqrt((sq / runs - mean * mean) / runs);
  // Each coordinate still differs only if never updated, and then with probability 1/2.
  const double expected = 0.5 * n * std::pow(1 - 1.0 / n, static_cast<double>(steps));
  EXPECT_LE(mean, n * std::pow(1 - 1.0 / n, static_cast<double>(steps)) + 3 * sigma);
  EXPECT_NEAR(mean, expected, 4 * sigma);
}

TEST(CoupledChains, DistanceContractsAtHighTemperature) {
  const std::size_t n = 6;
  std::vector<cmrf::Edge> edges;
  for (std::size_t i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 0.2});
  auto f = cmrf::exact_estimator(IsingModel::from_edges(n, std::vector<double>(n, 0.1), edges));
  const std::size_t horizon = 60;
  std::vector<double> mean(horizon, 0.0);
  Stream rng(75);
  const int runs = 10000;
  for (int r = 0; r < runs; ++r) {
    auto trace = cmrf::coupled_chains(f, f, SpinVector(n, 1), SpinVector(n, -1), horizon, rng, true);
    for (const auto& s : trace.steps) mean[s.step] += static_cast<double>(s.hamming) / runs;
  }
  // Least-squares slope with a 95% upper confidence limit.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t t = 0; t < horizon; ++t) {
    sx += t;
    sy += mean[t];
    sxx += double(t) * t;
    sxy += t * mean[t];
  }
  const double k = horizon;
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  const double icept = (sy - slope * sx) / k;
  double rss = 0;
  for (std::size_t t = 0; t < horizon; ++t) rss += std::pow(mean[t] - icept - slope * t, 2);
  const double se = std::sqrt(rss / (k - 2) / (sxx - sx * sx / k));
  EXPECT_LE(slope + 1.96 * se, 0.0);
  EXPECT_THROW(cmrf::coupled_chains(f, ConditionalEstimator(n - 1), SpinVector(n, 1), SpinVector(n, 1), 1, rng),
               cmrf::InvalidArgument);
}
