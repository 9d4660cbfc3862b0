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

#include "cmrf/metrics.hpp"

#include <chrono>
#include <cmath>

#include "cmrf/errors.hpp"
#include "gtest/gtest.h"
#include "oracles/brute.hpp"
#include "oracles/coupling_lp.hpp"

using cmrf::DistributionTable;
using cmrf::IsingModel;
using cmrf::SpinVector;
using cmrf::Stream;

namespace {

// Random table with a random fraction of exact zeros.
DistributionTable random_table(Stream& rng, std::size_t m, double zero_fraction = 0.0) {
  std::vector<double> w(std::size_t{1} << m);
  double total = 0;
  for (auto& x : w) {
    x = rng.uniform() < zero_fraction ? 0.0 : -std::log(1 - rng.uniform());
    total += x;
  }
  if (total == 0) {
    w[0] = 1;
    total = 1;
  }
  for (auto& x : w) x /= total;
  return DistributionTable(m, w);
}

std::vector<double> as_vector(const DistributionTable& t) { return {t.probs().begin(), t.probs().end()}; }

}  // namespace

TEST(TvDistance, Examples) {
  auto u = DistributionTable::uniform(3);
  EXPECT_EQ(cmrf::tv_distance(u, u), 0.0);
  EXPECT_EQ(cmrf::tv_distance(DistributionTable::point_mass(2, 0), DistributionTable::point_mass(2, 3)), 1.0);
  EXPECT_THROW(cmrf::tv_distance(u, DistributionTable::uniform(2)), cmrf::InvalidArgument);
}

TEST(Emd, Examples) {
  auto u = DistributionTable::uniform(4);
  EXPECT_NEAR(cmrf::emd_exact(u, u), 0.0, 1e-15);
  EXPECT_NEAR(cmrf::emd_exact(DistributionTable::point_mass(5, 31), DistributionTable::point_mass(5, 0)), 5.0, 1e-12);
  EXPECT_NEAR(cmrf::emd_exact(DistributionTable::uniform(2), DistributionTable::point_mass(2, 3)), 1.0, 1e-12);
  EXPECT_THROW(cmrf::emd_exact(DistributionTable::uniform(13), DistributionTable::uniform(13)), cmrf::CapExceeded);
  EXPECT_THROW(cmrf::emd_exact(u, DistributionTable::uniform(3)), cmrf::InvalidArgument);
}

TEST(Emd, MatchesCouplingLp) {
  Stream rng(41);
  for (std::size_t m = 0; m <= 3; ++m) {
    for (int trial = 0; trial < 60; ++trial) {
      const double zeros = (trial % 3) * 0.3;
      auto p = random_table(rng, m, zeros);
      auto q = random_table(rng, m, zeros);
      auto res = cmrf::emd_solve(p, q);
      EXPECT_NEAR(res.value, oracle::coupling_lp(as_vector(p), as_vector(q)), 1e-9) << "m=" << m;
      EXPECT_NEAR(res.value, res.dual_bound, 1e-9);
    }
  }
}

TEST(Emd, MetricAxioms) {
  Stream rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + rng.index(6);
    auto p = random_table(rng, m, 0.2);
    auto q = random_table(rng, m, 0.2);
    auto r = random_table(rng, m, 0.2);
    const double pq = cmrf::emd_exact(p, q);
    EXPECT_NEAR(pq, cmrf::emd_exact(q, p), 1e-9);
    EXPECT_LE(pq, cmrf::emd_exact(p, r) + cmrf::emd_exact(r, q) + 1e-9);
    EXPECT_GE(pq, 0.0);
  }
}

TEST(Emd, SandwichedByTv) {
  Stream rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + rng.index(6);
    auto p = random_table(rng, m, 0.3);
    auto q = random_table(rng, m, 0.3);
    const double tv = cmrf::tv_distance(p, q);
    const double emd = cmrf::emd_exact(p, q);
    EXPECT_LE(tv, emd + 1e-9);
    EXPECT_LE(emd, static_cast<double>(m) * tv + 1e-9);
  }
}

TEST(Emd, ProductOfIndependentCoordinatesIsSumOfMarginalShifts) {
  // For product laws the optimal coupling is coordinatewise.
  const std::size_t m = 10;
  std::vector<double> a(m), b(m);
  Stream rng(44);
  for (std::size_t i = 0; i < m; ++i) {
    a[i] = rng.uniform();
    b[i] = rng.uniform();
  }
  auto product = [&](const std::vector<double>& pr) {
    std::vector<double> t(std::size_t{1} << m);
    for (std::uint64_t s = 0; s < t.size(); ++s) {
      double v = 1;
      for (std::size_t i = 0; i < m; ++i) v *= ((s >> i) & 1U) ? pr[i] : 1 - pr[i];
      t[s] = v;
    }
    return DistributionTable(m, t);
  };
  double expected = 0;
  for (std::size_t i = 0; i < m; ++i) expected += std::abs(a[i] - b[i]);
  EXPECT_NEAR(cmrf::emd_exact(product(a), product(b)), expected, 1e-9);
}

TEST(Emd, TwelveCoordinatesIsFast) {
  Stream rng(45);
  auto p = random_table(rng, 12);
  auto q = random_table(rng, 12, 0.5);
  const auto start = std::chrono::steady_clock::now();
  auto res = cmrf::emd_solve(p, q);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_NEAR(res.value, res.dual_bound, 1e-9);
  EXPECT_LT(secs, 5.0);
}

TEST(Emd, PruningIsRecorded) {
  std::vector<double> w(4, 0.0);
  w[0] = 1 - 1e-16;
  w[3] = 1e-16;
  auto res = cmrf::emd_solve(DistributionTable(2, w), DistributionTable::point_mass(2, 0));
  EXPECT_NEAR(res.value, 0.0, 1e-15);
  EXPECT_GT(res.pruned_mass, 0.0);
}

TEST(EmpiricalDistribution, Examples) {
  cmrf::SampleSet one(3);
  one.push_back(SpinVector{1, -1, 1});
  auto t = cmrf::empirical_distribution(one);
  EXPECT_EQ(t[5], 1.0);

  cmrf::SampleSet all(3);
  for (std::uint64_t s = 0; s < 8; ++s) all.push_back(SpinVector::from_index(s, 3));
  auto u = cmrf::empirical_distribution(all);
  for (double p : u.probs()) EXPECT_EQ(p, 0.125);

  EXPECT_THROW(cmrf::empirical_distribution(cmrf::SampleSet(3)), cmrf::InvalidArgument);
}

TEST(Distortion, OracleCheatIsSmall) {
  Stream rng(46);
  auto truth = cmrf::full_distribution(oracle::random_model(rng, 3, 0.5, 0.7));
  auto rep = cmrf::distortion_estimate(cmrf::oracle_cheat_learner(truth), truth, 4, 100000, Stream(47));
  EXPECT_LE(rep.mean, 0.1);
  EXPECT_EQ(rep.per_stream.size(), 4u);
  EXPECT_EQ(rep.samples_per_stream, 0u);
}

TEST(Distortion, ConstantAndParrotOnUniform) {
  auto truth = cmrf::visible_marginal(cmrf::Cmrf::fully_visible(IsingModel::zero(4)));
  auto constant = cmrf::distortion_estimate(cmrf::constant_learner(SpinVector(4, 1)), truth, 3, 1000, Stream(48));
  EXPECT_NEAR(constant.mean, 2.0, 0.05);
  auto parrot = cmrf::distortion_estimate(cmrf::parrot_learner(), truth, 5, 1000, Stream(49));
  EXPECT_NEAR(parrot.mean, 2.0, 0.05);
  EXPECT_EQ(parrot.samples_per_stream, 1u);
}

TEST(Distortion, OracleCheatShrinksWithOutputs) {
  Stream rng(50);
  auto truth = cmrf::full_distribution(oracle::random_model(rng, 4, 0.5, 0.7));
  double previous = 1e9;
  for (std::size_t r : {1000u, 10000u, 100000u}) {
    auto rep = cmrf::distortion_estimate(cmrf::oracle_cheat_learner(truth), truth, 5, r, Stream(51));
    EXPECT_LT(rep.mean, previous);
    previous = rep.mean;
  }
}

TEST(Distortion, DeterministicAcrossWorkerCounts) {
  auto truth = cmrf::full_distribution(IsingModel::from_edges(3, {0.1, 0, 0}, {{0, 1, 0.4}}));
  cmrf::DistortionOptions one, many;
  one.workers = 1;
  many.workers = 4;
  auto a = cmrf::distortion_estimate(cmrf::oracle_cheat_learner(truth), truth, 6, 500, Stream(52), one);
  auto b = cmrf::distortion_estimate(cmrf::oracle_cheat_learner(truth), truth, 6, 500, Stream(52), many);
  EXPECT_EQ(a.per_stream, b.per_stream);
}
