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

#include "cmrf/high_girth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>

#include "cmrf/errors.hpp"
#include "cmrf/parallel.hpp"

namespace cmrf {

namespace {

constexpr std::size_t kBlock = 4096;

struct Moments {
  std::vector<std::int64_t> first;   // sum x_i
  std::vector<std::int64_t> second;  // sum x_i x_j, upper triangle incl. diagonal
};

}  // namespace

std::size_t CorrelationMatrix::constant_columns() const {
  return static_cast<std::size_t>(std::count(constant.begin(), constant.end(), true));
}

CorrelationMatrix pairwise_correlations(const SampleSet& samples, unsigned workers) {
  const std::size_t m = samples.dimension();
  const std::size_t count = samples.size();
  if (count < 2) throw InvalidArgument("pairwise_correlations needs at least 2 samples");
  const std::size_t blocks = (count + kBlock - 1) / kBlock;
  std::vector<Moments> partial(blocks);
  parallel_for(
      blocks,
      [&](std::size_t b) {
        Moments& mo = partial[b];
        mo.first.assign(m, 0);
        mo.second.assign(m * m, 0);
        const std::size_t end = std::min(count, (b + 1) * kBlock);
        for (std::size_t s = b * kBlock; s < end; ++s) {
          const auto x = samples[s];
          for (std::size_t i = 0; i < m; ++i) {
            mo.first[i] += x[i];
            for (std::size_t j = i + 1; j < m; ++j) mo.second[i * m + j] += x[i] * x[j];
          }
        }
      },
      workers);
  Moments total{std::vector<std::int64_t>(m, 0), std::vector<std::int64_t>(m * m, 0)};
  for (const Moments& mo : partial) {
    for (std::size_t i = 0; i < m; ++i) total.first[i] += mo.first[i];
    for (std::size_t k = 0; k < m * m; ++k) total.second[k] += mo.second[k];
  }

  CorrelationMatrix out;
  out.m = m;
  out.samples = count;
  out.values.assign(m * m, 0.0);
  out.constant.assign(m, false);
  const double n = static_cast<double>(count);
  std::vector<double> mean(m), var(m);
  for (std::size_t i = 0; i < m; ++i) {
    mean[i] = static_cast<double>(total.first[i]) / n;
    var[i] = 1.0 - mean[i] * mean[i];
    out.constant[i] = std::llabs(total.first[i]) == static_cast<long long>(count);
  }
  for (std::size_t i = 0; i < m; ++i) {
    out.values[i * m + i] = 1.0;
    for (std::size_t j = i + 1; j < m; ++j) {
      double r = 0.0;
      if (!out.constant[i] && !out.constant[j]) {
        const double cov = static_cast<double>(total.second[i * m + j]) / n - mean[i] * mean[j];
        r = std::clamp(cov / std::sqrt(var[i] * var[j]), -1.0, 1.0);
      }
      out.values[i * m + j] = out.values[j * m + i] = r;
    }
  }
  return out;
}

std::size_t NeighborSets::truncations() const {
  return static_cast<std::size_t>(std::count(truncated.begin(), truncated.end(), true));
}

NeighborSets neighbor_sets_by_threshold(const CorrelationMatrix& rho, double rho0, std::size_t cap) {
  if (!(rho0 > 0.0)) throw InvalidArgument("rho0 must be positive");
  const std::size_t m = rho.m;
  NeighborSets out{std::vector<std::vector<std::size_t>>(m), std::vector<bool>(m, false)};
  for (std::size_t v = 0; v < m; ++v) {
    auto& s = out.sets[v];
    for (std::size_t u = 0; u < m; ++u)
      if (u != v && std::abs(rho(v, u)) >= rho0) s.push_back(u);
    if (s.size() > cap) {
      std::stable_sort(s.begin(), s.end(),
                       [&](std::size_t a, std::size_t b) { return std::abs(rho(v, a)) > std::abs(rho(v, b)); });
      s.resize(cap);
      std::sort(s.begin(), s.end());
      out.truncated[v] = true;
    }
  }
  return out;
}

double asymptotic_rho0(std::size_t n_s) {
  if (n_s < 3) throw InvalidArgument("1/ln(ln(n)) needs n >= 3");
  return 1.0 / std::log(std::log(static_cast<double>(n_s)));
}

void HighGirthConfig::validate() const {
  if (!asymptotic_threshold && !(rho0 > 0.0)) throw InvalidArgument("rho0 must be positive");
  if (samples && *samples < 2) throw InvalidArgument("high-girth learner needs at least 2 samples");
  if (!(mcmc_multiplier > 0.0)) throw InvalidArgument("mcmc multiplier must be positive");
}

double HighGirthConfig::effective_rho0(std::size_t n_s) const {
  return asymptotic_threshold ? asymptotic_rho0(n_s) : rho0;
}

HighGirthFit fit_high_girth(SampleSource& source, const HighGirthConfig& cfg) {
  cfg.validate();
  const std::size_t n_s = source.dimension();
  const auto samples = source.draw(std::max<std::size_t>(2, cfg.effective_samples(n_s)));
  CorrelationMatrix rho = pairwise_correlations(samples, cfg.workers);
  NeighborSets neighbors = neighbor_sets_by_threshold(rho, cfg.effective_rho0(n_s), cfg.table_cap);
  FittedTables tables = fit_conditional_tables(samples, neighbors.sets);
  const double md = static_cast<double>(n_s);
  const auto steps = n_s > 1 ? static_cast<std::size_t>(std::ceil(cfg.mcmc_multiplier * md * std::log(md))) : 0;
  FrozenSampler sampler{tables.estimator, steps};
  return {std::move(rho), std::move(neighbors), std::move(tables), std::move(sampler)};
}

SpinVector high_girth_sample(SampleSource& source, const HighGirthConfig& cfg, Stream& rng) {
  return fit_high_girth(source, cfg).sampler(rng);
}

Learner high_girth_learner(HighGirthConfig cfg) {
  cfg.validate();
  return [cfg](SampleSource& source, Stream&) -> OutputSampler {
    auto frozen = std::make_shared<const FrozenSampler>(fit_high_girth(source, cfg).sampler);
    return [frozen](Stream& rng) { return (*frozen)(rng); };
  };
}

double girth_correlation_lower_bound(double b, double delta, double d, std::size_t r, std::size_t r_prime) {
  if (!(b > 0.0) || !(d >= 0.0) || !(b * d < 1.0)) throw InvalidArgument("lower bound requires b > 0 and bd < 1");
  if (!(delta > 0.0) || delta > b) throw InvalidArgument("lower bound requires 0 < delta <= b");
  if (!(2 * r_prime < r)) throw InvalidArgument("lower bound requires r' < r / 2");
  const double rp = static_cast<double>(r_prime);
  const double bd = b * d;
  return std::exp(-4.0 * rp) * std::pow(std::tanh(delta), rp) -
         2.0 * std::pow(bd, static_cast<double>(r) / 2.0) / (1.0 - bd);
}

}  // namespace cmrf
