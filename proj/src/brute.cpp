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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "cmrf/errors.hpp"
#include "cmrf/parallel.hpp"

namespace cmrf {

namespace {

std::vector<double> histogram(const SampleSet& samples) {
  std::vector<double> counts(std::size_t{1} << samples.dimension(), 0.0);
  for (std::size_t i = 0; i < samples.size(); ++i) counts[samples.index(i)] += 1.0;
  return counts;
}

// Sufficient statistics of state s: x_i for each i, then x_i x_j for i < j.
std::vector<double> features(std::uint64_t s, std::size_t n) {
  std::vector<double> f;
  f.reserve(n + n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) f.push_back(((s >> i) & 1U) ? 1.0 : -1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) f.push_back(f[i] * f[j]);
  return f;
}

IsingModel model_from_parameters(std::size_t n, const std::vector<double>& p) {
  std::vector<double> biases(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<Edge> edges;
  std::size_t k = n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++k)
      if (p[k] != 0.0) edges.push_back({i, j, p[k]});
  return IsingModel::from_edges(n, std::move(biases), edges);
}

struct Best {
  double ll = -std::numeric_limits<double>::infinity();
  std::uint64_t index = std::numeric_limits<std::uint64_t>::max();

  void offer(double value, std::uint64_t idx) {
    if (value > ll || (value == ll && idx < index)) {
      ll = value;
      index = idx;
    }
  }
};

}  // namespace

double default_mixing_rate(std::size_t m) { return std::pow(2.0 / std::exp(1.0), static_cast<double>(m)); }

CandidateFamily::CandidateFamily(std::size_t m, std::optional<double> lambda)
    : m_(m), lambda_(lambda ? *lambda : default_mixing_rate(m)) {
  if (!(lambda_ > 0.0 && lambda_ < 1.0)) throw InvalidArgument("mixing rate must lie in (0, 1)");
}

void CandidateFamily::add(DistributionTable table, std::string label) {
  if (table.dimension() != m_) throw InvalidArgument("candidate dimension mismatch");
  if (label.empty()) label = "candidate " + std::to_string(tables_.size());
  tables_.push_back(std::move(table));
  labels_.push_back(std::move(label));
}

DistributionTable CandidateFamily::mixed(std::size_t i) const {
  const auto& t = tables_.at(i);
  const double floor = lambda_ / static_cast<double>(t.states());
  std::vector<double> p(t.states());
  for (std::size_t s = 0; s < p.size(); ++s) p[s] = (1.0 - lambda_) * t[s] + floor;
  return DistributionTable(m_, std::move(p));
}

Selection likelihood_select(const CandidateFamily& family, const SampleSet& samples, unsigned workers) {
  if (family.size() == 0) throw InvalidArgument("likelihood_select: empty family");
  if (samples.dimension() != family.dimension()) throw InvalidArgument("likelihood_select: dimension mismatch");
  const auto counts = histogram(samples);
  Selection out;
  out.log_likelihoods.resize(family.size());
  parallel_for(
      family.size(),
      [&](std::size_t j) {
        const auto& t = family.table(j);
        const double floor = family.lambda() / static_cast<double>(t.states());
        double ll = 0.0;
        for (std::size_t s = 0; s < counts.size(); ++s)
          if (counts[s] > 0) ll += counts[s] * std::log((1.0 - family.lambda()) * t[s] + floor);
        out.log_likelihoods[j] = ll;
      },
      workers);
  for (std::size_t j = 1; j < family.size(); ++j)
    if (out.log_likelihoods[j] > out.log_likelihoods[out.index]) out.index = j;
  return out;
}

double selection_error_bound(std::size_t m, std::size_t k, std::size_t samples, double eps0) {
  if (samples == 0 || k < 1) throw InvalidArgument("sampling bound needs T > 0 and k >= 1");
  const double md = static_cast<double>(m);
  return std::pow(4 * md * md * std::log(static_cast<double>(k)) / static_cast<double>(samples), 0.25) +
         std::sqrt(std::exp(md) * eps0 / 2);
}

SampleSet mix_with_uniform(const SampleSet& samples, double lambda, Stream& rng) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("mixing rate must lie in [0, 1]");
  const std::size_t m = samples.dimension();
  SampleSet out(m);
  out.reserve(samples.size());
  std::vector<Spin> x(m);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (rng.uniform() < lambda) {
      for (auto& s : x) s = rng.bernoulli(0.5) ? 1 : -1;
      out.push_back(x);
    } else {
      out.push_back(samples[i]);
    }
  }
  return out;
}

ConversionResult mrf_list_conversion(const IsingModel& model, double epsilon, const ConversionOptions& opts) {
  const std::size_t n = model.size();
  if (n > opts.max_vertices) {
    throw CapExceeded("mrf_list_conversion on " + std::to_string(n) + " vertices exceeds cap " +
                      std::to_string(opts.max_vertices));
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("conversion epsilon must lie in (0, 1)");
  const auto logw = log_weights(model);
  const std::uint64_t anchor =
      static_cast<std::uint64_t>(std::max_element(logw.begin(), logw.end()) - logw.begin());
  const std::size_t dim = n + n * (n - 1) / 2;
  const auto fx = features(anchor, n);

  ConversionResult out{model, anchor, std::vector<double>(logw.size(), 0.0), 0.0, 0.0, 0};
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<std::vector<double>> ratio_rows(logw.size());
  for (std::uint64_t s = 0; s < logw.size(); ++s) {
    if (s == anchor) continue;
    const double ratio = std::exp(logw[s] - logw[anchor]);
    const double r = epsilon * std::floor(ratio / epsilon);
    out.lower[s] = r;
    auto a = features(s, n);
    for (std::size_t k = 0; k < dim; ++k) a[k] -= fx[k];
    ratio_rows[s] = a;
    rows.push_back(a);
    rhs.push_back(std::log(r + epsilon));
    if (r > 0.0) {
      for (double& v : a) v = -v;
      rows.push_back(a);
      rhs.push_back(-std::log(r));
    }
  }

  // Primal active-set method for min 1/2 |p|^2 s.t. G p <= h, started from
  // the input parameters, which satisfy every constraint.
  const std::size_t k = rows.size();
  const Eigen::Index d = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd g(static_cast<Eigen::Index>(k), d);
  Eigen::VectorXd h(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < dim; ++j) g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    h(static_cast<Eigen::Index>(i)) = rhs[i];
  }
  Eigen::VectorXd p(d);
  {
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) p(static_cast<Eigen::Index>(j++)) = model.bias(i);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = i + 1; l < n; ++l) p(static_cast<Eigen::Index>(j++)) = model.weight(i, l);
  }
  std::vector<std::size_t> working;
  Eigen::VectorXd lambda;
  auto working_rows = [&] {
    Eigen::MatrixXd gw(static_cast<Eigen::Index>(working.size()), d);
    for (std::size_t a = 0; a < working.size(); ++a) gw.row(static_cast<Eigen::Index>(a)) = g.row(static_cast<Eigen::Index>(working[a]));
    return gw;
  };
  double residual = std::numeric_limits<double>::infinity();
  std::size_t iter = 0;
  for (; iter < opts.max_sweeps; ++iter) {
    Eigen::VectorXd target = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd gw = working_rows();
    if (!working.empty()) {
      Eigen::VectorXd hw(static_cast<Eigen::Index>(working.size()));
      for (std::size_t a = 0; a < working.size(); ++a) hw(static_cast<Eigen::Index>(a)) = h(static_cast<Eigen::Index>(working[a]));
      target = gw.completeOrthogonalDecomposition().solve(hw);
    }
    const Eigen::VectorXd step = target - p;
    if (step.norm() <= 1e-13 * (1.0 + p.norm())) {
      p = target;
      lambda = working.empty() ? Eigen::VectorXd() : Eigen::VectorXd(gw.transpose().completeOrthogonalDecomposition().solve(-p));
      std::size_t drop = working.size();
      double most = -opts.tolerance;
      for (std::size_t a = 0; a < working.size(); ++a)
        if (lambda(static_cast<Eigen::Index>(a)) < most) {
          most = lambda(static_cast<Eigen::Index>(a));
          drop = a;
        }
      if (drop == working.size()) break;
      working.erase(working.begin() + static_cast<std::ptrdiff_t>(drop));
      continue;
    }
    double alpha = 1.0;
    std::size_t blocking = k;
    const Eigen::VectorXd gs = g * step;
    const Eigen::VectorXd sl = h - g * p;
    for (std::size_t i = 0; i < k; ++i) {
      if (std::find(working.begin(), working.end(), i) != working.end()) continue;
      const double rate = gs(static_cast<Eigen::Index>(i));
      if (rate <= 0.0) continue;
      const double t = std::max(0.0, sl(static_cast<Eigen::Index>(i))) / rate;
      if (t < alpha) {
        alpha = t;
        blocking = i;
      }
    }
    p += alpha * step;
    if (blocking < k) working.push_back(blocking);
  }
  out.sweeps = iter;

  // KKT residual: primal feasibility, dual feasibility and stationarity.
  {
    const Eigen::VectorXd sl = h - g * p;
    residual = std::max(0.0, -sl.minCoeff());
    Eigen::VectorXd grad = p;
    for (std::size_t a = 0; a < working.size(); ++a) {
      const double l = lambda.size() ? lambda(static_cast<Eigen::Index>(a)) : 0.0;
      residual = std::max(residual, -l);
      grad += l * g.row(static_cast<Eigen::Index>(working[a])).transpose();
    }
    residual = std::max(residual, grad.cwiseAbs().maxCoeff());
  }
  out.residual = residual;
  if (residual > opts.tolerance) {
    std::ostringstream msg;
    msg << "mrf_list_conversion did not converge after " << iter << " iterations";
    throw ConvergenceError(msg.str(), residual);
  }

  std::vector<double> params(p.data(), p.data() + d);
  out.model = model_from_parameters(n, params);
  for (std::uint64_t s = 0; s < logw.size(); ++s) {
    if (s == anchor) continue;
    double l = 0.0;
    for (std::size_t j = 0; j < dim; ++j) l += ratio_rows[s][j] * params[j];
    const double ratio = std::exp(l);
    out.max_violation = std::max({out.max_violation, out.lower[s] - ratio, ratio - (out.lower[s] + epsilon)});
  }
  return out;
}

double conversion_count_bound_log2(std::size_t n, double epsilon) {
  const double nd = static_cast<double>(n);
  return nd * nd * nd + nd + nd * nd * std::log2(2.0 + 1.0 / epsilon);
}

std::vector<double> grid_values(const ExhaustiveOptions& opts) {
  if (!(opts.step > 0.0) || !(opts.grid_max >= opts.grid_min)) throw InvalidArgument("invalid parameter grid");
  const auto count = static_cast<std::size_t>(std::floor((opts.grid_max - opts.grid_min) / opts.step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = opts.grid_min + static_cast<double>(i) * opts.step;
    if (std::abs(out[i]) < 1e-9 * opts.step) out[i] = 0.0;
  }
  return out;
}

IsingModel grid_model(std::size_t n, std::uint64_t index, const ExhaustiveOptions& opts) {
  const auto values = grid_values(opts);
  const std::size_t dim = n + n * (n - 1) / 2;
  std::vector<double> p(dim);
  for (std::size_t k = dim; k-- > 0;) {
    p[k] = values[index % values.size()];
    index /= values.size();
  }
  return model_from_parameters(n, p);
}

ExhaustiveResult exhaustive_select(const SampleSet& samples, std::size_t n, const ExhaustiveOptions& opts) {
  const std::size_t m = samples.dimension();
  if (m == 0 || m > n) throw InvalidArgument("exhaustive learner needs 1 <= m <= n visible coordinates");
  if (samples.size() == 0) throw InvalidArgument("exhaustive learner needs samples");
  const auto values = grid_values(opts);
  const std::size_t g = values.size();
  const std::size_t dim = n + n * (n - 1) / 2;
  const double total = std::pow(static_cast<double>(g), static_cast<double>(dim));
  if (total > opts.max_candidates) {
    std::ostringstream msg;
    msg << "exhaustive grid has " << total << " candidates, budget " << opts.max_candidates;
    throw CapExceeded(msg.str());
  }
  const double lambda = opts.lambda ? *opts.lambda : default_mixing_rate(m);
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidArgument("mixing rate must lie in (0, 1)");

  // Split the parameters into the visible block (biases and weights inside the
  // first m vertices) and the rest, which only enters through the log-sum over
  // the censored vertices.
  std::vector<std::size_t> vis_params, hid_params;
  std::vector<std::pair<std::size_t, std::size_t>> pair_of(dim);
  for (std::size_t i = 0; i < n; ++i) {
    pair_of[i] = {i, i};
    (i < m ? vis_params : hid_params).push_back(i);
  }
  {
    std::size_t k = n;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j, ++k) {
        pair_of[k] = {i, j};
        (j < m ? vis_params : hid_params).push_back(k);
      }
  }
  std::vector<double> place(dim);
  {
    double w = 1.0;
    for (std::size_t k = dim; k-- > 0;) {
      place[k] = w;
      w *= static_cast<double>(g);
    }
  }
  const std::size_t vstates = std::size_t{1} << m;
  const std::size_t hcount = n - m;
  auto spin = [](std::uint64_t s, std::size_t i) { return ((s >> i) & 1U) ? 1.0 : -1.0; };

  // Enumerate one block: per configuration, its contribution to every visible
  // state and its share of the global grid index.
  auto enumerate = [&](const std::vector<std::size_t>& params, bool hidden, std::vector<double>& contrib,
                       std::vector<std::uint64_t>& index) {
    std::size_t count = 1;
    for (std::size_t k = 0; k < params.size(); ++k) count *= g;
    contrib.assign(count * vstates, 0.0);
    index.assign(count, 0);
    std::vector<double> val(dim, 0.0);
    for (std::size_t c = 0; c < count; ++c) {
      std::size_t rest = c;
      double idx = 0.0;
      for (std::size_t k = params.size(); k-- > 0;) {
        const std::size_t digit = rest % g;
        rest /= g;
        val[params[k]] = values[digit];
        idx += static_cast<double>(digit) * place[params[k]];
      }
      index[c] = static_cast<std::uint64_t>(idx);
      for (std::uint64_t xv = 0; xv < vstates; ++xv) {
        if (!hidden) {
          double e = 0.0;
          for (std::size_t q : params) {
            const auto [i, j] = pair_of[q];
            e += val[q] * (i == j ? spin(xv, i) : spin(xv, i) * spin(xv, j));
          }
          contrib[c * vstates + xv] = e;
        } else {
          double mx = -std::numeric_limits<double>::infinity();
          std::vector<double> terms(std::size_t{1} << hcount);
          for (std::uint64_t xh = 0; xh < terms.size(); ++xh) {
            const std::uint64_t x = xv | (xh << m);
            double e = 0.0;
            for (std::size_t q : params) {
              const auto [i, j] = pair_of[q];
              e += val[q] * (i == j ? spin(x, i) : spin(x, i) * spin(x, j));
            }
            terms[xh] = e;
            mx = std::max(mx, e);
          }
          double z = 0.0;
          for (double t : terms) z += std::exp(t - mx);
          contrib[c * vstates + xv] = mx + std::log(z);
        }
      }
    }
    return count;
  };
  std::vector<double> fcon, gcon;
  std::vector<std::uint64_t> findex, gindex;
  const std::size_t fcount = enumerate(vis_params, false, fcon, findex);
  std::size_t gcount = enumerate(hid_params, true, gcon, gindex);

  // Censored blocks with identical visible log-weights (sign flips of the
  // hidden parameters) are interchangeable; keep the lowest grid index.
  {
    std::map<std::vector<double>, std::size_t> unique;
    for (std::size_t c = 0; c < gcount; ++c) {
      std::vector<double> key(gcon.begin() + static_cast<std::ptrdiff_t>(c * vstates),
                              gcon.begin() + static_cast<std::ptrdiff_t>((c + 1) * vstates));
      auto [it, fresh] = unique.emplace(std::move(key), c);
      if (!fresh && gindex[c] < gindex[it->second]) it->second = c;
    }
    std::vector<double> con;
    std::vector<std::uint64_t> idx;
    for (const auto& [key, c] : unique) {
      con.insert(con.end(), key.begin(), key.end());
      idx.push_back(gindex[c]);
    }
    gcon = std::move(con);
    gindex = std::move(idx);
    gcount = gindex.size();
  }

  // Exponentiate once per block, shifted for stability.
  auto exponentiate = [&](const std::vector<double>& con, std::size_t count) {
    std::vector<double> out(con.size());
    for (std::size_t c = 0; c < count; ++c) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s < vstates; ++s) mx = std::max(mx, con[c * vstates + s]);
      for (std::size_t s = 0; s < vstates; ++s) out[c * vstates + s] = std::exp(con[c * vstates + s] - mx);
    }
    return out;
  };
  const auto fexp = exponentiate(fcon, fcount);
  const auto gexp = exponentiate(gcon, gcount);

  const auto counts = histogram(samples);
  std::vector<std::size_t> seen;
  for (std::size_t s = 0; s < vstates; ++s)
    if (counts[s] > 0) seen.push_back(s);
  const double keep = 1.0 - lambda;
  const double floor = lambda / static_cast<double>(vstates);

  std::vector<Best> best(gcount);
  parallel_for(
      gcount,
      [&](std::size_t gc) {
        const double* ge = &gexp[gc * vstates];
        Best local;
        std::vector<double> w(vstates);
        for (std::size_t fc = 0; fc < fcount; ++fc) {
          const double* fe = &fexp[fc * vstates];
          double z = 0.0;
          for (std::size_t s = 0; s < vstates; ++s) {
            w[s] = fe[s] * ge[s];
            z += w[s];
          }
          const double scale = keep / z;
          double ll = 0.0;
          for (std::size_t s : seen) ll += counts[s] * std::log(w[s] * scale + floor);
          local.offer(ll, findex[fc] + gindex[gc]);
        }
        best[gc] = local;
      },
      opts.workers);
  Best winner;
  for (const Best& b : best) winner.offer(b.ll, b.index);

  IsingModel model = grid_model(n, winner.index, opts);
  std::vector<std::size_t> visible(m);
  for (std::size_t i = 0; i < m; ++i) visible[i] = i;
  DistributionTable table = visible_marginal(Cmrf(model, visible));
  return {std::move(table), std::move(model), winner.index, total, lambda, winner.ll};
}

ExhaustiveResult exhaustive_learn(SampleSource& source, std::size_t n, std::size_t m, const ExhaustiveOptions& opts,
                                  Stream& rng) {
  if (source.dimension() != m) throw InvalidArgument("exhaustive_learn: source dimension differs from m");
  const double lambda = opts.lambda ? *opts.lambda : default_mixing_rate(m);
  SampleSet samples = source.draw(opts.samples);
  if (opts.mix_samples) samples = mix_with_uniform(samples, lambda, rng);
  ExhaustiveOptions fixed = opts;
  fixed.lambda = lambda;
  return exhaustive_select(samples, n, fixed);
}

}  // namespace cmrf
