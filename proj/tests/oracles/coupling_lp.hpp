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

#ifndef CMRF_TESTS_ORACLES_COUPLING_LP_HPP
#define CMRF_TESTS_ORACLES_COUPLING_LP_HPP

// Optimal transport under Hamming cost as a dense LP over all couplings,
// solved by a two-phase tableau simplex with Bland's rule. Only for tiny m.

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace oracle {

class Simplex {
 public:
  // minimize c.x subject to A x = b, x >= 0, with b >= 0.
  Simplex(const std::vector<std::vector<long double>>& a, const std::vector<long double>& b,
          const std::vector<long double>& c)
      : rows_(a.size()), vars_(c.size()) {
    cols_ = vars_ + rows_ + 1;
    t_.assign(rows_ + 1, std::vector<long double>(cols_, 0));
    basis_.resize(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < vars_; ++j) t_[i][j] = a[i][j];
      t_[i][vars_ + i] = 1;
      t_[i][cols_ - 1] = b[i];
      basis_[i] = vars_ + i;
    }
    // Phase 1: minimize the sum of artificials.
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (j < vars_ || j == cols_ - 1) t_[rows_][j] -= t_[i][j];
    run(cols_ - 1);
    if (-t_[rows_][cols_ - 1] > 1e-12L) throw std::runtime_error("coupling LP infeasible");
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] < vars_) continue;
      for (std::size_t j = 0; j < vars_; ++j) {
        if (std::fabs(t_[i][j]) > 1e-12L) {
          pivot(i, j);
          break;
        }
      }
    }
    // Phase 2 objective over original variables only.
    std::fill(t_[rows_].begin(), t_[rows_].end(), 0);
    for (std::size_t j = 0; j < vars_; ++j) t_[rows_][j] = c[j];
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] >= vars_) continue;
      const long double f = t_[rows_][basis_[i]];
      if (f == 0) continue;
      for (std::size_t j = 0; j < cols_; ++j) t_[rows_][j] -= f * t_[i][j];
    }
    run(vars_);
    value_ = -t_[rows_][cols_ - 1];
  }

  long double value() const { return value_; }

 private:
  void run(std::size_t allowed) {
    for (int iter = 0; iter < 100000; ++iter) {
      std::size_t enter = SIZE_MAX;
      for (std::size_t j = 0; j < allowed && j < cols_ - 1; ++j) {
        if (t_[rows_][j] < -1e-15L) {
          enter = j;
          break;
        }
      }
      if (enter == SIZE_MAX) return;
      std::size_t leave = SIZE_MAX;
      long double best = 0;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (t_[i][enter] <= 1e-15L) continue;
        const long double r = t_[i][cols_ - 1] / t_[i][enter];
        if (leave == SIZE_MAX || r < best - 1e-18L || (std::fabs(r - best) <= 1e-18L && basis_[i] < basis_[leave])) {
          leave = i;
          best = r;
        }
      }
      if (leave == SIZE_MAX) throw std::runtime_error("coupling LP unbounded");
      pivot(leave, enter);
    }
    throw std::runtime_error("coupling LP iteration limit");
  }

  void pivot(std::size_t r, std::size_t c) {
    const long double p = t_[r][c];
    for (auto& v : t_[r]) v /= p;
    for (std::size_t i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      const long double f = t_[i][c];
      if (f == 0) continue;
      for (std::size_t j = 0; j < cols_; ++j) t_[i][j] -= f * t_[r][j];
    }
    basis_[r] = c;
  }

  std::size_t rows_, vars_, cols_;
  std::vector<std::vector<long double>> t_;
  std::vector<std::size_t> basis_;
  long double value_ = 0;
};

// min over couplings of E[hamming(x, y)] for two tables over m coordinates.
inline double coupling_lp(const std::vector<double>& p, const std::vector<double>& q) {
  const std::size_t n = p.size();
  std::vector<std::vector<long double>> a;
  std::vector<long double> b;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<long double> row(n * n, 0);
    for (std::size_t j = 0; j < n; ++j) row[i * n + j] = 1;
    a.push_back(row);
    b.push_back(p[i]);
  }
  // The last column constraint is implied by the others.
  for (std::size_t j = 0; j + 1 < n; ++j) {
    std::vector<long double> row(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) row[i * n + j] = 1;
    a.push_back(row);
    b.push_back(q[j]);
  }
  std::vector<long double> c(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c[i * n + j] = std::popcount(static_cast<std::uint64_t>(i ^ j));
  return static_cast<double>(Simplex(a, b, c).value());
}

}  // namespace oracle

#endif  // CMRF_TESTS_ORACLES_COUPLING_LP_HPP
