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

#ifndef CMRF_LEARNER_HPP
#define CMRF_LEARNER_HPP

// Common shape of a learning-to-sample procedure: consume samples from a
// source, then return a frozen sampler that produces fresh outputs.

#include <cstddef>
#include <functional>
#include <memory>

#include "cmrf/exact.hpp"
#include "cmrf/rng.hpp"
#include "cmrf/spin.hpp"

namespace cmrf {

class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual std::size_t dimension() const = 0;

  /// Next `count` samples of the stream.
  SampleSet draw(std::size_t count);
  std::size_t drawn() const { return drawn_; }

 protected:
  virtual void fill(SampleSet& out, std::size_t count) = 0;

 private:
  std::size_t drawn_ = 0;
};

/// Independent draws from an explicit table.
class TableSource : public SampleSource {
 public:
  TableSource(const DistributionTable& table, Stream rng);
  std::size_t dimension() const override { return sampler_.dimension(); }

 protected:
  void fill(SampleSet& out, std::size_t count) override;

 private:
  TableSampler sampler_;
  Stream rng_;
};

/// Draws one output per call, using only the given stream for randomness.
using OutputSampler = std::function<SpinVector(Stream&)>;

/// Learning procedure: reads what it needs from the source (and may use the
/// stream for internal randomness), then returns a frozen sampler.
using Learner = std::function<OutputSampler(SampleSource&, Stream&)>;

/// Ignores the samples and draws from the true table.
Learner oracle_cheat_learner(const DistributionTable& truth);

/// Always outputs x.
Learner constant_learner(SpinVector x);

/// Outputs the first training sample forever.
Learner parrot_learner();

}  // namespace cmrf

#endif  // CMRF_LEARNER_HPP
