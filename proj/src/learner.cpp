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

#include "cmrf/learner.hpp"

namespace cmrf {

SampleSet SampleSource::draw(std::size_t count) {
  SampleSet out(dimension());
  out.reserve(count);
  fill(out, count);
  drawn_ += count;
  return out;
}

TableSource::TableSource(const DistributionTable& table, Stream rng)
    : sampler_(table), rng_(rng) {}

void TableSource::fill(SampleSet& out, std::size_t count) {
  out.set_provenance(rng_.key(), "table");
  for (std::size_t i = 0; i < count; ++i) out.push_back(sampler_.draw(rng_));
}

Learner oracle_cheat_learner(const DistributionTable& truth) {
  auto sampler = std::make_shared<const TableSampler>(truth);
  return [sampler](SampleSource&, Stream&) -> OutputSampler {
    return [sampler](Stream& rng) { return sampler->draw(rng); };
  };
}

Learner constant_learner(SpinVector x) {
  return [x](SampleSource&, Stream&) -> OutputSampler {
    return [x](Stream&) { return x; };
  };
}

Learner parrot_learner() {
  return [](SampleSource& source, Stream&) -> OutputSampler {
    auto first = source.draw(1);
    SpinVector x(first[0]);
    return [x](Stream&) { return x; };
  };
}

}  // namespace cmrf
