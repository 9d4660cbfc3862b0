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

#include "cmrf/spin.hpp"

#include "cmrf/errors.hpp"

namespace cmrf {

namespace {

Spin checked(int v) {
  if (v != 1 && v != -1) {
    throw InvalidArgument("spin value must be -1 or +1, got " + std::to_string(v));
  }
  return static_cast<Spin>(v);
}

}  // namespace

SpinVector::SpinVector(std::size_t m, Spin value) : values_(m, checked(value)) {}

SpinVector::SpinVector(std::initializer_list<int> values) {
  values_.reserve(values.size());
  for (int v : values) values_.push_back(checked(v));
}

SpinVector::SpinVector(std::span<const Spin> values) {
  values_.reserve(values.size());
  for (Spin v : values) values_.push_back(checked(v));
}

SpinVector SpinVector::from_index(std::uint64_t index, std::size_t m) {
  if (m > 64) throw InvalidArgument("state index supports at most 64 coordinates");
  SpinVector x(m, Spin{-1});
  for (std::size_t i = 0; i < m; ++i) {
    if ((index >> i) & 1U) x.values_[i] = 1;
  }
  return x;
}

std::uint64_t SpinVector::to_index() const { return state_index(values_); }

void SpinVector::set(std::size_t i, Spin value) { values_.at(i) = checked(value); }

std::uint64_t state_index(std::span<const Spin> x) {
  if (x.size() > 64) throw InvalidArgument("state index supports at most 64 coordinates");
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0) idx |= std::uint64_t{1} << i;
  }
  return idx;
}

std::size_t hamming(std::span<const Spin> a, std::span<const Spin> b) {
  if (a.size() != b.size()) throw InvalidArgument("hamming: length mismatch");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]);
  return d;
}

void SampleSet::push_back(std::span<const Spin> x) {
  if (x.size() != m_) {
    throw InvalidArgument("sample length " + std::to_string(x.size()) +
                          " does not match set dimension " + std::to_string(m_));
  }
  for (Spin v : x) data_.push_back(checked(v));
}

}  // namespace cmrf
