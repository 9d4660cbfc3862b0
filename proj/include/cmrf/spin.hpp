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

#ifndef CMRF_SPIN_HPP
#define CMRF_SPIN_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cmrf {

using Spin = std::int8_t;

// State index convention shared by every module: bit i of the index is set
// iff coordinate i equals +1.

/// A +-1 assignment. Every entry is exactly -1 or +1.
class SpinVector {
 public:
  SpinVector() = default;
  /// m coordinates, all set to `value`.
  explicit SpinVector(std::size_t m, Spin value = 1);
  SpinVector(std::initializer_list<int> values);
  explicit SpinVector(std::span<const Spin> values);

  static SpinVector from_index(std::uint64_t index, std::size_t m);
  std::uint64_t to_index() const;

  std::size_t size() const { return values_.size(); }
  Spin operator[](std::size_t i) const { return values_[i]; }
  void set(std::size_t i, Spin value);
  void flip(std::size_t i) { values_[i] = static_cast<Spin>(-values_[i]); }

  std::span<const Spin> view() const { return values_; }
  std::span<Spin> mutable_view() { return values_; }

  bool operator==(const SpinVector&) const = default;

 private:
  std::vector<Spin> values_;
};

std::uint64_t state_index(std::span<const Spin> x);
std::size_t hamming(std::span<const Spin> a, std::span<const Spin> b);

/// Ordered collection of equal-length assignments plus provenance.
class SampleSet {
 public:
  explicit SampleSet(std::size_t m = 0, std::uint64_t seed = 0, std::string source = {})
      : m_(m), seed_(seed), source_(std::move(source)) {}

  void push_back(std::span<const Spin> x);
  void push_back(const SpinVector& x) { push_back(x.view()); }
  void reserve(std::size_t count) { data_.reserve(count * m_); }

  std::size_t size() const { return m_ ? data_.size() / m_ : 0; }
  std::size_t dimension() const { return m_; }
  bool empty() const { return data_.empty(); }
  std::span<const Spin> operator[](std::size_t i) const {
    return std::span<const Spin>(data_).subspan(i * m_, m_);
  }
  std::uint64_t index(std::size_t i) const { return state_index((*this)[i]); }

  std::uint64_t seed() const { return seed_; }
  const std::string& source() const { return source_; }
  void set_provenance(std::uint64_t seed, std::string source) {
    seed_ = seed;
    source_ = std::move(source);
  }

  bool operator==(const SampleSet& o) const { return m_ == o.m_ && data_ == o.data_; }

 private:
  std::size_t m_;
  std::vector<Spin> data_;
  std::uint64_t seed_;
  std::string source_;
};

}  // namespace cmrf

#endif  // CMRF_SPIN_HPP
