// Copyright 2026 The CURI Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CURI_RNG_H_
#define CURI_RNG_H_

// Counter-based splittable random stream.
//
// Output i of a stream with key k is Mix64(k + (i + 1) * golden), i.e. the
// SplitMix64 sequence started at k. Substreams derive a fresh key from
// (parent key, tag, index), so per-item randomness depends only on the item
// index and never on scheduling.

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace curi {

std::uint64_t Mix64(std::uint64_t z);
// 64-bit FNV-1a.
std::uint64_t HashTag(std::string_view tag);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(seed) {}

  std::uint64_t Next();
  // Uniform in [0, n). n must be positive.
  std::uint64_t Uniform(std::uint64_t n);
  // Uniform in [lo, hi].
  std::int64_t UniformInt(std::int64_t lo, std::int64_t hi);
  // Uniform in [0, 1) with 53 bits of precision.
  double UniformDouble();
  // Index drawn with probability proportional to weights (all >= 0, sum > 0).
  std::size_t Weighted(std::span<const double> weights);

  Rng Substream(std::string_view tag, std::uint64_t index) const;

  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = Uniform(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  // Draws min(k, v.size()) distinct elements of v uniformly (partial
  // Fisher-Yates). Reorders v.
  template <typename T>
  std::vector<T> SampleWithoutReplacement(std::vector<T>& v, std::size_t k) {
    if (k > v.size()) k = v.size();
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + Uniform(v.size() - i);
      std::swap(v[i], v[j]);
    }
    return std::vector<T>(v.begin(), v.begin() + static_cast<long>(k));
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace curi

#endif  // CURI_RNG_H_
