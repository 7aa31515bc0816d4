// Copyright 2026 The ampkit Authors
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

#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace ampkit {

/// SplitMix64 finalizer (Steele, Lea & Flood). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
  z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
  return z ^ (z >> 31);
}

/// Counter-based generator: the i-th output is a keyed hash of i, so two
/// engines with different keys never walk the same state cycle.
///
/// Models std::uniform_random_bit_generator.
class StreamEngine {
 public:
  using result_type = std::uint64_t;

  explicit StreamEngine(std::uint64_t key) noexcept
      : key_lo_(mix64(key ^ UINT64_C(0x6A09E667F3BCC909))),
        key_hi_(mix64(key + UINT64_C(0xBB67AE8584CAA73B))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t c = counter_++;
    return mix64(mix64(c * UINT64_C(0x9E3779B97F4A7C15) + key_lo_) ^ key_hi_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  std::uint64_t position() const noexcept { return counter_; }

 private:
  std::uint64_t key_lo_;
  std::uint64_t key_hi_;
  std::uint64_t counter_ = 0;
};

/// Hierarchical seed: a root seed plus a path of stream indices.
///
/// The same (root_seed, path) always yields the same engine output, and
/// distinct paths yield unrelated keys. Forking is the only way per-trial or
/// per-thread randomness is obtained anywhere in the library.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t root_seed) : root_seed_(root_seed) {}
  SeedStream(std::uint64_t root_seed, std::vector<std::uint64_t> path)
      : root_seed_(root_seed), path_(std::move(path)) {}

  std::uint64_t root_seed() const noexcept { return root_seed_; }
  const std::vector<std::uint64_t>& path() const noexcept { return path_; }

  SeedStream fork(std::uint64_t index) const {
    SeedStream child = *this;
    child.path_.push_back(index);
    return child;
  }

  std::uint64_t key() const noexcept {
    std::uint64_t h = mix64(root_seed_ ^ UINT64_C(0x3C6EF372FE94F82B));
    for (std::uint64_t p : path_) {
      // Length-prefixed absorption keeps path {a, b} distinct from {a ^ b}.
      h = mix64(h + UINT64_C(0xA54FF53A5F1D36F1));
      h = mix64(h ^ mix64(p + UINT64_C(0x510E527FADE682D1)));
    }
    return h;
  }

  StreamEngine engine() const noexcept { return StreamEngine(key()); }

  friend bool operator==(const SeedStream&, const SeedStream&) = default;

 private:
  std::uint64_t root_seed_;
  std::vector<std::uint64_t> path_;
};

}  // namespace ampkit
