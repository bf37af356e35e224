// Copyright 2026 The nnasym Authors
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

#pragma once

// Keyed random streams. Every stream is addressed by a (seed, index, purpose)
// triple hashed through splitmix64, so replication r of an experiment always
// draws the same numbers regardless of thread count or scheduling order.

#include <cstdint>
#include <random>

namespace nnasym {

enum class Purpose : std::uint64_t {
  Data = 0x11,
  Fit = 0x22,
  Quadrature = 0x33,
  LimitDraw = 0x44,
  LimitSearch = 0x55,
  Verify = 0x66,
  Reference = 0x77,
};

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t index, Purpose purpose) noexcept {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  return splitmix64(h ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

class Stream {
 public:
  using engine_type = std::mt19937_64;

  explicit Stream(std::uint64_t key = 0) : key_(key), engine_(splitmix64(key)) {}

  static Stream derive(std::uint64_t seed, std::uint64_t index, Purpose purpose) {
    return Stream(derive_key(seed, index, purpose));
  }

  /// Child stream keyed off this stream's key, independent of how much of
  /// this stream has been consumed.
  Stream substream(std::uint64_t index, Purpose purpose) const {
    return derive(key_, index, purpose);
  }

  std::uint64_t key() const noexcept { return key_; }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return normal_(engine_); }
  std::uint64_t next_u64() { return engine_(); }
  engine_type& engine() noexcept { return engine_; }

 private:
  std::uint64_t key_;
  engine_type engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace nnasym
