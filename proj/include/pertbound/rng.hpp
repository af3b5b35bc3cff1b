// Copyright 2026 The pertbound Authors
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

// Random number generation. The generator is xoshiro256** seeded through
// SplitMix64; child streams are derived with derive_seed(master, index),
// so every trial owns an independent stream regardless of scheduling.

#include <cstdint>
#include <limits>

namespace pertbound {

/// SplitMix64 finalizer; also the seeding sequence for Xoshiro256.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed of the index-th child stream of master.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next(); }

  std::uint64_t next();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal (Marsaglia polar method).
  double normal();

  /// Laplace(0, scale).
  double laplace(double scale);

  /// Single fair bit from a cached 64-bit word.
  bool bit();

 private:
  std::uint64_t s_[4];
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
  std::uint64_t bits_ = 0;
  int bits_left_ = 0;
};

}  // namespace pertbound
