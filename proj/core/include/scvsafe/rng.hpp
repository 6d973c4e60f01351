// Copyright 2026 The scvsafe Authors
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

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace scvsafe {

/// Mixes a campaign seed with a stream index (splitmix64 finalizer) so that
/// every episode or shuffle gets its own reproducible stream regardless of
/// which worker runs it.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t stream_index);

/// Thin wrapper over std::mt19937_64 with distribution helpers whose output is
/// identical across standard libraries (std::uniform_real_distribution is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng for_stream(std::uint64_t base_seed, std::uint64_t stream_index) {
    return Rng(derive_seed(base_seed, stream_index));
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);

  /// Inverse-CDF draw from unnormalized nonnegative weights; consumes exactly
  /// one uniform. Never returns an index whose weight is zero.
  std::size_t discrete(std::span<const double> weights);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace scvsafe
