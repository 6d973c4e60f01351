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
#include <optional>
#include <string>
#include <vector>

#include "scvsafe/toy_world.hpp"

namespace scvsafe::toy {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  [[nodiscard]] bool passed() const;
  [[nodiscard]] std::string render() const;
};

struct VerifyOptions {
  std::size_t random_worlds = 5;
  std::size_t betas_per_world = 10;
  std::uint64_t seed = 20240607;
  /// Optional extra world (fixture text) that must validate and satisfy the bounds.
  std::optional<std::string> fixture;
};

/// Unbiasedness of the stratified and ordinary CV contributions for arbitrary
/// coefficients, the mixture and stratified variance bounds, and the zero-
/// variance construction with its perturbation.
VerifyReport verify_all(const VerifyOptions& options = {});

/// Single-world checks (normalisation, unbiasedness for random coefficients,
/// bounds); used for fixtures.
std::vector<CheckResult> verify_world(const ToyWorld& world, const std::string& name, std::uint64_t seed,
                                      std::size_t betas);

}  // namespace scvsafe::toy
