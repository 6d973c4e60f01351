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
#include <vector>

#include "scvsafe/records.hpp"
#include "scvsafe/rng.hpp"

namespace scvsafe::testing {

inline TestRecord make_record(std::int64_t id, double crash, std::vector<CriticalStepRecord> steps) {
  TestRecord r;
  r.test_id = id;
  r.crash_prob = crash;
  r.steps = std::move(steps);
  r.num_control_steps = r.steps.size();
  r.weight = r.likelihood_ratio();
  return r;
}

// Random J-component records with q_alpha equal to the alpha mixture; the
// crash probability rises with the number of steps so every stratum carries
// signal.
inline std::vector<TestRecord> random_records(std::size_t n, std::size_t components, std::size_t max_steps,
                                              std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> alpha(components, 1.0 / static_cast<double>(components));
  std::vector<TestRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto l = static_cast<std::size_t>(rng.below(max_steps + 1));
    std::vector<CriticalStepRecord> steps;
    for (std::size_t s = 0; s < l; ++s) {
      CriticalStepRecord c;
      c.p = rng.uniform(0.01, 0.2);
      double mix = 0.0;
      for (std::size_t j = 0; j < components; ++j) {
        c.q.push_back(rng.uniform(0.05, 0.9));
        mix += alpha[j] * c.q.back();
      }
      c.q_alpha = mix;
      steps.push_back(c);
    }
    const double crash = rng.uniform() < 0.05 + 0.1 * static_cast<double>(l) ? 1.0 : 0.0;
    out.push_back(make_record(static_cast<std::int64_t>(i), crash, std::move(steps)));
  }
  return out;
}

}  // namespace scvsafe::testing
