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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "scvsafe/convergence.hpp"
#include "scvsafe/rng.hpp"

namespace scvsafe {
namespace {

TEST(Rng, DeriveSeedIsDeterministicAndSpreads) {
  EXPECT_EQ(derive_seed(1, 2), derive_seed(1, 2));
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 4; ++s) {
    for (std::uint64_t i = 0; i < 256; ++i) seen.insert(derive_seed(s, i));
  }
  EXPECT_EQ(seen.size(), 4u * 256u);
}

TEST(Rng, UniformStaysInUnitInterval) {
  Rng rng(42);
  double lo = 1.0;
  double hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  EXPECT_LT(lo, 1e-3);
  EXPECT_GT(hi, 1.0 - 1e-3);
}

TEST(Rng, BelowCoversRangeUniformly) {
  Rng rng(7);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) ++counts[rng.below(5)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(Rng, DiscreteNeverPicksZeroWeight) {
  Rng rng(3);
  const std::vector<double> w = {0.0, 0.25, 0.0, 0.75, 0.0};
  for (int i = 0; i < 20000; ++i) {
    const auto k = rng.discrete(w);
    ASSERT_TRUE(k == 1 || k == 3);
  }
}

TEST(Rng, DiscreteConsumesOneUniform) {
  Rng a(11);
  Rng b(11);
  const std::vector<double> w = {0.2, 0.3, 0.5};
  (void)a.discrete(w);
  (void)b.uniform();
  EXPECT_EQ(a.uniform(), b.uniform());
}

TEST(Rng, DiscreteFrequenciesMatchWeights) {
  Rng rng(5);
  const std::vector<double> w = {1.0, 2.0, 7.0};
  std::vector<int> counts(3, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[rng.discrete(w)];
  EXPECT_NEAR(counts[0] / double(n), 0.1, 0.005);
  EXPECT_NEAR(counts[1] / double(n), 0.2, 0.006);
  EXPECT_NEAR(counts[2] / double(n), 0.7, 0.006);
}

TEST(Rng, DiscreteRejectsAllZeroWeights) {
  Rng rng(1);
  const std::vector<double> w = {0.0, 0.0};
  EXPECT_ANY_THROW(rng.discrete(w));
}

TEST(BootstrapPermutation, IsAPermutationAndReproducible) {
  for (std::size_t s = 0; s < 10; ++s) {
    auto p = bootstrap_permutation(1000, 9, s);
    EXPECT_EQ(p, bootstrap_permutation(1000, 9, s));
    std::vector<std::size_t> sorted = p;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> ref(1000);
    std::iota(ref.begin(), ref.end(), 0u);
    EXPECT_EQ(sorted, ref);
  }
  EXPECT_NE(bootstrap_permutation(1000, 9, 0), bootstrap_permutation(1000, 9, 1));
  EXPECT_NE(bootstrap_permutation(1000, 9, 0), bootstrap_permutation(1000, 10, 0));
}

}  // namespace
}  // namespace scvsafe
