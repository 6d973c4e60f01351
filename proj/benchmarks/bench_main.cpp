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

#include <benchmark/benchmark.h>

#include <Eigen/Core>

#include "scvsafe/nade.hpp"
#include "scvsafe/ndd_model.hpp"
#include "scvsafe/regression.hpp"
#include "scvsafe/rng.hpp"
#include "scvsafe/scv.hpp"
#include "scvsafe/traffic_sim.hpp"

namespace {

using namespace scvsafe;

void BM_NdeEpisode(benchmark::State& state) {
  const auto ndd = synthetic_ndd();
  const auto av = DriverParams::idm(2.0, "AV");
  std::uint64_t i = 0;
  for (auto _ : state) {
    auto rng = Rng::for_stream(11, i++);
    benchmark::DoNotOptimize(run_nde_episode(rng, ndd, av));
  }
}
BENCHMARK(BM_NdeEpisode);

void BM_NadeEpisode(benchmark::State& state) {
  const auto ndd = synthetic_ndd();
  const auto av = DriverParams::idm(2.0, "AV");
  NadeOptions options;
  ChallengeCache cache;
  std::uint64_t i = 0;
  for (auto _ : state) {
    auto rng = Rng::for_stream(12, i++);
    benchmark::DoNotOptimize(run_nade_episode(rng, ndd, options, av, {}, &cache));
  }
}
BENCHMARK(BM_NadeEpisode);

void BM_FitMlrSvd(benchmark::State& state) {
  const auto rows = state.range(0);
  const auto cols = state.range(1);
  Rng rng(3);
  Eigen::MatrixXd h(rows, cols);
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    y(i) = rng.uniform();
    for (Eigen::Index k = 0; k < cols; ++k) h(i, k) = rng.uniform(-1.0, 1.0);
  }
  center_columns(h);
  for (auto _ : state) benchmark::DoNotOptimize(fit_mlr_svd(y, h));
}
BENCHMARK(BM_FitMlrSvd)->Args({1000, 2})->Args({1000, 8})->Args({10000, 8})->Args({200, 512});

void BM_ScvEstimate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(5);
  std::vector<TestRecord> records(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = records[i];
    r.test_id = static_cast<std::int64_t>(i);
    const auto steps = rng.below(4);
    for (std::uint64_t s = 0; s < steps; ++s) {
      const double q0 = rng.uniform(0.1, 0.9);
      const double q1 = rng.uniform(0.1, 0.9);
      const double p = rng.uniform(0.05, 0.5);
      r.steps.push_back({p, 0.5 * q0 + 0.5 * q1, {q0, q1}});
    }
    r.num_control_steps = r.steps.size();
    r.crash_prob = rng.uniform() < 0.01 ? 1.0 : 0.0;
    r.weight = r.likelihood_ratio();
  }
  for (auto _ : state) benchmark::DoNotOptimize(scv_estimate(records));
}
BENCHMARK(BM_ScvEstimate)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
