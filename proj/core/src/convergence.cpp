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
#include "scvsafe/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "scvsafe/estimators.hpp"
#include "scvsafe/rng.hpp"

namespace scvsafe {
namespace {

// Streams prefixes of contributions, tracking the first threshold crossing
// and the best RHW seen.
ShuffleOutcome scan_stream(std::span<const double> values, std::span<const std::size_t> order,
                           double threshold, double z) {
  ShuffleOutcome out;
  out.best_rhw = std::numeric_limits<double>::infinity();
  double mean = 0.0;
  double m2 = 0.0;
  const std::size_t n = order.empty() ? values.size() : order.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double x = values[order.empty() ? k : order[k]];
    const double count = static_cast<double>(k + 1);
    const double delta = x - mean;
    mean += delta / count;
    m2 += delta * (x - mean);
    if (k == 0 || !(mean > 0.0)) {
      continue;
    }
    const double variance = k > 0 ? m2 / (count - 1.0) : 0.0;
    const double rhw = z * std::sqrt(variance / count) / mean;
    if (rhw < out.best_rhw) {
      out.best_rhw = rhw;
      out.best_n = k + 1;
    }
    if (!out.rnot && rhw <= threshold) {
      out.rnot = k + 1;
    }
  }
  return out;
}

ShuffleOutcome scan_scv(std::span<const ScvFeatures> features, std::size_t components,
                        std::span<const std::size_t> order, const BootstrapOptions& options) {
  ShuffleOutcome out;
  out.best_rhw = std::numeric_limits<double>::infinity();
  const std::size_t n = order.empty() ? features.size() : order.size();
  ScvOptions scv = options.scv;
  scv.confidence = options.confidence;
  for (std::size_t count : log_spaced_counts(n)) {
    if (count < 2) {
      continue;
    }
    const ScvResult r = scv_estimate_features(features, components, scv, order, count);
    if (!r.report.rhw || !(r.report.mean > 0.0)) {
      continue;
    }
    const double rhw = *r.report.rhw;
    if (rhw < out.best_rhw) {
      out.best_rhw = rhw;
      out.best_n = count;
    }
    if (rhw <= options.rhw_threshold) {
      out.rnot = count;
      break;
    }
  }
  return out;
}

std::vector<double> contributions_for(std::span<const TestRecord> records, EstimatorKind kind) {
  std::vector<double> values;
  values.reserve(records.size());
  for (const auto& r : records) {
    values.push_back(kind == EstimatorKind::crude ? r.crash_prob : r.crash_prob * r.likelihood_ratio());
  }
  return values;
}

}  // namespace

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::crude:
      return "crude";
    case EstimatorKind::importance:
      return "is";
    case EstimatorKind::scv:
      return "scv";
  }
  return "unknown";
}

EstimatorKind parse_estimator(std::string_view name) {
  if (name == "crude") return EstimatorKind::crude;
  if (name == "is" || name == "importance") return EstimatorKind::importance;
  if (name == "scv") return EstimatorKind::scv;
  throw std::invalid_argument("unknown estimator '" + std::string(name) + "' (expected crude|is|scv)");
}

std::optional<std::size_t> required_num_tests(std::span<const double> contributions,
                                              double rhw_threshold, double confidence) {
  if (!(rhw_threshold > 0.0)) {
    throw std::invalid_argument("rhw threshold must be positive");
  }
  return scan_stream(contributions, {}, rhw_threshold, normal_quantile_two_sided(confidence)).rnot;
}

std::vector<std::size_t> log_spaced_counts(std::size_t n, std::size_t per_decade) {
  std::vector<std::size_t> out;
  if (n == 0) {
    return out;
  }
  for (std::size_t k = 0;; ++k) {
    const double x = std::pow(10.0, static_cast<double>(k) / static_cast<double>(per_decade));
    const auto c = static_cast<std::size_t>(std::llround(x));
    if (c >= n) {
      break;
    }
    if (out.empty() || out.back() != c) {
      out.push_back(c);
    }
  }
  out.push_back(n);
  return out;
}

std::vector<std::size_t> bootstrap_permutation(std::size_t n, std::uint64_t seed,
                                               std::size_t shuffle_index) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng = Rng::for_stream(seed, shuffle_index);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

ShuffleOutcome rnot_along(std::span<const TestRecord> records, std::span<const std::size_t> order,
                          const BootstrapOptions& options) {
  if (options.estimator == EstimatorKind::scv) {
    const std::size_t j = std::max<std::size_t>(1, component_count(records));
    const auto features = extract_scv_features(records, j, options.scv.max_control_steps);
    return scan_scv(features, j, order, options);
  }
  const auto values = contributions_for(records, options.estimator);
  return scan_stream(values, order, options.rhw_threshold,
                     normal_quantile_two_sided(options.confidence));
}

BootstrapReport bootstrap_rnot(std::span<const TestRecord> records, const BootstrapOptions& options) {
  if (records.empty()) {
    throw std::invalid_argument("bootstrap_rnot: no samples");
  }
  if (options.num_shuffles < 1) {
    throw std::invalid_argument("bootstrap_rnot: num_shuffles must be >= 1");
  }
  if (!(options.rhw_threshold > 0.0)) {
    throw std::invalid_argument("rhw threshold must be positive");
  }

  const std::size_t j = std::max<std::size_t>(1, component_count(records));
  std::vector<ScvFeatures> features;
  std::vector<double> values;
  if (options.estimator == EstimatorKind::scv) {
    features = extract_scv_features(records, j, options.scv.max_control_steps);
  } else {
    values = contributions_for(records, options.estimator);
  }
  const double z = normal_quantile_two_sided(options.confidence);

  BootstrapReport report;
  report.shuffles.resize(options.num_shuffles);
  auto run = [&](std::size_t s) {
    const auto perm = bootstrap_permutation(records.size(), options.seed, s);
    report.shuffles[s] = options.estimator == EstimatorKind::scv
                             ? scan_scv(features, j, perm, options)
                             : scan_stream(values, perm, options.rhw_threshold, z);
  };

  std::size_t workers = options.workers == 0 ? std::thread::hardware_concurrency() : options.workers;
  workers = std::clamp<std::size_t>(workers, 1, options.num_shuffles);
  if (workers == 1) {
    for (std::size_t s = 0; s < options.num_shuffles; ++s) run(s);
  } else {
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t s = w; s < options.num_shuffles; s += workers) run(s);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  // Reduce in shuffle order so the result does not depend on scheduling.
  double reached_sum = 0.0;
  double fallback_sum = 0.0;
  std::size_t reached = 0;
  std::size_t fallback_count = 0;
  for (const auto& s : report.shuffles) {
    if (s.rnot) {
      reached_sum += static_cast<double>(*s.rnot);
      fallback_sum += static_cast<double>(*s.rnot);
      ++reached;
      ++fallback_count;
    } else {
      ++report.unreached;
      if (s.best_n > 0) {
        fallback_sum += static_cast<double>(s.best_n);
        ++fallback_count;
      }
    }
  }
  if (reached > 0) report.mean_rnot = reached_sum / static_cast<double>(reached);
  if (fallback_count > 0) report.mean_rnot_with_fallback = fallback_sum / static_cast<double>(fallback_count);
  return report;
}

}  // namespace scvsafe
