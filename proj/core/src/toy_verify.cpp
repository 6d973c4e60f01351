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

#include "scvsafe/toy_verify.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "scvsafe/rng.hpp"

namespace scvsafe::toy {
namespace {

constexpr double kExactTol = 1e-12;

std::string sci(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

Eigen::VectorXd random_vector(Rng& rng, std::size_t n, double scale) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.uniform(-scale, scale);
  return v;
}

StratifiedCv random_stratified(const ToyWorld& w, Rng& rng, ScvColumns columns) {
  StratifiedCv cv;
  cv.columns = columns;
  for (std::size_t l = 0; l <= w.max_stratum(); ++l) {
    cv.beta.push_back(random_vector(rng, stratum_columns(l, w.components(), columns), 2.0));
  }
  return cv;
}

CheckResult unbiased_check(const ToyWorld& w, const std::string& name, std::uint64_t seed, std::size_t betas) {
  Rng rng(seed);
  const double mu = exact_crash_rate(w);
  double worst = 0.0;
  for (std::size_t b = 0; b < betas; ++b) {
    for (const auto columns : {ScvColumns::full, ScvColumns::reduced}) {
      worst = std::max(worst, std::abs(exact_expectation(w, random_stratified(w, rng, columns)) - mu));
    }
    if (w.components() > 1) {
      const OrdinaryCv cv{random_vector(rng, w.components() - 1, 2.0)};
      worst = std::max(worst, std::abs(exact_expectation(w, cv) - mu));
    }
  }
  return {name + ": unbiased for arbitrary coefficients", worst <= kExactTol, "max |E - mu| = " + sci(worst)};
}

}  // namespace

bool VerifyReport::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

std::string VerifyReport::render() const {
  std::ostringstream out;
  std::size_t failed = 0;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) out << " (" << c.detail << ")";
    out << '\n';
    failed += c.passed ? 0 : 1;
  }
  out << checks.size() - failed << "/" << checks.size() << " checks passed\n";
  return out.str();
}

std::vector<CheckResult> verify_world(const ToyWorld& world, const std::string& name, std::uint64_t seed,
                                      std::size_t betas) {
  std::vector<CheckResult> out;
  const auto issues = validate(world);
  if (!issues.empty()) {
    out.push_back({name + ": valid world", false, issues.front()});
    return out;
  }
  out.push_back({name + ": valid world", true, ""});
  out.push_back(unbiased_check(world, name, seed, betas));
  const BoundReport bounds = verify_bounds(world);
  if (bounds.mixture_cv.applicable) {
    out.push_back({name + ": mixture CV bound", bounds.mixture_cv.holds(kExactTol),
                   sci(bounds.mixture_cv.lhs) + " <= " + sci(bounds.mixture_cv.rhs)});
  }
  out.push_back({name + ": stratified CV bound", bounds.stratified_cv.holds(kExactTol),
                 sci(bounds.stratified_cv.lhs) + " <= " + sci(bounds.stratified_cv.rhs)});
  return out;
}

VerifyReport verify_all(const VerifyOptions& options) {
  VerifyReport report;
  auto append = [&](std::vector<CheckResult> checks) {
    for (auto& c : checks) report.checks.push_back(std::move(c));
  };
  append(verify_world(canonical_world(), "canonical", options.seed, options.betas_per_world));
  for (std::size_t k = 0; k < options.random_worlds; ++k) {
    const std::uint64_t s = derive_seed(options.seed, k);
    append(verify_world(random_mixture_world(2 + k % 3, 4 + k, s), "mixture world " + std::to_string(k), s,
                        options.betas_per_world));
    append(verify_world(random_stratified_world(2 + k % 2, 2 + k % 2, 2 + k % 2, s ^ 0x5bd1e995),
                        "stratified world " + std::to_string(k), s, options.betas_per_world));
  }

  const ToyWorld zero = make_zero_variance_world(3, 6, 4);
  const AssumptionReport assumptions = check_zero_variance_assumptions(zero);
  report.checks.push_back({"zero-variance world: assumptions hold", assumptions.all(), ""});
  const double v0 = exact_estimator_variance(zero, optimal_beta_exact(zero, true).spec);
  report.checks.push_back({"zero-variance world: variance at beta*", v0 <= 1e-10, sci(v0) + " <= 1e-10"});
  const ToyWorld perturbed = perturb_component(zero, 0, 0.1);
  const double v1 = exact_estimator_variance(perturbed, optimal_beta_exact(perturbed, true).spec);
  report.checks.push_back({"zero-variance world: 10% perturbation of q_1", v1 > 1e-6, sci(v1) + " > 1e-6"});

  if (options.fixture) {
    try {
      append(verify_world(from_fixture(*options.fixture), "fixture", options.seed, options.betas_per_world));
    } catch (const std::exception& e) {
      report.checks.push_back({"fixture: readable", false, e.what()});
    }
  }
  return report;
}

}  // namespace scvsafe::toy
