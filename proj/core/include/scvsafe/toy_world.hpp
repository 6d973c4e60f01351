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
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "scvsafe/records.hpp"

namespace scvsafe::toy {

/// One critical variable of an outcome: its value label, and the probability
/// of that value under p and under each component q_j.
struct ToyStep {
  int value = 0;
  double p = 1.0;
  std::vector<double> q;
};

/// A fully enumerated scenario. Its naturalistic probability is
/// rest * prod(step.p); under component j it is rest * prod(step.q[j]); under
/// the mixture the per-step mixtures multiply.
struct ToyOutcome {
  double rest = 1.0;
  double crash_prob = 0.0;
  std::vector<ToyStep> steps;
};

struct ToyWorld {
  std::vector<ToyOutcome> outcomes;
  std::vector<double> alpha;

  [[nodiscard]] std::size_t components() const { return alpha.size(); }
  [[nodiscard]] std::size_t max_stratum() const;
  [[nodiscard]] double p(std::size_t x) const;
  [[nodiscard]] double q(std::size_t x, std::size_t j) const;
  [[nodiscard]] double q_alpha(std::size_t x) const;
  /// P(A|x) p(x) / q_alpha(x) (0 when q_alpha is 0).
  [[nodiscard]] double weighted_outcome(std::size_t x) const;
};

/// Returns every violated invariant as a human-readable message; empty when valid.
std::vector<std::string> validate(const ToyWorld& world, double tol = 1e-12);
/// Throws std::invalid_argument with the first validation message.
void require_valid(const ToyWorld& world, double tol = 1e-12);

double exact_crash_rate(const ToyWorld& world);
/// mu_l: crash mass of outcomes with l critical steps.
double exact_stratum_crash_rate(const ToyWorld& world, std::size_t l);

/// Column layout of the stratified control variates.
///  full:    all J^l tuples, centred by the unconditional expectation theta_l.
///  reduced: the (J-1)^l tuples used by the regression estimator, centred
///           within the stratum (population analogue of column centring).
enum class ScvColumns { full, reduced };

struct PlainIs {};
struct OrdinaryCv {
  Eigen::VectorXd beta;  // J - 1 entries
};
struct StratifiedCv {
  /// beta[l] has one entry per column of stratum l (beta[0] is ignored).
  std::vector<Eigen::VectorXd> beta;
  ScvColumns columns = ScvColumns::full;
};
using EstimatorSpec = std::variant<PlainIs, OrdinaryCv, StratifiedCv>;

/// Number of columns of stratum l for the given layout (0 for l == 0).
std::size_t stratum_columns(std::size_t l, std::size_t components, ScvColumns columns);

/// Single-draw contribution of every outcome under the estimator.
std::vector<double> exact_contributions(const ToyWorld& world, const EstimatorSpec& spec);
/// sum_x q_alpha(x) * contribution(x).
double exact_expectation(const ToyWorld& world, const EstimatorSpec& spec);
/// sum_x q_alpha(x) (contribution(x) - mu)^2; throws on a support violation.
double exact_estimator_variance(const ToyWorld& world, const EstimatorSpec& spec);

/// Asymptotic variance of plain IS under component j alone (infinite when
/// q_j misses crash mass).
double component_variance(const ToyWorld& world, std::size_t j);

struct OptimalBeta {
  EstimatorSpec spec;
  /// True when every control column is constant and beta was set to 0.
  bool degenerate = false;
};

/// Exact variance minimiser by weighted least squares over the enumerated
/// outcome distribution (weights q_alpha). Non-stratified returns OrdinaryCv.
OptimalBeta optimal_beta_exact(const ToyWorld& world, bool stratification,
                               ScvColumns columns = ScvColumns::full);

/// Fixed 4-outcome world, p = (0.01, 0.09, 0.40, 0.50), crash only on the
/// first outcome, alpha = (0.5, 0.5), q_1 optimal, q_2 = p.
ToyWorld canonical_world();

/// Single-critical-step world with random p, sparse crash probabilities and
/// J random components.
ToyWorld random_mixture_world(std::size_t components, std::size_t values, std::uint64_t seed);

/// Strata 0..max_steps chosen by a non-critical variable; stratum l holds
/// values^l critical-value tuples.
ToyWorld random_stratified_world(std::size_t components, std::size_t values, std::size_t max_steps,
                                 std::uint64_t seed);

/// World satisfying the four zero-variance assumptions: one critical variable
/// per scenario, crash probability determined by it, q_1 optimal, and no
/// uncontrolled scenarios under the mixture.
ToyWorld make_zero_variance_world(std::size_t components, std::size_t critical_values,
                                  std::size_t other_values, std::uint64_t seed = 7);

/// Multiplies component j's step probabilities by (1 +/- fraction)
/// alternately per critical value and renormalises.
ToyWorld perturb_component(const ToyWorld& world, std::size_t j, double fraction);

struct AssumptionReport {
  bool no_uncontrolled_mass = false;  // mixture puts no mass on stratum 0
  bool single_critical_step = false;
  bool crash_determined_by_critical = false;
  bool first_component_optimal = false;
  [[nodiscard]] bool all() const {
    return no_uncontrolled_mass && single_critical_step && crash_determined_by_critical &&
           first_component_optimal;
  }
};
AssumptionReport check_zero_variance_assumptions(const ToyWorld& world, double tol = 1e-12);

struct BoundCheck {
  bool applicable = false;
  double lhs = 0.0;
  double rhs = 0.0;
  [[nodiscard]] bool holds(double tol = 1e-12) const { return !applicable || lhs <= rhs + tol; }
};

struct BoundReport {
  /// Ordinary CV at beta* vs min_j sigma^2_{q_j} / alpha_j; only applicable
  /// when every outcome has at most one critical step.
  BoundCheck mixture_cv;
  /// Stratified CV at beta* vs (L+1) [Var(Z_0) + sum_l min_t (...)].
  BoundCheck stratified_cv;
  [[nodiscard]] bool holds(double tol = 1e-12) const {
    return mixture_cv.holds(tol) && stratified_cv.holds(tol);
  }
};
BoundReport verify_bounds(const ToyWorld& world);

/// The record a test of outcome x would produce.
TestRecord to_test_record(const ToyWorld& world, std::size_t x, std::int64_t test_id);

/// n seeded draws from the mixture (or from p when naturalistic is set).
std::vector<TestRecord> sample_records(const ToyWorld& world, std::size_t n, std::uint64_t seed,
                                       bool naturalistic = false);

/// Structured text fixture (JSON) round-trip.
std::string to_fixture(const ToyWorld& world);
ToyWorld from_fixture(const std::string& text);

}  // namespace scvsafe::toy
