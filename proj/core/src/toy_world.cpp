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
#include "scvsafe/toy_world.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "scvsafe/rng.hpp"

namespace scvsafe::toy {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double step_mixture(const ToyStep& step, const std::vector<double>& alpha) {
  double m = 0.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    m += alpha[j] * step.q[j];
  }
  return m;
}

// Tensor-product ratios over all steps of outcome x; width is J (full) or
// J - 1 (reduced). Zero row when the mixture gives the outcome no mass.
Eigen::VectorXd tuple_ratios(const ToyWorld& w, std::size_t x, std::size_t width) {
  const auto& o = w.outcomes[x];
  std::size_t len = 1;
  for (std::size_t s = 0; s < o.steps.size(); ++s) len *= width;
  Eigen::VectorXd row = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(len));
  if (w.q_alpha(x) <= 0.0) {
    row.setZero();
    return row;
  }
  std::size_t cur = 1;
  for (const auto& step : o.steps) {
    const double qa = step_mixture(step, w.alpha);
    Eigen::VectorXd next(static_cast<Eigen::Index>(cur * width));
    for (std::size_t i = 0; i < cur; ++i) {
      for (std::size_t k = 0; k < width; ++k) {
        next(static_cast<Eigen::Index>(i * width + k)) = row(static_cast<Eigen::Index>(i)) * step.q[k] / qa;
      }
    }
    row = std::move(next);
    cur *= width;
  }
  return row;
}

std::size_t column_width(std::size_t components, ScvColumns columns) {
  return columns == ScvColumns::full ? components : (components > 0 ? components - 1 : 0);
}

// Per-stratum vector of E_{q_alpha}[I_l H_l] and the stratum mass q_alpha(X_l).
struct StratumMoments {
  std::vector<Eigen::VectorXd> theta;
  std::vector<double> mass;
};

StratumMoments stratum_moments(const ToyWorld& w, ScvColumns columns) {
  const std::size_t width = column_width(w.components(), columns);
  StratumMoments m;
  const std::size_t strata = w.max_stratum() + 1;
  m.mass.assign(strata, 0.0);
  for (std::size_t l = 0; l < strata; ++l) {
    m.theta.emplace_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(stratum_columns(l, w.components(), columns))));
  }
  for (std::size_t x = 0; x < w.outcomes.size(); ++x) {
    const std::size_t l = w.outcomes[x].steps.size();
    const double qa = w.q_alpha(x);
    m.mass[l] += qa;
    if (l > 0) m.theta[l] += qa * tuple_ratios(w, x, width);
  }
  return m;
}

void check_support(const ToyWorld& w) {
  for (std::size_t x = 0; x < w.outcomes.size(); ++x) {
    if (w.outcomes[x].crash_prob * w.p(x) > 0.0 && !(w.q_alpha(x) > 0.0)) {
      throw std::domain_error("support violation: mixture gives no mass to crash outcome " + std::to_string(x));
    }
  }
}

std::vector<double> dirichlet(Rng& rng, std::size_t k) {
  std::vector<double> v(k);
  double s = 0.0;
  for (auto& e : v) {
    e = -std::log(1.0 - rng.uniform());
    s += e;
  }
  for (auto& e : v) e /= s;
  return v;
}

std::vector<double> sparse_crash(Rng& rng, std::size_t k) {
  std::vector<double> c(k, 0.0);
  for (auto& e : c) {
    if (rng.uniform() < 0.35) e = rng.uniform(0.2, 1.0);
  }
  c[rng.below(k)] = rng.uniform(0.5, 1.0);
  return c;
}

}  // namespace

std::size_t ToyWorld::max_stratum() const {
  std::size_t l = 0;
  for (const auto& o : outcomes) l = std::max(l, o.steps.size());
  return l;
}

double ToyWorld::p(std::size_t x) const {
  double v = outcomes[x].rest;
  for (const auto& s : outcomes[x].steps) v *= s.p;
  return v;
}

double ToyWorld::q(std::size_t x, std::size_t j) const {
  double v = outcomes[x].rest;
  for (const auto& s : outcomes[x].steps) v *= s.q[j];
  return v;
}

double ToyWorld::q_alpha(std::size_t x) const {
  double v = outcomes[x].rest;
  for (const auto& s : outcomes[x].steps) v *= step_mixture(s, alpha);
  return v;
}

double ToyWorld::weighted_outcome(std::size_t x) const {
  const double qa = q_alpha(x);
  return qa > 0.0 ? outcomes[x].crash_prob * p(x) / qa : 0.0;
}

std::vector<std::string> validate(const ToyWorld& world, double tol) {
  std::vector<std::string> issues;
  const std::size_t j = world.components();
  if (j == 0) issues.emplace_back("mixture weights are empty");
  double asum = 0.0;
  for (double a : world.alpha) {
    if (a < 0.0) issues.emplace_back("mixture weight is negative");
    asum += a;
  }
  if (std::abs(asum - 1.0) > tol) {
    issues.push_back("mixture weights sum to " + std::to_string(asum) + ", expected 1 (normalization)");
  }
  for (std::size_t x = 0; x < world.outcomes.size(); ++x) {
    const auto& o = world.outcomes[x];
    if (!(o.crash_prob >= 0.0 && o.crash_prob <= 1.0)) {
      issues.push_back("outcome " + std::to_string(x) + ": crash probability outside [0, 1]");
    }
    for (const auto& s : o.steps) {
      if (s.q.size() != j) {
        issues.push_back("outcome " + std::to_string(x) + ": step has " + std::to_string(s.q.size()) +
                         " component probabilities, expected " + std::to_string(j));
        return issues;
      }
    }
  }
  if (!issues.empty()) return issues;

  double psum = 0.0;
  double qasum = 0.0;
  std::vector<double> qsum(j, 0.0);
  for (std::size_t x = 0; x < world.outcomes.size(); ++x) {
    psum += world.p(x);
    qasum += world.q_alpha(x);
    for (std::size_t k = 0; k < j; ++k) qsum[k] += world.q(x, k);
  }
  if (std::abs(psum - 1.0) > tol) {
    issues.push_back("naturalistic probabilities sum to " + std::to_string(psum) + ", expected 1 (normalization)");
  }
  for (std::size_t k = 0; k < j; ++k) {
    if (std::abs(qsum[k] - 1.0) > tol) {
      issues.push_back("component " + std::to_string(k + 1) + " sums to " + std::to_string(qsum[k]) +
                       ", expected 1 (normalization)");
    }
  }
  if (std::abs(qasum - 1.0) > tol) {
    issues.push_back("mixture sums to " + std::to_string(qasum) + ", expected 1 (normalization)");
  }
  for (std::size_t x = 0; x < world.outcomes.size(); ++x) {
    if (world.outcomes[x].crash_prob * world.p(x) > 0.0 && !(world.q_alpha(x) > 0.0)) {
      issues.push_back("outcome " + std::to_string(x) + ": mixture has no mass on a crash outcome (support)");
    }
  }
  return issues;
}

void require_valid(const ToyWorld& world, double tol) {
  const auto issues = validate(world, tol);
  if (!issues.empty()) throw std::invalid_argument(issues.front());
}

double exact_crash_rate(const ToyWorld& world) {
  double mu = 0.0;
  for (std::size_t x = 0; x < world.outcomes.size(); ++x) mu += world.outcomes[x].crash_prob * world.p(x);
  return mu;
}

double exact_stratum_crash_rate(const ToyWorld& world, std::size_t l) {
  double mu = 0.0;
  for (std::size_t x = 0; x < world.outcomes.size(); ++x) {
    if (world.outcomes[x].steps.size() == l) mu += world.outcomes[x].crash_prob * world.p(x);
  }
  return mu;
}

std::size_t stratum_columns(std::size_t l, std::size_t components, ScvColumns columns) {
  if (l == 0) return 0;
  std::size_t n = 1;
  for (std::size_t i = 0; i < l; ++i) n *= column_width(components, columns);
  return n;
}

std::vector<double> exact_contributions(const ToyWorld& world, const EstimatorSpec& spec) {
  const std::size_t n = world.outcomes.size();
  std::vector<double> out(n);
  for (std::size_t x = 0; x < n; ++x) out[x] = world.weighted_outcome(x);

  if (const auto* cv = std::get_if<OrdinaryCv>(&spec)) {
    const std::size_t j = world.components();
    if (static_cast<std::size_t>(cv->beta.size()) + 1 != j) {
      throw std::invalid_argument("ordinary CV needs J - 1 coefficients");
    }
    for (std::size_t x = 0; x < n; ++x) {
      const double qa = world.q_alpha(x);
      if (qa <= 0.0) continue;
      for (std::size_t k = 0; k + 1 < j; ++k) {
        out[x] -= cv->beta(static_cast<Eigen::Index>(k)) * (world.q(x, k) / qa - 1.0);
      }
    }
  } else if (const auto* scv = std::get_if<StratifiedCv>(&spec)) {
    const std::size_t width = column_width(world.components(), scv->columns);
    const auto moments = stratum_moments(world, scv->columns);
    auto beta_for = [&](std::size_t l) -> Eigen::VectorXd {
      const auto cols = static_cast<Eigen::Index>(stratum_columns(l, world.components(), scv->columns));
      if (l == 0 || l >= scv->beta.size() || scv->beta[l].size() == 0) return Eigen::VectorXd::Zero(cols);
      if (scv->beta[l].size() != cols) throw std::invalid_argument("stratum coefficient length mismatch");
      return scv->beta[l];
    };
    double shift = 0.0;
    if (scv->columns == ScvColumns::full) {
      for (std::size_t l = 1; l < moments.theta.size(); ++l) shift += moments.theta[l].dot(beta_for(l));
    }
    for (std::size_t x = 0; x < n; ++x) {
      const std::size_t l = world.outcomes[x].steps.size();
      if (l == 0) {
        out[x] += shift;
        continue;
      }
      Eigen::VectorXd h = tuple_ratios(world, x, width);
      if (scv->columns == ScvColumns::reduced && moments.mass[l] > 0.0) {
        h -= moments.theta[l] / moments.mass[l];
      }
      out[x] += shift - h.dot(beta_for(l));
    }
  }
  return out;
}

double exact_expectation(const ToyWorld& world, const EstimatorSpec& spec) {
  const auto c = exact_contributions(world, spec);
  double e = 0.0;
  for (std::size_t x = 0; x < c.size(); ++x) e += world.q_alpha(x) * c[x];
  return e;
}

double exact_estimator_variance(const ToyWorld& world, const EstimatorSpec& spec) {
  check_support(world);
  const auto c = exact_contributions(world, spec);
  const double mu = exact_crash_rate(world);
  double v = 0.0;
  for (std::size_t x = 0; x < c.size(); ++x) {
    const double qa = world.q_alpha(x);
    if (qa > 0.0) v += qa * (c[x] - mu) * (c[x] - mu);
  }
  return v;
}

double component_variance(const ToyWorld& world, std::size_t j) {
  const double mu = exact_crash_rate(world);
  double v = 0.0;
  for (std::size_t x = 0; x < world.outcomes.size(); ++x) {
    const double target = world.outcomes[x].crash_prob * world.p(x);
    const double qj = world.q(x, j);
    if (qj > 0.0) {
      v += (target / qj - mu) * (target / qj - mu) * qj;
    } else if (target > 0.0) {
      return kInf;
    }
  }
  return v;
}

OptimalBeta optimal_beta_exact(const ToyWorld& world, bool stratification, ScvColumns columns) {
  const std::size_t j = world.components();
  std::vector<std::size_t> support;
  for (std::size_t x = 0; x < world.outcomes.size(); ++x) {
    if (world.q_alpha(x) > 0.0) support.push_back(x);
  }

  // Column offsets per stratum in the stacked design.
  std::vector<std::size_t> offset;
  std::size_t cols = 0;
  if (stratification) {
    for (std::size_t l = 0; l <= world.max_stratum(); ++l) {
      offset.push_back(cols);
      cols += stratum_columns(l, j, columns);
    }
  } else {
    cols = j > 0 ? j - 1 : 0;
  }

  const auto rows = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(cols));
  Eigen::VectorXd y(rows);
  Eigen::VectorXd w(rows);
  const StratumMoments moments = stratum_moments(world, columns);
  const std::size_t width = column_width(j, columns);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::size_t x = support[static_cast<std::size_t>(r)];
    const double qa = world.q_alpha(x);
    w(r) = qa;
    y(r) = world.weighted_outcome(x);
    if (stratification) {
      const std::size_t l = world.outcomes[x].steps.size();
      if (l == 0) continue;
      Eigen::VectorXd h = tuple_ratios(world, x, width);
      if (columns == ScvColumns::reduced && moments.mass[l] > 0.0) h -= moments.theta[l] / moments.mass[l];
      design.block(r, static_cast<Eigen::Index>(offset[l]), 1, h.size()) = h.transpose();
    } else {
      for (std::size_t k = 0; k + 1 < j; ++k) {
        design(r, static_cast<Eigen::Index>(k)) = world.q(x, k) / qa - 1.0;
      }
    }
  }

  // Weighted centring stands in for the intercept; then min-norm WLS.
  const double wsum = w.sum();
  const Eigen::RowVectorXd col_mean = (w.transpose() * design) / wsum;
  design.rowwise() -= col_mean;
  const double y_mean = w.dot(y) / wsum;
  const Eigen::VectorXd sw = w.array().sqrt();
  const Eigen::MatrixXd a = sw.asDiagonal() * design;
  const Eigen::VectorXd b = sw.array() * (y.array() - y_mean);

  OptimalBeta out;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cols));
  const double scale = a.cols() > 0 ? a.cwiseAbs().maxCoeff() : 0.0;
  if (cols == 0 || scale <= 1e-300 * std::max(1.0, y.cwiseAbs().maxCoeff())) {
    out.degenerate = true;
  } else {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    cod.setThreshold(1e-12);
    beta = cod.solve(b);
  }

  if (!stratification) {
    out.spec = OrdinaryCv{beta};
    return out;
  }
  StratifiedCv scv;
  scv.columns = columns;
  for (std::size_t l = 0; l < offset.size(); ++l) {
    const auto c = static_cast<Eigen::Index>(stratum_columns(l, j, columns));
    scv.beta.push_back(beta.segment(static_cast<Eigen::Index>(offset[l]), c));
  }
  out.spec = std::move(scv);
  return out;
}

ToyWorld canonical_world() {
  ToyWorld w;
  w.alpha = {0.5, 0.5};
  const double p[4] = {0.01, 0.09, 0.40, 0.50};
  for (int k = 0; k < 4; ++k) {
    ToyOutcome o;
    o.crash_prob = k == 0 ? 1.0 : 0.0;
    o.steps.push_back(ToyStep{k, p[k], {k == 0 ? 1.0 : 0.0, p[k]}});
    w.outcomes.push_back(std::move(o));
  }
  return w;
}

ToyWorld random_mixture_world(std::size_t components, std::size_t values, std::uint64_t seed) {
  Rng rng(seed);
  ToyWorld w;
  w.alpha = dirichlet(rng, components);
  const auto p = dirichlet(rng, values);
  const auto crash = sparse_crash(rng, values);
  std::vector<std::vector<double>> q;
  for (std::size_t j = 0; j < components; ++j) q.push_back(dirichlet(rng, values));
  for (std::size_t k = 0; k < values; ++k) {
    ToyOutcome o;
    o.crash_prob = crash[k];
    ToyStep s{static_cast<int>(k), p[k], {}};
    for (std::size_t j = 0; j < components; ++j) s.q.push_back(q[j][k]);
    o.steps.push_back(std::move(s));
    w.outcomes.push_back(std::move(o));
  }
  return w;
}

ToyWorld random_stratified_world(std::size_t components, std::size_t values, std::size_t max_steps,
                                 std::uint64_t seed) {
  Rng rng(seed);
  ToyWorld w;
  w.alpha = dirichlet(rng, components);
  const auto stratum_prob = dirichlet(rng, max_steps + 1);
  for (std::size_t l = 0; l <= max_steps; ++l) {
    // Per-position distributions over the critical values.
    std::vector<std::vector<double>> p(l);
    std::vector<std::vector<std::vector<double>>> q(l);
    for (std::size_t pos = 0; pos < l; ++pos) {
      p[pos] = dirichlet(rng, values);
      for (std::size_t j = 0; j < components; ++j) q[pos].push_back(dirichlet(rng, values));
    }
    std::size_t count = 1;
    for (std::size_t i = 0; i < l; ++i) count *= values;
    const auto crash = sparse_crash(rng, count);
    for (std::size_t t = 0; t < count; ++t) {
      ToyOutcome o;
      o.rest = stratum_prob[l];
      o.crash_prob = crash[t];
      std::size_t code = t;
      std::vector<std::size_t> digits(l);
      for (std::size_t pos = l; pos-- > 0;) {
        digits[pos] = code % values;
        code /= values;
      }
      for (std::size_t pos = 0; pos < l; ++pos) {
        ToyStep s{static_cast<int>(digits[pos]), p[pos][digits[pos]], {}};
        for (std::size_t j = 0; j < components; ++j) s.q.push_back(q[pos][j][digits[pos]]);
        o.steps.push_back(std::move(s));
      }
      w.outcomes.push_back(std::move(o));
    }
  }
  return w;
}

ToyWorld make_zero_variance_world(std::size_t components, std::size_t critical_values,
                                  std::size_t other_values, std::uint64_t seed) {
  if (components < 2) throw std::invalid_argument("make_zero_variance_world: J must be >= 2");
  if (critical_values < 3) throw std::invalid_argument("make_zero_variance_world: need >= 3 critical values");
  Rng rng(seed);
  ToyWorld w;
  w.alpha = dirichlet(rng, components);
  const auto rest = dirichlet(rng, std::max<std::size_t>(1, other_values));
  const auto p = dirichlet(rng, critical_values);
  std::vector<double> crash(critical_values, 0.0);
  crash[0] = rng.uniform(0.3, 1.0);
  crash[1] = rng.uniform(0.3, 1.0);
  for (std::size_t k = 2; k < critical_values; ++k) {
    if (rng.uniform() < 0.3) crash[k] = rng.uniform(0.1, 1.0);
  }
  double mu = 0.0;
  for (std::size_t k = 0; k < critical_values; ++k) mu += crash[k] * p[k];
  std::vector<std::vector<double>> q(components);
  for (std::size_t k = 0; k < critical_values; ++k) q[0].push_back(crash[k] * p[k] / mu);
  for (std::size_t j = 1; j < components; ++j) q[j] = dirichlet(rng, critical_values);

  for (std::size_t k = 0; k < critical_values; ++k) {
    for (double r : rest) {
      ToyOutcome o;
      o.rest = r;
      o.crash_prob = crash[k];
      ToyStep s{static_cast<int>(k), p[k], {}};
      for (std::size_t j = 0; j < components; ++j) s.q.push_back(q[j][k]);
      o.steps.push_back(std::move(s));
      w.outcomes.push_back(std::move(o));
    }
  }
  return w;
}

ToyWorld perturb_component(const ToyWorld& world, std::size_t j, double fraction) {
  ToyWorld out = world;
  // Normalise per (stratum, position) over distinct critical values.
  std::map<std::pair<std::size_t, std::size_t>, std::map<int, double>> totals;
  for (auto& o : out.outcomes) {
    for (std::size_t pos = 0; pos < o.steps.size(); ++pos) {
      auto& s = o.steps[pos];
      s.q[j] *= 1.0 + (s.value % 2 == 0 ? fraction : -fraction);
      totals[{o.steps.size(), pos}][s.value] = s.q[j];
    }
  }
  for (auto& o : out.outcomes) {
    for (std::size_t pos = 0; pos < o.steps.size(); ++pos) {
      double sum = 0.0;
      for (const auto& [value, q] : totals[{o.steps.size(), pos}]) sum += q;
      o.steps[pos].q[j] /= sum;
    }
  }
  return out;
}

AssumptionReport check_zero_variance_assumptions(const ToyWorld& world, double tol) {
  AssumptionReport r;
  double uncontrolled = 0.0;
  r.single_critical_step = true;
  for (std::size_t x = 0; x < world.outcomes.size(); ++x) {
    const double qa = world.q_alpha(x);
    if (world.outcomes[x].steps.empty()) uncontrolled += qa;
    if (qa > 0.0 && world.outcomes[x].steps.size() != 1) r.single_critical_step = false;
  }
  r.no_uncontrolled_mass = uncontrolled <= tol;
  if (!r.single_critical_step) return r;

  std::map<int, double> crash_by_value;
  std::map<int, std::pair<double, double>> mass_by_value;  // (p, q_1) per critical value
  r.crash_determined_by_critical = true;
  for (const auto& o : world.outcomes) {
    if (o.steps.size() != 1) continue;
    const auto& s = o.steps.front();
    auto [it, inserted] = crash_by_value.emplace(s.value, o.crash_prob);
    if (!inserted && std::abs(it->second - o.crash_prob) > tol) r.crash_determined_by_critical = false;
    mass_by_value[s.value] = {s.p, s.q.front()};
  }
  if (!r.crash_determined_by_critical) return r;
  double mu = 0.0;
  for (const auto& [value, m] : mass_by_value) mu += crash_by_value[value] * m.first;
  r.first_component_optimal = mu > 0.0;
  for (const auto& [value, m] : mass_by_value) {
    if (std::abs(m.second - crash_by_value[value] * m.first / mu) > 1e-12) r.first_component_optimal = false;
  }
  return r;
}

BoundReport verify_bounds(const ToyWorld& world) {
  require_valid(world);
  BoundReport report;
  const std::size_t j = world.components();
  const double mu = exact_crash_rate(world);

  if (world.max_stratum() <= 1) {
    report.mixture_cv.applicable = true;
    report.mixture_cv.lhs = exact_estimator_variance(world, optimal_beta_exact(world, false).spec);
    double best = kInf;
    for (std::size_t k = 0; k < j; ++k) {
      if (world.alpha[k] > 0.0) best = std::min(best, component_variance(world, k) / world.alpha[k]);
    }
    report.mixture_cv.rhs = best;
  }

  report.stratified_cv.applicable = true;
  report.stratified_cv.lhs =
      exact_estimator_variance(world, optimal_beta_exact(world, true, ScvColumns::full).spec);
  const std::size_t strata = world.max_stratum() + 1;
  // Stratum 0 is never adjusted: Var(P(A|X) 1{X in X_0}).
  double rhs = 0.0;
  {
    const double mu0 = exact_stratum_crash_rate(world, 0);
    double second = 0.0;
    for (std::size_t x = 0; x < world.outcomes.size(); ++x) {
      if (world.outcomes[x].steps.empty()) {
        const double z = world.weighted_outcome(x);
        second += world.q_alpha(x) * z * z;
      }
    }
    rhs += second - mu0 * mu0;
  }
  for (std::size_t l = 1; l < strata; ++l) {
    const double mu_l = exact_stratum_crash_rate(world, l);
    std::size_t tuples = 1;
    for (std::size_t i = 0; i < l; ++i) tuples *= j;
    double best = kInf;
    for (std::size_t t = 0; t < tuples; ++t) {
      std::vector<std::size_t> digits(l);
      std::size_t code = t;
      double weight = 1.0;
      for (std::size_t pos = l; pos-- > 0;) {
        digits[pos] = code % j;
        code /= j;
        weight *= world.alpha[digits[pos]];
      }
      if (!(weight > 0.0)) continue;
      double sigma2 = 0.0;
      for (std::size_t x = 0; x < world.outcomes.size() && sigma2 < kInf; ++x) {
        const auto& o = world.outcomes[x];
        if (o.steps.size() != l) continue;
        double qt = o.rest;
        for (std::size_t pos = 0; pos < l; ++pos) qt *= o.steps[pos].q[digits[pos]];
        const double target = o.crash_prob * world.p(x);
        if (qt > 0.0) {
          sigma2 += (target / qt - mu_l) * (target / qt - mu_l) * qt;
        } else if (target > 0.0) {
          sigma2 = kInf;
        }
      }
      best = std::min(best, sigma2 / weight + 3.0 * (mu_l / weight) * (mu_l / weight));
    }
    rhs += best;
  }
  report.stratified_cv.rhs = static_cast<double>(strata) * rhs;
  (void)mu;
  return report;
}

TestRecord to_test_record(const ToyWorld& world, std::size_t x, std::int64_t test_id) {
  const auto& o = world.outcomes.at(x);
  TestRecord r;
  r.test_id = test_id;
  r.crash_prob = o.crash_prob;
  for (const auto& s : o.steps) {
    r.steps.push_back(CriticalStepRecord{s.p, step_mixture(s, world.alpha), s.q});
  }
  r.num_control_steps = r.steps.size();
  r.weight = r.likelihood_ratio();
  return r;
}

std::vector<TestRecord> sample_records(const ToyWorld& world, std::size_t n, std::uint64_t seed,
                                       bool naturalistic) {
  std::vector<double> cumulative(world.outcomes.size());
  double total = 0.0;
  for (std::size_t x = 0; x < world.outcomes.size(); ++x) {
    total += naturalistic ? world.p(x) : world.q_alpha(x);
    cumulative[x] = total;
  }
  std::vector<TestRecord> prototypes;
  prototypes.reserve(world.outcomes.size());
  for (std::size_t x = 0; x < world.outcomes.size(); ++x) prototypes.push_back(to_test_record(world, x, 0));

  Rng rng(seed);
  std::vector<TestRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform() * total;
    auto idx = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                        cumulative.begin());
    idx = std::min(idx, cumulative.size() - 1);
    TestRecord r = prototypes[idx];
    r.test_id = static_cast<std::int64_t>(i);
    out.push_back(std::move(r));
  }
  return out;
}

std::string to_fixture(const ToyWorld& world) {
  nlohmann::json j;
  j["alpha"] = world.alpha;
  j["outcomes"] = nlohmann::json::array();
  for (const auto& o : world.outcomes) {
    nlohmann::json oj;
    oj["rest"] = o.rest;
    oj["crash"] = o.crash_prob;
    oj["steps"] = nlohmann::json::array();
    for (const auto& s : o.steps) {
      oj["steps"].push_back({{"value", s.value}, {"p", s.p}, {"q", s.q}});
    }
    j["outcomes"].push_back(std::move(oj));
  }
  return j.dump(2) + "\n";
}

ToyWorld from_fixture(const std::string& text) {
  ToyWorld w;
  try {
    const auto j = nlohmann::json::parse(text);
    w.alpha = j.at("alpha").get<std::vector<double>>();
    for (const auto& oj : j.at("outcomes")) {
      ToyOutcome o;
      o.rest = oj.value("rest", 1.0);
      o.crash_prob = oj.at("crash").get<double>();
      for (const auto& sj : oj.at("steps")) {
        o.steps.push_back(ToyStep{sj.value("value", 0), sj.at("p").get<double>(),
                                  sj.at("q").get<std::vector<double>>()});
      }
      w.outcomes.push_back(std::move(o));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("toy world fixture: ") + e.what());
  }
  return w;
}

}  // namespace scvsafe::toy
