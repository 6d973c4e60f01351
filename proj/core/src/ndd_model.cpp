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

#include "scvsafe/ndd_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace scvsafe {
namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

BinnedDistribution truncated_gaussian(double mean, double sd, double lo, double hi, double width) {
  BinnedDistribution d;
  const auto bins = static_cast<std::size_t>(std::lround((hi - lo) / width));
  d.edges = linspace(lo, hi, bins + 1);
  double total = 0.0;
  for (std::size_t i = 0; i < bins; ++i) {
    const double a = (d.edges[i] - mean) / (sd * std::sqrt(2.0));
    const double b = (d.edges[i + 1] - mean) / (sd * std::sqrt(2.0));
    d.probs.push_back(0.5 * (std::erf(b) - std::erf(a)));
    total += d.probs.back();
  }
  for (auto& p : d.probs) p /= total;
  return d;
}

std::vector<double> gaussian_row(const std::vector<double>& grid, double mean, double sd, double floor) {
  std::vector<double> row(grid.size());
  double total = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double z = (grid[k] - mean) / sd;
    row[k] = std::exp(-0.5 * z * z) + floor;
    total += row[k];
  }
  for (auto& p : row) p /= total;
  return row;
}

double centre(const std::vector<double>& edges, std::size_t i) { return 0.5 * (edges[i] + edges[i + 1]); }

void check_row(const std::vector<double>& row, std::size_t expected, const std::string& what,
               std::vector<std::string>& issues) {
  if (row.size() != expected) {
    issues.push_back(what + ": has " + std::to_string(row.size()) + " entries, expected " + std::to_string(expected));
    return;
  }
  double total = 0.0;
  for (double p : row) {
    if (!(p >= 0.0)) issues.push_back(what + ": negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) issues.push_back(what + ": sums to " + std::to_string(total) + ", expected 1");
}

void check_edges(const std::vector<double>& edges, const std::string& what, std::vector<std::string>& issues) {
  if (edges.size() < 2) {
    issues.push_back(what + ": needs at least two edges");
    return;
  }
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) issues.push_back(what + ": edges must increase");
  }
}

nlohmann::json binned_json(const BinnedDistribution& d) { return {{"edges", d.edges}, {"probs", d.probs}}; }

BinnedDistribution binned_from(const nlohmann::json& j) {
  return BinnedDistribution{j.at("edges").get<std::vector<double>>(), j.at("probs").get<std::vector<double>>()};
}

}  // namespace

double BinnedDistribution::sample(Rng& rng) const {
  const std::size_t i = rng.discrete(probs);
  return rng.uniform(edges[i], edges[i + 1]);
}

std::size_t bin_index(const std::vector<double>& edges, double x) {
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  const auto raw = static_cast<std::ptrdiff_t>(it - edges.begin()) - 1;
  const auto last = static_cast<std::ptrdiff_t>(edges.size()) - 2;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(raw, 0, last));
}

const std::vector<double>& NddModel::car_following_row(double r1, double r1_dot) const {
  const std::size_t i = bin_index(cf_r1_edges, r1);
  const std::size_t k = bin_index(cf_r1_dot_edges, r1_dot);
  return cf_probs[i * (cf_r1_dot_edges.size() - 1) + k];
}

const std::vector<double>& NddModel::free_driving_row(double v) const {
  return free_probs[bin_index(free_v_edges, v)];
}

double NddModel::cut_in_probability(double r2, double r2_dot) const {
  const std::size_t i = bin_index(cut_r2_edges, r2);
  const std::size_t k = bin_index(cut_r2_dot_edges, r2_dot);
  return cut_probs[i * (cut_r2_dot_edges.size() - 1) + k];
}

std::vector<std::string> validate(const NddModel& m) {
  std::vector<std::string> issues;
  if (m.accel_grid.empty()) issues.emplace_back("acceleration grid is empty");
  for (const auto* d : {&m.initial_v_bv, &m.initial_r1, &m.initial_r1_dot}) {
    check_edges(d->edges, "initial table", issues);
    check_row(d->probs, d->edges.empty() ? 0 : d->edges.size() - 1, "initial table", issues);
  }
  if (!(m.r2_min < m.r2_max)) issues.emplace_back("initial r2 range is empty");
  if (!(m.r2_dot_min < m.r2_dot_max)) issues.emplace_back("initial r2_dot range is empty");
  check_edges(m.cf_r1_edges, "car-following r1 edges", issues);
  check_edges(m.cf_r1_dot_edges, "car-following r1_dot edges", issues);
  check_edges(m.free_v_edges, "free-driving speed edges", issues);
  check_edges(m.cut_r2_edges, "cut-in r2 edges", issues);
  check_edges(m.cut_r2_dot_edges, "cut-in r2_dot edges", issues);
  if (!issues.empty()) return issues;

  if (m.cf_probs.size() != (m.cf_r1_edges.size() - 1) * (m.cf_r1_dot_edges.size() - 1)) {
    issues.emplace_back("car-following table has the wrong number of cells");
  }
  for (std::size_t c = 0; c < m.cf_probs.size(); ++c) {
    check_row(m.cf_probs[c], m.accel_grid.size(), "car-following cell " + std::to_string(c), issues);
  }
  if (m.free_probs.size() != m.free_v_edges.size() - 1) issues.emplace_back("free-driving table has the wrong number of cells");
  for (std::size_t c = 0; c < m.free_probs.size(); ++c) {
    check_row(m.free_probs[c], m.accel_grid.size(), "free-driving cell " + std::to_string(c), issues);
  }
  if (m.cut_probs.size() != (m.cut_r2_edges.size() - 1) * (m.cut_r2_dot_edges.size() - 1)) {
    issues.emplace_back("cut-in table has the wrong number of cells");
  }
  for (double p : m.cut_probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      issues.emplace_back("cut-in probability outside [0, 1]");
      break;
    }
  }
  return issues;
}

NddModel synthetic_ndd(const SyntheticNddOptions& o) {
  NddModel m;
  m.accel_grid = linspace(o.accel_lo, o.accel_hi, o.grid_points);
  m.initial_v_bv = truncated_gaussian(30.0, 4.0, 10.0, 40.0, 1.0);
  m.initial_r1 = truncated_gaussian(30.0, 15.0, 5.0, 100.0, 2.5);
  m.initial_r1_dot = truncated_gaussian(0.0, 2.0, -6.0, 6.0, 0.5);

  m.cf_r1_edges = linspace(0.0, 120.0, 25);
  m.cf_r1_dot_edges = linspace(-10.0, 10.0, 21);
  for (std::size_t i = 0; i + 1 < m.cf_r1_edges.size(); ++i) {
    for (std::size_t k = 0; k + 1 < m.cf_r1_dot_edges.size(); ++k) {
      const double r1 = centre(m.cf_r1_edges, i);
      const double r1_dot = centre(m.cf_r1_dot_edges, k);
      const double mean = std::clamp(0.4 * r1_dot + 0.05 * (r1 - 30.0), -3.5, 1.5);
      m.cf_probs.push_back(gaussian_row(m.accel_grid, mean, o.accel_sd, o.accel_floor));
    }
  }

  m.free_v_edges = linspace(0.0, 50.0, 26);
  for (std::size_t i = 0; i + 1 < m.free_v_edges.size(); ++i) {
    const double mean = std::clamp(0.2 * (30.0 - centre(m.free_v_edges, i)), -2.0, 1.5);
    m.free_probs.push_back(gaussian_row(m.accel_grid, mean, o.accel_sd, o.accel_floor));
  }

  m.cut_r2_edges = linspace(0.0, 120.0, 61);
  m.cut_r2_dot_edges = linspace(-20.0, 10.0, 31);
  for (std::size_t i = 0; i + 1 < m.cut_r2_edges.size(); ++i) {
    for (std::size_t k = 0; k + 1 < m.cut_r2_dot_edges.size(); ++k) {
      const double r2 = centre(m.cut_r2_edges, i);
      const double closing = std::max(0.0, -centre(m.cut_r2_dot_edges, k));
      const double urgency = closing / std::max(r2 - 5.0, 1.0);
      const double p = std::min(o.cut_in_cap, o.cut_in_base * (1.0 + o.cut_in_urgency_gain * urgency));
      m.cut_probs.push_back(r2 < o.cut_in_min_gap ? 0.0 : p);
    }
  }
  return m;
}

std::string to_json(const NddModel& m) {
  nlohmann::json j;
  j["accel_grid"] = m.accel_grid;
  j["initial"] = {{"v_bv", binned_json(m.initial_v_bv)},
                  {"r1", binned_json(m.initial_r1)},
                  {"r1_dot", binned_json(m.initial_r1_dot)},
                  {"r2_range", {m.r2_min, m.r2_max}},
                  {"r2_dot_range", {m.r2_dot_min, m.r2_dot_max}}};
  j["car_following"] = {{"r1_edges", m.cf_r1_edges}, {"r1_dot_edges", m.cf_r1_dot_edges}, {"probs", m.cf_probs}};
  j["free_driving"] = {{"v_edges", m.free_v_edges}, {"probs", m.free_probs}};
  j["cut_in"] = {{"r2_edges", m.cut_r2_edges}, {"r2_dot_edges", m.cut_r2_dot_edges}, {"probs", m.cut_probs}};
  return j.dump() + "\n";
}

NddModel ndd_from_json(const std::string& text) {
  NddModel m;
  try {
    const auto j = nlohmann::json::parse(text);
    m.accel_grid = j.at("accel_grid").get<std::vector<double>>();
    const auto& init = j.at("initial");
    m.initial_v_bv = binned_from(init.at("v_bv"));
    m.initial_r1 = binned_from(init.at("r1"));
    m.initial_r1_dot = binned_from(init.at("r1_dot"));
    const auto r2 = init.at("r2_range").get<std::vector<double>>();
    const auto r2_dot = init.at("r2_dot_range").get<std::vector<double>>();
    if (r2.size() != 2 || r2_dot.size() != 2) throw std::invalid_argument("NDD model: ranges need two values");
    m.r2_min = r2[0];
    m.r2_max = r2[1];
    m.r2_dot_min = r2_dot[0];
    m.r2_dot_max = r2_dot[1];
    const auto& cf = j.at("car_following");
    m.cf_r1_edges = cf.at("r1_edges").get<std::vector<double>>();
    m.cf_r1_dot_edges = cf.at("r1_dot_edges").get<std::vector<double>>();
    m.cf_probs = cf.at("probs").get<std::vector<std::vector<double>>>();
    const auto& fd = j.at("free_driving");
    m.free_v_edges = fd.at("v_edges").get<std::vector<double>>();
    m.free_probs = fd.at("probs").get<std::vector<std::vector<double>>>();
    const auto& ci = j.at("cut_in");
    m.cut_r2_edges = ci.at("r2_edges").get<std::vector<double>>();
    m.cut_r2_dot_edges = ci.at("r2_dot_edges").get<std::vector<double>>();
    m.cut_probs = ci.at("probs").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("NDD model: ") + e.what());
  }
  const auto issues = validate(m);
  if (!issues.empty()) throw std::invalid_argument("NDD model: " + issues.front());
  return m;
}

NddModel load_ndd(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open NDD model " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ndd_from_json(buf.str());
}

void save_ndd(const NddModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write NDD model " + path.string());
  out << to_json(model);
}

}  // namespace scvsafe
