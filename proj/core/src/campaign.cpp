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

#include "scvsafe/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <exception>
#include <limits>
#include <mutex>
#include <set>
#include <type_traits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "scvsafe/record_io.hpp"

namespace scvsafe {
namespace {

using Json = nlohmann::ordered_json;

Json number_or_inf(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double read_number_or_inf(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw std::invalid_argument("expected a number or \"inf\", got \"" + s + "\"");
  }
  return j.get<double>();
}

Json driver_json(const DriverParams& d) {
  Json j;
  j["name"] = d.name;
  if (const auto* idm = std::get_if<IdmParams>(&d.model)) {
    j["model"] = "idm";
    j["max_accel"] = idm->max_accel;
    j["desired_speed"] = idm->desired_speed;
    j["time_headway"] = idm->time_headway;
    j["jam_distance"] = idm->jam_distance;
    j["comfortable_decel"] = idm->comfortable_decel;
    j["exponent"] = idm->exponent;
  } else {
    const auto& f = std::get<FvdmParams>(d.model);
    j["model"] = "fvdm";
    j["kappa"] = f.kappa;
    j["lambda"] = f.lambda;
    j["a_min"] = f.a_min;
    j["v_max"] = f.v_max;
    j["s_c"] = f.s_c;
    j["width"] = f.width;
  }
  return j;
}

// Reads the listed keys, collecting every problem instead of stopping.
class Reader {
 public:
  Reader(const Json& j, std::string where, std::vector<std::string>& errors)
      : j_(j), where_(std::move(where)), errors_(errors) {
    if (!j_.is_object()) errors_.push_back(where_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.is_object() || !j_.contains(key)) return;
    try {
      if constexpr (std::is_unsigned_v<T>) {
        if (j_.at(key).is_number_integer() && !j_.at(key).is_number_unsigned()) {
          errors_.push_back(where_ + "." + key + ": must be non-negative");
          return;
        }
      }
      out = j_.at(key).get<T>();
    } catch (const std::exception& e) {
      errors_.push_back(where_ + "." + key + ": " + e.what());
    }
  }

  void get_inf(const char* key, double& out) {
    seen_.insert(key);
    if (!j_.is_object() || !j_.contains(key)) return;
    try {
      out = read_number_or_inf(j_.at(key));
    } catch (const std::exception& e) {
      errors_.push_back(where_ + "." + key + ": " + e.what());
    }
  }

  void with(const char* key, const std::function<void(const Json&)>& fn) {
    seen_.insert(key);
    if (j_.is_object() && j_.contains(key)) fn(j_.at(key));
  }

  void reject_unknown() {
    if (!j_.is_object()) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) errors_.push_back(where_ + ": unknown key \"" + key + "\"");
    }
  }

 private:
  const Json& j_;
  std::string where_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

DriverParams read_driver(const Json& j, const std::string& where, std::vector<std::string>& errors,
                         DriverParams fallback) {
  Reader r(j, where, errors);
  std::string model = std::holds_alternative<IdmParams>(fallback.model) ? "idm" : "fvdm";
  r.get("model", model);
  r.get("name", fallback.name);
  if (model == "idm") {
    IdmParams p = std::holds_alternative<IdmParams>(fallback.model) ? std::get<IdmParams>(fallback.model) : IdmParams{};
    r.get("max_accel", p.max_accel);
    r.get("desired_speed", p.desired_speed);
    r.get("time_headway", p.time_headway);
    r.get("jam_distance", p.jam_distance);
    r.get("comfortable_decel", p.comfortable_decel);
    r.get("exponent", p.exponent);
    fallback.model = p;
  } else if (model == "fvdm") {
    FvdmParams p =
        std::holds_alternative<FvdmParams>(fallback.model) ? std::get<FvdmParams>(fallback.model) : FvdmParams{};
    r.get("kappa", p.kappa);
    r.get("lambda", p.lambda);
    r.get("a_min", p.a_min);
    r.get("v_max", p.v_max);
    r.get("s_c", p.s_c);
    r.get("width", p.width);
    fallback.model = p;
  } else {
    errors.push_back(where + ".model: expected \"idm\" or \"fvdm\", got \"" + model + "\"");
  }
  r.reject_unknown();
  return fallback;
}

Json report_json(const EstimateReport& r) {
  Json j;
  j["mean"] = r.mean;
  j["variance"] = r.asymptotic_variance;
  j["n"] = r.n;
  j["half_width"] = r.half_width;
  j["rhw"] = r.rhw ? Json(*r.rhw) : Json(nullptr);
  j["confidence"] = r.confidence;
  return j;
}

}  // namespace

std::string to_string(CampaignMode mode) { return mode == CampaignMode::nde ? "nde" : "nade"; }

CampaignMode parse_mode(const std::string& name) {
  if (name == "nde") return CampaignMode::nde;
  if (name == "nade") return CampaignMode::nade;
  throw std::invalid_argument("mode must be \"nde\" or \"nade\", got \"" + name + "\"");
}

std::vector<std::string> validate(const CampaignConfig& c) {
  std::vector<std::string> issues;
  if (c.n < 1) issues.emplace_back("n must be >= 1");
  if (!(c.rhw_threshold > 0.0)) issues.emplace_back("rhw_threshold must be > 0");
  if (!(c.confidence > 0.0 && c.confidence < 1.0)) issues.emplace_back("confidence must lie in (0, 1)");
  if (c.max_control_steps < 1) issues.emplace_back("max_control_steps must be >= 1");
  if (c.sim.horizon_steps < 0) issues.emplace_back("horizon_steps must be >= 0");
  if (!(c.sim.dt > 0.0)) issues.emplace_back("dt must be > 0");
  if (!(c.sim.vehicle_length > 0.0)) issues.emplace_back("vehicle_length must be > 0");
  for (auto& issue : validate(c.av)) issues.push_back("av: " + issue);
  if (c.sim.lv_model) {
    for (auto& issue : validate(*c.sim.lv_model)) issues.push_back("lv: " + issue);
  }
  for (auto& issue : validate(c.nade)) issues.push_back(std::move(issue));
  if (c.output_dir.empty()) issues.emplace_back("output_dir must not be empty");
  return issues;
}

CampaignConfig config_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  CampaignConfig c;
  std::vector<std::string> errors;
  Reader r(j, "config", errors);
  r.with("mode", [&](const Json& v) {
    try {
      c.mode = parse_mode(v.get<std::string>());
    } catch (const std::exception& e) {
      errors.push_back(std::string("config.mode: ") + e.what());
    }
  });
  r.get("n", c.n);
  r.get("seed", c.seed);
  r.get("alpha", c.nade.alpha);
  r.get("epsilon", c.nade.epsilon);
  r.get_inf("criticality_threshold", c.nade.criticality_threshold);
  r.get("max_control_steps", c.max_control_steps);
  r.get("rhw_threshold", c.rhw_threshold);
  r.get("confidence", c.confidence);
  r.get("horizon_steps", c.sim.horizon_steps);
  r.get("dt", c.sim.dt);
  r.get("vehicle_length", c.sim.vehicle_length);
  r.get("ndd", c.ndd_path);
  r.with("output_dir", [&](const Json& v) {
    try {
      c.output_dir = v.get<std::string>();
    } catch (const std::exception& e) {
      errors.push_back(std::string("config.output_dir: ") + e.what());
    }
  });
  r.get("trace", c.trace);
  r.get("trace_limit", c.trace_limit);
  r.get("workers", c.workers);
  r.with("av", [&](const Json& v) { c.av = read_driver(v, "config.av", errors, c.av); });
  r.with("lv", [&](const Json& v) {
    if (!v.is_null()) c.sim.lv_model = read_driver(v, "config.lv", errors, DriverParams::idm(2.0, "LV"));
  });
  r.with("surrogates", [&](const Json& v) {
    if (!v.is_array()) {
      errors.emplace_back("config.surrogates: expected an array");
      return;
    }
    c.nade.surrogates.clear();
    for (std::size_t k = 0; k < v.size(); ++k) {
      const std::string where = "config.surrogates[" + std::to_string(k) + "]";
      SurrogateSpec sm;
      sm.id = static_cast<int>(k + 1);
      Reader sr(v[k], where, errors);
      sr.get("challenge_horizon", sm.challenge_horizon);
      sr.with("driver", [&](const Json& d) { sm.driver = read_driver(d, where + ".driver", errors, sm.driver); });
      sr.reject_unknown();
      c.nade.surrogates.push_back(std::move(sm));
    }
  });
  r.with("synthetic_ndd", [&](const Json& v) {
    Reader sr(v, "config.synthetic_ndd", errors);
    sr.get("grid_points", c.synthetic.grid_points);
    sr.get("accel_lo", c.synthetic.accel_lo);
    sr.get("accel_hi", c.synthetic.accel_hi);
    sr.get("accel_sd", c.synthetic.accel_sd);
    sr.get("accel_floor", c.synthetic.accel_floor);
    sr.get("cut_in_base", c.synthetic.cut_in_base);
    sr.get("cut_in_urgency_gain", c.synthetic.cut_in_urgency_gain);
    sr.get("cut_in_cap", c.synthetic.cut_in_cap);
    sr.get("cut_in_min_gap", c.synthetic.cut_in_min_gap);
    sr.reject_unknown();
  });
  r.reject_unknown();
  if (errors.empty()) errors = validate(c);
  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw std::invalid_argument(msg);
  }
  return c;
}

std::string config_to_json(const CampaignConfig& c) {
  Json j;
  j["mode"] = to_string(c.mode);
  j["n"] = c.n;
  j["seed"] = c.seed;
  j["alpha"] = c.nade.alpha;
  j["epsilon"] = c.nade.epsilon;
  j["criticality_threshold"] = number_or_inf(c.nade.criticality_threshold);
  j["max_control_steps"] = c.max_control_steps;
  j["rhw_threshold"] = c.rhw_threshold;
  j["confidence"] = c.confidence;
  j["horizon_steps"] = c.sim.horizon_steps;
  j["dt"] = c.sim.dt;
  j["vehicle_length"] = c.sim.vehicle_length;
  j["av"] = driver_json(c.av);
  j["lv"] = c.sim.lv_model ? driver_json(*c.sim.lv_model) : Json(nullptr);
  auto sms = Json::array();
  for (const auto& sm : c.nade.surrogates) {
    sms.push_back(Json{{"challenge_horizon", sm.challenge_horizon}, {"driver", driver_json(sm.driver)}});
  }
  j["surrogates"] = std::move(sms);
  j["ndd"] = c.ndd_path;
  j["synthetic_ndd"] = {{"grid_points", c.synthetic.grid_points},
                        {"accel_lo", c.synthetic.accel_lo},
                        {"accel_hi", c.synthetic.accel_hi},
                        {"accel_sd", c.synthetic.accel_sd},
                        {"accel_floor", c.synthetic.accel_floor},
                        {"cut_in_base", c.synthetic.cut_in_base},
                        {"cut_in_urgency_gain", c.synthetic.cut_in_urgency_gain},
                        {"cut_in_cap", c.synthetic.cut_in_cap},
                        {"cut_in_min_gap", c.synthetic.cut_in_min_gap}};
  j["output_dir"] = c.output_dir.string();
  j["trace"] = c.trace;
  j["trace_limit"] = c.trace_limit;
  j["workers"] = c.workers;
  return j.dump(2) + "\n";
}

CampaignConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return config_from_json(buf.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

NddModel resolve_ndd(const CampaignConfig& config) {
  if (config.ndd_path.empty()) return synthetic_ndd(config.synthetic);
  return load_ndd(config.ndd_path);
}

std::vector<TestRecord> simulate(const CampaignConfig& config, const NddModel& ndd,
                                 std::vector<std::vector<TraceRow>>* traces) {
  std::vector<TestRecord> records(config.n);
  const std::size_t traced = config.trace ? std::min(config.trace_limit, config.n) : 0;
  if (traces) traces->assign(traced, {});
  ChallengeCache cache;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto episodes = [&] {
    for (std::size_t i = next.fetch_add(1); i < config.n; i = next.fetch_add(1)) {
      Rng rng = Rng::for_stream(config.seed, i);
      const bool trace = i < traced && traces != nullptr;
      EpisodeResult e = config.mode == CampaignMode::nde
                            ? run_nde_episode(rng, ndd, config.av, config.sim, trace)
                            : run_nade_episode(rng, ndd, config.nade, config.av, config.sim, &cache, trace);
      e.test_record.test_id = static_cast<std::int64_t>(i);
      records[i] = std::move(e.test_record);
      if (trace) (*traces)[i] = std::move(*e.trajectory);
    }
  };
  auto work = [&] {
    try {
      episodes();
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(config.n);
    }
  };
  std::size_t workers = config.workers == 0 ? std::max(1U, std::thread::hardware_concurrency()) : config.workers;
  workers = std::min(workers, config.n);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

CampaignEstimates estimate_all(std::span<const TestRecord> records, CampaignMode mode,
                               std::size_t max_control_steps, double confidence) {
  CampaignEstimates e;
  e.n = records.size();
  for (const auto& r : records) e.crashes += r.crash_prob > 0.0 ? 1 : 0;
  e.components = component_count(records);
  if (mode == CampaignMode::nde) e.crude = crude_monte_carlo(records, confidence);
  e.importance = importance_weighted_estimate(records, confidence);
  if (e.components > 0) {
    ScvOptions o;
    o.max_control_steps = max_control_steps;
    o.confidence = confidence;
    e.scv = scv_estimate(stratify(records, max_control_steps), e.components, o);
  }
  return e;
}

std::string summary_json(const CampaignConfig& config, const CampaignEstimates& e) {
  Json j;
  j["config"] = Json::parse(config_to_json(config));
  // Execution details stay out so re-runs with another worker count match byte for byte.
  j["config"].erase("workers");
  j["n"] = e.n;
  j["crashes"] = e.crashes;
  j["components"] = e.components;
  Json est = Json::object();
  if (e.crude) est["crude"] = report_json(*e.crude);
  if (e.importance) est["is"] = report_json(*e.importance);
  if (e.scv) est["scv"] = report_json(e.scv->report);
  j["estimates"] = std::move(est);
  auto strata = Json::array();
  if (e.scv) {
    for (const auto& s : e.scv->strata) {
      strata.push_back(Json{{"l", s.l},
                            {"n_l", s.n_l},
                            {"d_l", s.d_l},
                            {"rank", s.fit.rank},
                            {"mu_hat", s.mu_hat},
                            {"residual_variance", s.residual_variance}});
    }
  }
  j["strata"] = std::move(strata);
  const std::size_t components = config.mode == CampaignMode::nade ? config.nade.surrogates.size() : 1;
  const ColumnCount cc = column_count(components, static_cast<std::size_t>(config.sim.horizon_steps));
  j["column_count"] = {{"components", cc.components},
                       {"exponent", cc.exponent},
                       {"log10", cc.log10_value},
                       {"text", cc.to_string()}};
  return j.dump(2) + "\n";
}

CampaignResult run_campaign(const CampaignConfig& config) {
  if (const auto issues = validate(config); !issues.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : issues) msg += "\n  - " + e;
    throw std::invalid_argument(msg);
  }
  const NddModel ndd = resolve_ndd(config);
  CampaignResult result;
  std::vector<std::vector<TraceRow>> traces;
  result.records = simulate(config, ndd, config.trace ? &traces : nullptr);

  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + config.output_dir.string() + ": " + ec.message());
  result.records_path = config.output_dir / "records.jsonl";
  write_jsonl(result.records_path, result.records);

  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto dir = config.output_dir / "traces";
    std::filesystem::create_directories(dir);
    const auto path = dir / ("episode_" + std::to_string(i) + ".csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_trace_csv(out, ndd, traces[i]);
  }

  result.estimates = estimate_all(result.records, config.mode, config.max_control_steps, config.confidence);
  result.summary_path = config.output_dir / "summary.json";
  {
    std::ofstream out(result.summary_path);
    if (!out) throw std::runtime_error("cannot write " + result.summary_path.string());
    out << summary_json(config, result.estimates);
  }
  if (result.estimates.scv) {
    result.strata_path = config.output_dir / "strata.csv";
    std::ofstream out(*result.strata_path);
    if (!out) throw std::runtime_error("cannot write " + result.strata_path->string());
    write_strata_csv(out, result.estimates.scv->strata);
  }
  return result;
}

}  // namespace scvsafe
