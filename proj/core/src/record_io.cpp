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

#include "scvsafe/record_io.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace scvsafe {

std::string to_jsonl_line(const TestRecord& r) {
  nlohmann::ordered_json j;
  j["test_id"] = r.test_id;
  j["num_control_steps"] = r.num_control_steps;
  j["crash"] = r.crash_prob;
  auto steps = nlohmann::ordered_json::array();
  for (const auto& s : r.steps) {
    nlohmann::ordered_json sj;
    sj["p"] = s.p;
    sj["q_alpha"] = s.q_alpha;
    sj["q"] = s.q;
    steps.push_back(std::move(sj));
  }
  j["steps"] = std::move(steps);
  return j.dump();
}

TestRecord from_jsonl_line(const std::string& line) {
  TestRecord r;
  try {
    const auto j = nlohmann::json::parse(line);
    r.test_id = j.at("test_id").get<std::int64_t>();
    r.num_control_steps = j.at("num_control_steps").get<std::size_t>();
    const auto& crash = j.at("crash");
    r.crash_prob = crash.is_boolean() ? (crash.get<bool>() ? 1.0 : 0.0) : crash.get<double>();
    for (const auto& sj : j.at("steps")) {
      r.steps.push_back(CriticalStepRecord{sj.at("p").get<double>(), sj.at("q_alpha").get<double>(),
                                           sj.at("q").get<std::vector<double>>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed record: ") + e.what());
  }
  for (const auto& step : r.steps) {
    if (!(step.q_alpha > 0.0)) throw std::invalid_argument("malformed record: non-positive q_alpha");
  }
  r.weight = r.likelihood_ratio();
  validate_record(r);
  return r;
}

void write_jsonl(std::ostream& out, std::span<const TestRecord> records) {
  for (const auto& r : records) out << to_jsonl_line(r) << '\n';
}

void write_jsonl(const std::filesystem::path& path, std::span<const TestRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_jsonl(out, records);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<TestRecord> read_jsonl(std::istream& in, const std::string& source) {
  std::vector<TestRecord> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(from_jsonl_line(line));
    } catch (const std::exception& e) {
      throw std::invalid_argument(source + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

std::vector<TestRecord> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_jsonl(in, path.string());
}

}  // namespace scvsafe
