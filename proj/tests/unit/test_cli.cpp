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
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "scvsafe/record_io.hpp"
#include "scvsafe/toy_world.hpp"

namespace {

namespace fs = std::filesystem;

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" SCVSAFE_CLI_PATH "\" " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  while (fgets(buf.data(), static_cast<int>(buf.size()), pipe) != nullptr) r.out += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("scvsafe_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

TEST(Cli, SimulateEstimateAndCompare) {
  const auto dir = scratch("pipeline");
  const auto nade = dir / "nade";
  auto r = run("simulate --mode nade -n 300 --seed 3 -o " + nade.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("\"estimates\""), std::string::npos);
  ASSERT_TRUE(fs::exists(nade / "records.jsonl"));
  EXPECT_TRUE(fs::exists(nade / "summary.json"));
  EXPECT_TRUE(fs::exists(nade / "strata.csv"));
  EXPECT_EQ(scvsafe::read_jsonl(nade / "records.jsonl").size(), 300u);

  r = run("estimate -r " + (nade / "records.jsonl").string() + " -e scv --strata-csv " + (dir / "s.csv").string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("\"strata\""), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "s.csv"));

  r = run("convergence -r " + (nade / "records.jsonl").string() + " -e is -o " + (dir / "conv.csv").string());
  ASSERT_EQ(r.code, 0) << r.out;
  std::ifstream conv(dir / "conv.csv");
  std::string header;
  std::getline(conv, header);
  EXPECT_EQ(header, "n,mean,variance,rhw");

  r = run("compare -r nade=" + (nade / "records.jsonl").string() + " -e is,scv --shuffles 3 --json " +
          (dir / "cmp.json").string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("nade/scv over nade/is"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(dir / "cmp.json"));

  r = run("bootstrap -r " + (nade / "records.jsonl").string() + " -e scv --shuffles 2");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("\"rnot\""), std::string::npos);
}

TEST(Cli, ConfigFileAndEnvironmentOverride) {
  const auto dir = scratch("config");
  write(dir / "c.json", R"({"mode": "nde", "n": 120, "seed": 4, "output_dir": "ignored"})");
  const auto target = dir / "from_env";
  const auto r = run("simulate -c " + (dir / "c.json").string(), "SCVSAFE_OUTPUT_DIR=" + target.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(target / "records.jsonl"));
  EXPECT_FALSE(fs::exists("ignored/records.jsonl"));
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("codes");
  write(dir / "bad.json", R"({"n": 10, "nonsense": true})");
  auto r = run("simulate -c " + (dir / "bad.json").string());
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_NE(r.out.find("nonsense"), std::string::npos);
  EXPECT_EQ(run("simulate --mode sideways").code, 1);
  EXPECT_EQ(run("no-such-command").code, 1);
  EXPECT_EQ(run("estimate -r records.jsonl -e magic").code, 1);
  EXPECT_EQ(run("estimate -r /nonexistent/records.jsonl").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, ToyVerify) {
  auto r = run("toy-verify");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);

  const auto dir = scratch("toy");
  auto world = scvsafe::toy::canonical_world();
  world.outcomes[1].steps[0].p = 0.5;
  write(dir / "bad_world.json", scvsafe::toy::to_fixture(world));
  r = run("toy-verify --fixture " + (dir / "bad_world.json").string());
  EXPECT_EQ(r.code, 3) << r.out;
  EXPECT_NE(r.out.find("normalization"), std::string::npos);
}

TEST(Cli, DiagnosticsCommands) {
  auto r = run("column-count -J 3 -T 201");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("3^203", 0), 0u) << r.out;
  const auto dir = scratch("ndd");
  r = run("ndd -o " + (dir / "ndd.json").string());
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(fs::exists(dir / "ndd.json"));
}

}  // namespace
