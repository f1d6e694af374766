// Copyright 2026 The Authors.
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

#include "cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

namespace sensel::cli {
namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "sensel");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string Bundled(int id) {
  return std::string(SENSEL_SOURCE_DIR) + "/scenarios/example" + std::to_string(id) + ".json";
}

TEST(CliTest, SelectLpReportsCertificate) {
  const auto r = Invoke({"select", Bundled(2), "--algo", "lp"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["algo"], "lp");
  EXPECT_TRUE(j["feasible"].get<bool>());
  EXPECT_EQ(j["schedule"].size(), 3u);
  for (const auto& step : j["schedule"]) EXPECT_EQ(step.size(), 2u);
  EXPECT_GE(j["gap"].get<double>(), -1e-9);
  EXPECT_TRUE(j.contains("f_lp"));
  EXPECT_TRUE(j.contains("certified_optimal"));
}

TEST(CliTest, SelectSdrReportsRelaxation) {
  const auto r = Invoke({"select", Bundled(4), "--algo", "sdr", "--samples", "30", "--seed", "3", "--threads", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["sdp_status"], "optimal");
  EXPECT_EQ(j["samples"], 30);
  EXPECT_LE(j["bqp_lower_bound"].get<double>(), 1e-9);
  // Same seed, same answer.
  const auto again = Invoke({"select", Bundled(4), "--algo", "sdr", "--samples", "30", "--seed", "3", "--threads", "2"});
  EXPECT_EQ(Json::parse(again.out)["schedule"], j["schedule"]);
}

TEST(CliTest, ExitCodes) {
  EXPECT_EQ(Invoke({}).code, kExitUsage);
  EXPECT_EQ(Invoke({"select", "/nonexistent.json"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"select", Bundled(2), "--algo", "greedy"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"select", Bundled(4), "--algo", "topk"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"select", Bundled(5), "--algo", "exhaustive", "--cap", "1000"}).code, kExitInfeasible);
  const auto sweep = Invoke({"sweep", Bundled(4), "--param", "gain", "--values", "1"});
  EXPECT_EQ(sweep.code, kExitUsage);
  EXPECT_NE(sweep.err.find("jammer_power"), std::string::npos);
  EXPECT_EQ(Invoke({"example", "9"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"--help"}).code, kExitOk);
}

TEST(CliTest, ExampleWritesLoadableScenario) {
  const auto path = (std::filesystem::temp_directory_path() / "sensel_cli_example6.json").string();
  const auto r = Invoke({"example", "6", "--out", path});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto loaded = load_scenario(path);
  EXPECT_EQ(loaded.horizon(), 5u);
  EXPECT_TRUE(loaded.noise.distance.has_value());
  std::filesystem::remove(path);
  const auto printed = Invoke({"example", "2", "--seed", "9"});
  EXPECT_EQ(Json::parse(printed.out)["seed"], 9);
}

TEST(CliTest, SimulateAndSweepWriteCsv) {
  const auto sim = Invoke({"simulate", Bundled(2), "--algo", "lp", "--runs", "3", "--windows", "2"});
  ASSERT_EQ(sim.code, kExitOk) << sim.err;
  std::istringstream in(sim.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "step,trace_p,rmse,f3,gap,algo,param_value,seed");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 6);
  const auto sweep = Invoke({"sweep", Bundled(4), "--algo", "ignore-dep", "--param", "jammer_power", "--values",
                          "1e5,6e5", "--runs", "2"});
  ASSERT_EQ(sweep.code, kExitOk) << sweep.err;
  EXPECT_NE(sweep.out.find(",ignore-dep,100000,"), std::string::npos);
  EXPECT_NE(sweep.out.find(",ignore-dep,600000,"), std::string::npos);
}

}  // namespace
}  // namespace sensel::cli
