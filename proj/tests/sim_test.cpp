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

#include "sensel/sim.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "sensel/examples.hpp"

namespace sensel {
namespace {

RunConfig Config(Scenario s, Algorithm a, std::size_t runs) {
  RunConfig cfg;
  cfg.scenario = std::move(s);
  cfg.plan.algorithm = a;
  cfg.plan.samples = 20;
  cfg.runs = runs;
  cfg.seed = 5;
  return cfg;
}

TEST(CompensatedSumTest, KeepsSmallTerms) {
  CompensatedSum s;
  s.add(1e16);
  for (int k = 0; k < 1000; ++k) s.add(1.0);
  s.add(-1e16);
  EXPECT_EQ(s.value(), 1000.0);
}

TEST(AlgorithmTest, NamesRoundTrip) {
  for (Algorithm a : {Algorithm::kTopK, Algorithm::kLpRound, Algorithm::kSdr, Algorithm::kIgnoreDep,
                      Algorithm::kExhaustive}) {
    EXPECT_EQ(parse_algorithm(to_string(a)), a);
  }
  EXPECT_FALSE(parse_algorithm("greedy").has_value());
  EXPECT_EQ(parse_sweep_param("jammer_power"), SweepParam::kJammerPower);
  EXPECT_FALSE(parse_sweep_param("power").has_value());
}

TEST(TruthTest, WithoutProcessNoiseFollowsDynamics) {
  Scenario s = example2();
  for (auto& q : s.system.q) q.setZero();
  const auto x = simulate_truth(s, 6, 1);
  ASSERT_EQ(x.size(), 7u);
  for (std::size_t t = 0; t < 6; ++t) {
    EXPECT_LE((x[t + 1] - s.system.transition(t % 3) * x[t]).norm(), 1e-12);
  }
  // Static model: the state stays at x0.
  Scenario c = s;
  for (auto& f : c.system.f) f.setIdentity();
  for (const auto& v : simulate_truth(c, 4, 2)) EXPECT_EQ(v, c.x0);
}

TEST(MeasurementTest, JammerNoiseSampleCovariance) {
  const Scenario s = example4();
  const Vector state = Vector::Zero(s.system.state_dim);
  Rng rng(17);
  const Index d = s.noise.r_full.front().rows();
  Matrix acc = Matrix::Zero(d, d);
  const int draws = 10000;
  for (int k = 0; k < draws; ++k) {
    const Vector y = draw_full_measurement(s, 0, state, rng);
    acc += y * y.transpose();
  }
  const Matrix cov = acc / draws;
  const Matrix& r = s.noise.r_full.front();
  EXPECT_LE((cov - r).norm(), 0.05 * r.norm());
}

TEST(MeasurementTest, MaskedMeasurementsUseSchedule) {
  const Scenario s = example2();
  const auto truth = simulate_truth(s, 3, 4);
  SelectionSchedule sched(9, 3);
  sched.set(2, 0, true);
  sched.set(5, 1, true);
  const auto m = simulate_measurements(truth, s, sched, 8);
  ASSERT_EQ(m.size(), 3u);
  const auto off = sensor_offsets(s.sensors);
  EXPECT_TRUE(m[2].z.isZero(0.0));
  EXPECT_TRUE(m[0].z.segment(off[1], s.sensors[1].dim()).isZero(0.0));
  EXPECT_FALSE(m[0].z.segment(off[2], s.sensors[2].dim()).isZero(0.0));
}

TEST(ClosedLoopTest, TracePMatchesRollout) {
  const Scenario s = example2();
  const RunResult r = run_closed_loop(Config(s, Algorithm::kLpRound, 3));
  const auto problem = make_problem(s);
  const auto traj = covariance_rollout(problem.p0, problem, r.first_schedule);
  ASSERT_EQ(r.trace_p.size(), traj.size());
  for (std::size_t n = 0; n < traj.size(); ++n) {
    EXPECT_NEAR(r.trace_p[n], traj[n].trace(), 1e-10 * traj[n].trace());
  }
  EXPECT_NEAR(r.f1_trace, traj.back().trace(), 1e-10 * traj.back().trace());
  ASSERT_TRUE(r.gap.has_value());
  EXPECT_GE(*r.gap, -1e-9);
}

TEST(ClosedLoopTest, DeterministicAcrossThreads) {
  RunConfig cfg = Config(example6(), Algorithm::kSdr, 6);
  cfg.windows = 2;
  const RunResult a = run_closed_loop(cfg);
  cfg.threads = 3;
  const RunResult b = run_closed_loop(cfg);
  EXPECT_EQ(a.rmse, b.rmse);
  EXPECT_EQ(a.trace_p, b.trace_p);
  EXPECT_EQ(a.f3, b.f3);
  EXPECT_EQ(a.rmse.size(), 10u);
  cfg.seed = 6;
  EXPECT_NE(run_closed_loop(cfg).rmse, a.rmse);
}

TEST(ClosedLoopTest, SmallNoiseGivesSmallError) {
  Scenario s = example2();
  for (auto& r : s.noise.r_base) r *= 1e-8;
  refresh_noise(s.noise, s.sensors);
  for (auto& q : s.system.q) q *= 1e-8;
  s.p0 *= 1e-8;
  const RunResult r = run_closed_loop(Config(s, Algorithm::kLpRound, 5));
  for (double e : r.rmse) EXPECT_LT(e, 1e-2);
}

TEST(ClosedLoopTest, ZeroWeightStepsContributeNoF3) {
  Scenario s = example2();
  s.weights = {0.0, 0.5, 0.5};
  const RunResult r = run_closed_loop(Config(s, Algorithm::kLpRound, 2));
  EXPECT_EQ(r.f3[0], 0.0);
  EXPECT_GT(r.f3[1], 0.0);
}

TEST(SweepTest, JammerPowerLowersBestInformation) {
  RunConfig cfg = Config(example4(), Algorithm::kExhaustive, 2);
  const std::vector<double> powers(std::begin(kJammerPowers), std::end(kJammerPowers));
  const auto results = sweep(cfg, SweepParam::kJammerPower, powers);
  ASSERT_EQ(results.size(), 7u);
  for (std::size_t k = 0; k < 7; ++k) {
    EXPECT_EQ(results[k].param_value, powers[k]);
    if (k > 0) EXPECT_LE(results[k].f3_total, results[k - 1].f3_total * (1.0 + 1e-12));
  }
  const auto single = sweep(Config(example2(), Algorithm::kLpRound, 1), SweepParam::kMPerStep, {3.0});
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].first_schedule.count(0), 3u);
  EXPECT_THROW(sweep(Config(example2(), Algorithm::kLpRound, 1), SweepParam::kJammerPower, {1.0}), Error);
}

TEST(CsvTest, HeaderAndRows) {
  const auto results = sweep(Config(example2(), Algorithm::kLpRound, 2), SweepParam::kMPerStep, {1.0, 2.0});
  std::ostringstream os;
  write_csv(os, results);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "step,trace_p,rmse,f3,gap,algo,param_value,seed");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 7);
    EXPECT_NE(line.find(",lp,"), std::string::npos);
  }
  EXPECT_EQ(rows, 6);
}

}  // namespace
}  // namespace sensel
