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

#include "sensel/select_separable.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <vector>

#include "instances.hpp"

namespace sensel {
namespace {

using testing::InstanceSpec;
using testing::random_problem;

TEST(TopMTest, LargestFirstTiesByLowerIndex) {
  const std::vector<double> score{1.0, 3.0, 3.0, 2.0, 3.0};
  EXPECT_EQ(top_m(score, {0, 1, 2, 3, 4}, 2), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(top_m(score, {0, 3, 4}, 2), (std::vector<std::size_t>{3, 4}));
  EXPECT_EQ(top_m(score, {0, 3}, 5), (std::vector<std::size_t>{0, 3}));
}

TEST(TopKTest, PicksLargestMeasures) {
  // One scalar state, sensors with H = 1 and variances 4, 1, 2: a = 0.25, 1, 0.5.
  PlanningProblem p;
  p.offsets = {0, 1, 2, 3};
  p.f = {Matrix::Identity(1, 1)};
  p.q = {Matrix::Identity(1, 1)};
  p.h = {{Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1)}};
  p.r = {Vector{{4.0, 1.0, 2.0}}.asDiagonal()};
  p.constraints.per_step = {2};
  p.weights = {1.0};
  p.x0 = Vector::Zero(1);
  p.p0 = Matrix::Identity(1, 1);
  EXPECT_EQ(select_topk(p, 0), (Column{false, true, true}));
  p.r[0](0, 1) = p.r[0](1, 0) = 0.1;
  EXPECT_THROW(select_topk(p, 0), Error);
}

TEST(CombinationsTest, LexicographicAndComplete) {
  const auto c = combinations(5, 2);
  ASSERT_EQ(c.size(), 10u);
  EXPECT_EQ(c.front(), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(c[1], (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(c.back(), (std::vector<std::size_t>{3, 4}));
  EXPECT_EQ(binomial(25, 2), 300.0);
  EXPECT_EQ(combinations(3, 0).size(), 1u);
}

// Independent oracle: every L×N 0/1 matrix as a bit pattern.
double BruteForceBest(const PlanningProblem& p, Objective o, SelectionSchedule* best_schedule) {
  const std::size_t L = p.sensors(), N = p.steps();
  double best = 0.0;
  bool found = false;
  for (unsigned long mask = 0; mask < (1ul << (L * N)); ++mask) {
    SelectionSchedule s(L, N);
    for (std::size_t j = 0; j < L * N; ++j) s.set(j % L, j / L, (mask >> j) & 1ul);
    if (!check_feasibility(s, p.constraints).all()) continue;
    const double v = objective_value(o, s, p);
    const int cmp = found ? compare_objective(o, v, best) : 1;
    if (cmp > 0 || (cmp == 0 && schedule_precedes(s, *best_schedule))) {
      best = v;
      *best_schedule = s;
      found = true;
    }
  }
  return best;
}

TEST(ExhaustiveTest, MatchesBitmaskOracle) {
  Rng rng(41);
  for (int trial = 0; trial < 12; ++trial) {
    InstanceSpec spec;
    spec.sensors = 3 + trial % 2;
    spec.steps = 1 + trial % 3;
    spec.correlated = trial % 2 == 1;
    spec.energy = trial % 3 == 0;
    spec.linear_rows = trial % 4 == 0 ? 1 : 0;
    const auto p = random_problem(rng, spec);
    for (Objective o : {Objective::kF1Trace, Objective::kF2Trace, Objective::kF3}) {
      SelectionSchedule oracle;
      const double v = BruteForceBest(p, o, &oracle);
      ExhaustiveResult r;
      try {
        r = exhaustive_opt(p, o);
      } catch (const Error& e) {
        ASSERT_EQ(e.code(), ErrorCode::kInfeasible);
        continue;
      }
      EXPECT_NEAR(r.value, v, 1e-10 * (1.0 + std::abs(v)));
      EXPECT_EQ(r.schedule, oracle);
    }
  }
}

TEST(ExhaustiveTest, CountsSchedulesAndEnforcesCap) {
  Rng rng(42);
  InstanceSpec spec;
  spec.sensors = 6;
  spec.steps = 2;
  auto p = random_problem(rng, spec);
  p.constraints.per_step = {2, 3};
  const auto r = exhaustive_opt(p, Objective::kF3);
  EXPECT_EQ(r.evaluated, 15u * 20u);
  try {
    exhaustive_opt(p, Objective::kF3, 100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooLarge);
  }
}

TEST(ExhaustiveTest, BudgetsPruneReuse) {
  Rng rng(43);
  InstanceSpec spec;
  spec.sensors = 4;
  spec.steps = 3;
  auto p = random_problem(rng, spec);
  p.constraints.per_step = {1, 1, 1};
  p.constraints.energy = std::vector<int>{1, 1, 1, 1};
  std::size_t visited = 0;
  enumerate_schedules(p, EnumerationOptions{false}, [&](const SelectionSchedule& s, auto, double) {
    ++visited;
    for (std::size_t i = 0; i < 4; ++i) EXPECT_LE(s.uses(i), 1u);
  });
  EXPECT_EQ(visited, 4u * 3u * 2u);
}

TEST(TopKTest, MaximizesF3UnderCountsOnly) {
  Rng rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    InstanceSpec spec;
    spec.sensors = 5;
    spec.steps = 2;
    const auto p = random_problem(rng, spec);
    const auto topk = select_topk_schedule(p);
    const auto best = exhaustive_opt(p, Objective::kF3);
    EXPECT_NEAR(objective_f3(topk, p), best.value, 1e-10 * (1.0 + best.value));
  }
}

TEST(DominanceTest, DetectsAndRejects) {
  // Scalar state: gains add, so the top-m schedule is Loewner-dominant.
  PlanningProblem p;
  p.offsets = {0, 1, 2, 3};
  p.f = {Matrix::Identity(1, 1)};
  p.q = {Matrix::Identity(1, 1)};
  p.h = {{Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1)}};
  p.r = {Vector{{4.0, 1.0, 2.0}}.asDiagonal()};
  p.constraints.per_step = {1};
  p.weights = {1.0};
  p.x0 = Vector::Zero(1);
  p.p0 = Matrix::Identity(1, 1);
  const auto dom = find_loewner_dominant(p);
  ASSERT_TRUE(dom.has_value());
  EXPECT_EQ(dom->column(0), (Column{false, true, false}));
  // Two orthogonal directions with equal information: no dominant choice.
  PlanningProblem q = p;
  q.offsets = {0, 1, 2};
  q.f = {Matrix::Identity(2, 2)};
  q.q = {Matrix::Identity(2, 2)};
  q.h = {{Matrix{{1.0, 0.0}}, Matrix{{0.0, 1.0}}}};
  q.r = {Matrix::Identity(2, 2)};
  q.x0 = Vector::Zero(2);
  q.p0 = Matrix::Identity(2, 2);
  EXPECT_FALSE(find_loewner_dominant(q).has_value());
}

}  // namespace
}  // namespace sensel
