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

// Builders for the bundled study scenarios (scenarios/example1..7.json).
// Scenario k uses seed k unless another seed is passed.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sensel/error.hpp"
#include "sensel/linalg.hpp"
#include "sensel/model.hpp"

namespace sensel {

inline constexpr double kJammerPowers[] = {1e5, 3e5, 6e5, 10e5, 12e5, 15e5, 20e5};

/// Initial tracking covariance shared by the tracking scenarios.
inline Matrix tracking_initial_covariance() { return Vector{{10.0, 1.0, 10.0, 1.0}}.asDiagonal(); }

inline ScenarioTemplate tracking_template(const std::string& name, std::size_t steps, int per_step,
                                          std::optional<int> budget) {
  ScenarioTemplate t;
  t.name = name;
  t.system = tracking_system(1.0);
  t.h = position_measurement();
  t.constraints.per_step.assign(steps, per_step);
  if (budget) t.constraints.energy = std::vector<int>{*budget};
  t.weights.assign(steps, 1.0 / static_cast<double>(steps));
  t.x0 = Vector::Zero(4);
  t.p0 = tracking_initial_covariance();
  return t;
}

/// 40 sensors i.i.d. uniform over a 100 m square, static 2-D state,
/// r₁ ∈ [5, 7], r₂ ∈ [10, 12], choose `m` for the next step.
inline Scenario example1(std::uint64_t seed = 1, int m = 10) {
  ScenarioTemplate t;
  t.name = "example1";
  t.system.state_dim = 2;
  t.system.f = {Matrix::Identity(2, 2)};
  t.system.q = {Vector{{5.0, 10.0}}.asDiagonal()};
  t.h = Matrix::Identity(2, 2);
  t.constraints.per_step = {m};
  t.weights = {1.0};
  t.x0 = Vector::Zero(2);
  t.p0 = 10.0 * Matrix::Identity(2, 2);
  return gen_uniform_scenario(40, 100.0, {{{5.0, 7.0}, {10.0, 12.0}}}, seed, t);
}

/// 3×3 tracking grid, N = 3, two sensors per step, each at most twice.
inline Scenario example2(std::uint64_t seed = 2) {
  return gen_grid_scenario(3, 100.0, {{{5.0, 10.0}, {5.0, 10.0}}}, seed, tracking_template("example2", 3, 2, 2));
}

/// grid×grid tracking sensors (20×20 in the study), N = 5, m per step,
/// each sensor at most twice.
inline Scenario example3(std::uint64_t seed = 3, std::size_t grid = 20, int m = 10) {
  return gen_grid_scenario(grid, 100.0, {{{5.0, 10.0}, {5.0, 10.0}}}, seed,
                           tracking_template("example3", 5, m, 2));
}

/// 5×5 grid with Rⁱ = 10·I₂ and a jammer at (550, 200) with α = 1, n = 2,
/// R⁰ = I₂.
inline Scenario jammer_scenario(const std::string& name, std::uint64_t seed, std::size_t steps,
                                std::optional<int> budget, double power) {
  Scenario s = gen_grid_scenario(5, 100.0, {{{10.0, 10.0}, {10.0, 10.0}}}, seed,
                                 tracking_template(name, steps, 2, budget));
  return apply_jammer(std::move(s), power, 1.0, 2.0, Position(550.0, 200.0), Matrix::Identity(2, 2));
}

/// Jammer grid, next step only, two sensors.
inline Scenario example4(std::uint64_t seed = 4, double power = 1e6) {
  return jammer_scenario("example4", seed, 1, std::nullopt, power);
}

/// Jammer grid, N = 5, two sensors per step, each at most twice.
inline Scenario example5(std::uint64_t seed = 5, double power = 1e6) {
  return jammer_scenario("example5", seed, 5, 2, power);
}

/// Example 5 geometry at P₀ = 1.5·10⁶ where the natural noise is only the
/// distance term α₁·dᵢₙ·I₂ (α₁ = 0.05), with a target starting at
/// (600 m, -20 m/s, 200 m, 0 m/s).
inline Scenario distance_scenario(const std::string& name, std::uint64_t seed) {
  Scenario s = jammer_scenario(name, seed, 5, 2, 1.5e6);
  for (auto& r : s.noise.r_base) r.setZero();
  s.noise.distance = DistanceNoise{0.05};
  refresh_noise(s.noise, s.sensors);
  s.x0 = Vector{{600.0, -20.0, 200.0, 0.0}};
  return s;
}

inline Scenario example6(std::uint64_t seed = 6) { return distance_scenario("example6", seed); }

/// The RMSE study scenario; same model as example6.
inline Scenario example7(std::uint64_t seed = 7) { return distance_scenario("example7", seed); }

inline Scenario example_scenario(int id) {
  switch (id) {
    case 1: return example1();
    case 2: return example2();
    case 3: return example3();
    case 4: return example4();
    case 5: return example5();
    case 6: return example6();
    case 7: return example7();
    default: break;
  }
  throw Error(ErrorCode::kInvalidScenario, "no bundled example " + std::to_string(id) + " (valid: 1-7)");
}

}  // namespace sensel
