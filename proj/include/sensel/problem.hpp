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

#pragma once

#include <cstddef>
#include <vector>

#include "sensel/linalg.hpp"
#include "sensel/model.hpp"

namespace sensel {

/// One planning window k+1 … k+N with every per-step quantity resolved:
/// the form consumed by the filters, measures and selection algorithms.
struct PlanningProblem {
  std::vector<Matrix> f;               // [n] transition into step n
  std::vector<Matrix> q;               // [n]
  std::vector<std::vector<Matrix>> h;  // [n][i]
  std::vector<Matrix> r;               // [n] joint noise covariance
  std::vector<Index> offsets;          // row offset of sensor i; back() = total rows
  ConstraintSet constraints;
  std::vector<double> weights;
  Vector x0;  // estimate x_{k|k}
  Matrix p0;  // covariance P_{k|k}

  std::size_t sensors() const { return offsets.size() - 1; }
  std::size_t steps() const { return r.size(); }
  Index state_dim() const { return p0.rows(); }
  Index sensor_dim(std::size_t i) const { return offsets[i + 1] - offsets[i]; }

  Matrix stacked_h(std::size_t n) const {
    Matrix out(offsets.back(), state_dim());
    for (std::size_t i = 0; i < sensors(); ++i) out.middleRows(offsets[i], sensor_dim(i)) = h[n][i];
    return out;
  }

  Matrix sensor_noise(std::size_t n, std::size_t i) const {
    return r[n].block(offsets[i], offsets[i], sensor_dim(i), sensor_dim(i));
  }

  bool separable_noise() const {
    for (const auto& rn : r) {
      if (!is_block_diagonal(rn, offsets)) return false;
    }
    return true;
  }
};

/// x_{k+n|k} for n = 1..N from the estimate x.
inline std::vector<Vector> predicted_states(const Scenario& s, const Vector& x) {
  std::vector<Vector> out;
  Vector cur = x;
  for (std::size_t n = 0; n < s.horizon(); ++n) {
    cur = s.system.transition(n) * cur;
    out.push_back(cur);
  }
  return out;
}

/// Resolve a scenario into a planning problem at estimate (x, P). State-
/// dependent noise is evaluated at the predicted states x_{k+n|k}.
inline PlanningProblem make_problem(const Scenario& s, const Vector& x, const Matrix& p) {
  PlanningProblem prob;
  const std::size_t N = s.horizon();
  prob.offsets = sensor_offsets(s.sensors);
  prob.constraints = s.constraints;
  prob.weights = s.weights;
  prob.x0 = x;
  prob.p0 = p;
  for (std::size_t n = 0; n < N; ++n) {
    prob.f.push_back(s.system.transition(n));
    prob.q.push_back(s.system.process_noise(n));
    std::vector<Matrix> hn;
    for (const auto& sensor : s.sensors) hn.push_back(sensor.measurement(n));
    prob.h.push_back(std::move(hn));
  }
  if (s.noise.distance) {
    prob.r = distance_noise(s, predicted_states(s, x), s.noise.distance->alpha1);
  } else {
    for (std::size_t n = 0; n < N; ++n) prob.r.push_back(s.noise.covariance(n));
  }
  return prob;
}

inline PlanningProblem make_problem(const Scenario& s) { return make_problem(s, s.x0, s.p0); }

/// Same problem with all cross-sensor noise blocks removed.
inline PlanningProblem without_dependence(PlanningProblem p) {
  for (auto& rn : p.r) rn = strip_cross_blocks(rn, p.offsets);
  return p;
}

}  // namespace sensel
