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

// Information measures and the selection objectives
//   f1 = P_{k+N|k+N},  f2 = (1/N) Σ P_{k+n|k+n},  f3 = Σ ωₙ trace(H̃ᵀR̃⁺H̃).

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "sensel/error.hpp"
#include "sensel/filter.hpp"
#include "sensel/linalg.hpp"
#include "sensel/problem.hpp"

namespace sensel {

/// aⁱ = trace(Hᵀ R⁻¹ H) for one sensor.
inline double sensor_measure(const Matrix& h, const Matrix& r_block) {
  Eigen::LLT<Matrix> llt(symmetrize(r_block));
  if (llt.info() != Eigen::Success || !r_block.allFinite()) {
    throw Error(ErrorCode::kSingularBlock, "sensor noise block is not positive definite");
  }
  return (h.transpose() * llt.solve(h)).trace();
}

/// trace(H̃ᵀR̃⁺H̃). Rows with a zero diagonal in R̃ belong to unselected
/// sensors and are compressed away before inverting.
inline double gain_trace(const Matrix& h_tilde, const Matrix& r_tilde) {
  std::vector<bool> active(static_cast<std::size_t>(r_tilde.rows()));
  for (Index k = 0; k < r_tilde.rows(); ++k) active[static_cast<std::size_t>(k)] = r_tilde(k, k) > 0.0;
  Matrix rp;
  try {
    rp = masked_pinv(r_tilde, active);
  } catch (const Error&) {
    rp = pinv(r_tilde);
  }
  return (h_tilde.transpose() * rp * h_tilde).trace();
}

inline double selected_gain_trace(const PlanningProblem& p, std::size_t n, const Column& gamma) {
  return selected_gain(p, n, gamma).trace();
}

/// Table D with d_{in} = ωₙ·aⁱ_{k+n}; defined for uncorrelated noise only.
inline Matrix info_table(const PlanningProblem& p) {
  if (!p.separable_noise()) {
    throw Error(ErrorCode::kNotSeparableNoise, "measurement noise is correlated across sensors");
  }
  Matrix d(static_cast<Index>(p.sensors()), static_cast<Index>(p.steps()));
  for (std::size_t n = 0; n < p.steps(); ++n) {
    for (std::size_t i = 0; i < p.sensors(); ++i) {
      d(static_cast<Index>(i), static_cast<Index>(n)) =
          p.weights[n] * sensor_measure(p.h[n][i], p.sensor_noise(n, i));
    }
  }
  return d;
}

inline Matrix objective_f1(const SelectionSchedule& s, const PlanningProblem& p) {
  return covariance_rollout(p.p0, p, s).back();
}

inline Matrix objective_f2(const SelectionSchedule& s, const PlanningProblem& p) {
  const auto traj = covariance_rollout(p.p0, p, s);
  Matrix sum = Matrix::Zero(p.state_dim(), p.state_dim());
  for (const auto& m : traj) sum += m;
  return sum / static_cast<double>(traj.size());
}

inline double objective_f3(const SelectionSchedule& s, const PlanningProblem& p) {
  double total = 0.0;
  for (std::size_t n = 0; n < p.steps(); ++n) {
    if (p.weights[n] == 0.0) continue;
    total += p.weights[n] * selected_gain_trace(p, n, s.column(n));
  }
  return total;
}

/// log det of the generalized information gain; only defined when the gain
/// is positive definite.
inline std::optional<double> log_det_gain(const Matrix& gain) {
  Eigen::LLT<Matrix> llt(symmetrize(gain));
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Matrix l = llt.matrixL();
  return 2.0 * l.diagonal().array().log().sum();
}

enum class Objective { kF1Trace, kF2Trace, kF3 };

inline constexpr bool maximizes(Objective o) { return o == Objective::kF3; }

inline std::string_view to_string(Objective o) {
  switch (o) {
    case Objective::kF1Trace: return "f1";
    case Objective::kF2Trace: return "f2";
    case Objective::kF3: return "f3";
  }
  return "?";
}

inline double objective_value(Objective o, const SelectionSchedule& s, const PlanningProblem& p) {
  switch (o) {
    case Objective::kF1Trace: return objective_f1(s, p).trace();
    case Objective::kF2Trace: return objective_f2(s, p).trace();
    case Objective::kF3: return objective_f3(s, p);
  }
  return 0.0;
}

/// +1 when `candidate` beats `incumbent` under `o`, 0 on a tie (within
/// 1e-12 relative), -1 otherwise.
inline int compare_objective(Objective o, double candidate, double incumbent) {
  const double tol = 1e-12 * (1.0 + std::abs(candidate) + std::abs(incumbent));
  if (std::abs(candidate - incumbent) <= tol) return 0;
  const bool better = maximizes(o) ? candidate > incumbent : candidate < incumbent;
  return better ? 1 : -1;
}

}  // namespace sensel
