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

// State estimation under sensor selection.
//
// The stacked measurement keeps a row for every sensor; unselected sensors
// contribute zero rows to H̃ and zero rows/columns to R̃ (R̃^{ij} = γⁱγʲR^{ij}).
// R̃ is singular whenever a sensor is left out, so the Kalman gain uses the
// Moore-Penrose inverse and the information form uses R̃⁺:
//
//   P⁺ = (P⁻¹ + H̃ᵀR̃⁺H̃)⁻¹,   x⁺ = P⁺ (P⁻¹x + H̃ᵀR̃⁺z).
//
// R̃⁺ is computed by compressing to the selected rows, inverting that
// (positive definite) block and re-embedding it.

#pragma once

#include <cstddef>
#include <vector>

#include "sensel/error.hpp"
#include "sensel/linalg.hpp"
#include "sensel/model.hpp"
#include "sensel/problem.hpp"

namespace sensel {

struct FilterState {
  Vector x;
  Matrix p;
};

struct StackedMeasurement {
  Vector z;
  Matrix h_tilde;
  Matrix r_tilde;
  std::vector<bool> active;  // per stacked row: belongs to a selected sensor
};

inline std::vector<bool> active_rows(const Column& gamma, const std::vector<Index>& offsets) {
  std::vector<bool> rows(static_cast<std::size_t>(offsets.back()), false);
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    if (!gamma[i]) continue;
    for (Index k = offsets[i]; k < offsets[i + 1]; ++k) rows[static_cast<std::size_t>(k)] = true;
  }
  return rows;
}

inline std::vector<Index> true_indices(const std::vector<bool>& mask) {
  std::vector<Index> idx;
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (mask[k]) idx.push_back(static_cast<Index>(k));
  }
  return idx;
}

/// Masks a full measurement y (all sensors) into z, H̃ and R̃ for one step.
inline StackedMeasurement stack_measurement(const std::vector<Matrix>& h, const Matrix& r_full,
                                            const std::vector<Index>& offsets, const Column& gamma,
                                            const Vector& y_full) {
  StackedMeasurement m;
  m.active = active_rows(gamma, offsets);
  const Index rows = offsets.back();
  Vector mask(rows);
  for (Index k = 0; k < rows; ++k) mask(k) = m.active[static_cast<std::size_t>(k)] ? 1.0 : 0.0;
  Matrix hs(rows, h.front().cols());
  for (std::size_t i = 0; i < h.size(); ++i) hs.middleRows(offsets[i], offsets[i + 1] - offsets[i]) = h[i];
  m.h_tilde = mask.asDiagonal() * hs;
  m.r_tilde = mask.asDiagonal() * r_full * mask.asDiagonal();
  m.z = mask.cwiseProduct(y_full);
  return m;
}

inline StackedMeasurement stack_measurement(const PlanningProblem& p, std::size_t n,
                                            const Column& gamma, const Vector& y_full) {
  return stack_measurement(p.h[n], p.r[n], p.offsets, gamma, y_full);
}

/// R̃⁺ by compression: invert the selected principal block, zero elsewhere.
inline Matrix masked_pinv(const Matrix& r_tilde, const std::vector<bool>& active) {
  const auto idx = true_indices(active);
  Matrix out = Matrix::Zero(r_tilde.rows(), r_tilde.cols());
  if (idx.empty()) return out;
  const Matrix sub = r_tilde(idx, idx);
  Eigen::LLT<Matrix> llt(symmetrize(sub));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularBlock, "noise covariance of the selected sensors is singular");
  }
  out(idx, idx) = symmetrize(llt.solve(Matrix::Identity(sub.rows(), sub.cols())));
  return out;
}

/// Generalized information gain H̃ᵀR̃⁺H̃ for column `gamma` at step n,
/// computed on the selected rows only.
inline Matrix selected_gain(const PlanningProblem& p, std::size_t n, const Column& gamma) {
  const auto idx = true_indices(active_rows(gamma, p.offsets));
  const Index r = p.state_dim();
  if (idx.empty()) return Matrix::Zero(r, r);
  Matrix hs(static_cast<Index>(idx.size()), r);
  Index row = 0;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    if (!gamma[i]) continue;
    hs.middleRows(row, p.sensor_dim(i)) = p.h[n][i];
    row += p.sensor_dim(i);
  }
  const Matrix rs = p.r[n](idx, idx);
  Eigen::LLT<Matrix> llt(symmetrize(rs));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularBlock, "noise covariance of the selected sensors is singular");
  }
  return symmetrize(hs.transpose() * llt.solve(hs));
}

inline FilterState predict(const FilterState& s, const Matrix& f, const Matrix& q) {
  return {f * s.x, symmetrize(f * s.p * f.transpose() + q)};
}

inline FilterState predict(const FilterState& s, const DynamicSystem& sys, std::size_t step) {
  return predict(s, sys.transition(step), sys.process_noise(step));
}

/// Covariance form with gain K = P H̃ᵀ (H̃ P H̃ᵀ + R̃)⁺.
inline FilterState update_kalman(const FilterState& pred, const StackedMeasurement& m) {
  const Matrix pht = pred.p * m.h_tilde.transpose();
  const Matrix s = symmetrize(m.h_tilde * pht + m.r_tilde);
  const Matrix k = pht * pinv(s);
  const Index r = pred.p.rows();
  FilterState out;
  out.x = pred.x + k * (m.z - m.h_tilde * pred.x);
  out.p = symmetrize((Matrix::Identity(r, r) - k * m.h_tilde) * pred.p);
  return out;
}

/// Generalized information filter.
inline FilterState update_gif(const FilterState& pred, const StackedMeasurement& m) {
  const Matrix rp = masked_pinv(m.r_tilde, m.active);
  const Matrix p_inv = inverse_spd(pred.p);
  const Matrix info = symmetrize(p_inv + m.h_tilde.transpose() * rp * m.h_tilde);
  FilterState out;
  out.p = inverse_spd(info);
  out.x = out.p * (p_inv * pred.x + m.h_tilde.transpose() * (rp * m.z));
  return out;
}

/// Posterior covariance after a predict/update with information gain `gain`.
inline Matrix posterior_covariance(const Matrix& p_pred, const Matrix& gain) {
  if (gain.isZero(0.0)) return p_pred;
  return inverse_spd(symmetrize(inverse_spd(p_pred) + gain));
}

/// P_{k+n|k+n} for n = 1..N under `schedule`; needs no measurement values.
inline std::vector<Matrix> covariance_rollout(const Matrix& p0, const PlanningProblem& p,
                                              const SelectionSchedule& schedule) {
  std::vector<Matrix> out;
  Matrix cur = p0;
  for (std::size_t n = 0; n < p.steps(); ++n) {
    const Matrix pred = symmetrize(p.f[n] * cur * p.f[n].transpose() + p.q[n]);
    cur = posterior_covariance(pred, selected_gain(p, n, schedule.column(n)));
    out.push_back(cur);
  }
  return out;
}

}  // namespace sensel
