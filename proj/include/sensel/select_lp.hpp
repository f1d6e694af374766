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

// Selection for uncorrelated noise under temporally coupled constraints:
// maximize trace(Γ Dᵀ) over the box relaxation 0 ≤ γ ≤ 1, round the
// fractional solution step by step in decreasing weight order, and report
// the certified gap g = f*_LP − f̂_BLP.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "sensel/error.hpp"
#include "sensel/lp.hpp"
#include "sensel/measure.hpp"
#include "sensel/problem.hpp"
#include "sensel/select_separable.hpp"

namespace sensel {

/// Per-step equality rows, then one energy row per sensor, then the extra
/// linear rows, over γ with entry n·L + i.
inline std::vector<LinearConstraint> selection_rows(const ConstraintSet& c, std::size_t sensors,
                                                    std::size_t steps) {
  const Index dim = static_cast<Index>(sensors * steps);
  std::vector<LinearConstraint> rows;
  for (std::size_t n = 0; n < steps; ++n) {
    LinearConstraint row{Vector::Zero(dim), Relation::kEqual, static_cast<double>(c.per_step[n])};
    row.a.segment(static_cast<Index>(n * sensors), static_cast<Index>(sensors)).setOnes();
    rows.push_back(std::move(row));
  }
  if (c.energy) {
    for (std::size_t i = 0; i < sensors; ++i) {
      LinearConstraint row{Vector::Zero(dim), Relation::kLessEqual, static_cast<double>((*c.energy)[i])};
      for (std::size_t n = 0; n < steps; ++n) row.a(static_cast<Index>(n * sensors + i)) = 1.0;
      rows.push_back(std::move(row));
    }
  }
  rows.insert(rows.end(), c.linear.begin(), c.linear.end());
  return rows;
}

inline LpProblem build_lp(const PlanningProblem& p) {
  const Matrix d = info_table(p);  // throws NotSeparableNoise
  LpProblem lp;
  lp.objective = d.reshaped();     // column-major: entry n·L + i
  lp.rows = selection_rows(p.constraints, p.sensors(), p.steps());
  lp.upper = Vector::Ones(lp.objective.size());
  return lp;
}

struct RoundedSelection {
  SelectionSchedule schedule;
  double f_lp = 0.0;
  double f_blp_hat = 0.0;
  double gap = 0.0;
};

/// Steps by decreasing weight; equal weights put the later step first.
inline std::vector<std::size_t> rounding_order(const std::vector<double>& weights) {
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (weights[a] != weights[b]) return weights[a] > weights[b];
    return a > b;
  });
  return order;
}

/// Budgeted step-wise top-m rounding of per-entry scores laid out like γ.
/// Candidates at each step are the sensors with budget left.
inline SelectionSchedule round_scores(const Vector& scores, const PlanningProblem& p) {
  const std::size_t L = p.sensors();
  const std::size_t N = p.steps();
  std::vector<int> budget = p.constraints.energy ? *p.constraints.energy : std::vector<int>(L, static_cast<int>(N));
  SelectionSchedule s(L, N);
  for (std::size_t n : rounding_order(p.weights)) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < L; ++i) {
      if (budget[i] > 0) candidates.push_back(i);
    }
    const auto m = static_cast<std::size_t>(p.constraints.per_step[n]);
    if (candidates.size() < m) {
      throw Error(ErrorCode::kRoundingInfeasible,
                  "step " + std::to_string(n + 1) + " has fewer candidates than its count");
    }
    std::span<const double> step_scores(scores.data() + n * L, L);
    for (std::size_t i : top_m(step_scores, candidates, m)) {
      s.set(i, n, true);
      --budget[i];
    }
  }
  return s;
}

inline double blp_objective(const Matrix& d, const SelectionSchedule& s) {
  return d.reshaped().dot(s.stacked());
}

inline RoundedSelection round_energy(const LpSolution& lp, const PlanningProblem& p) {
  if (lp.status != LpStatus::kOptimal) throw Error(ErrorCode::kInfeasible, "LP relaxation is infeasible");
  const Matrix d = info_table(p);
  RoundedSelection out;
  out.schedule = round_scores(lp.x, p);
  out.f_lp = lp.objective;
  out.f_blp_hat = blp_objective(d, out.schedule);
  out.gap = out.f_lp - out.f_blp_hat;
  return out;
}

struct Certificate {
  double f_lp = 0.0;
  double f_blp_hat = 0.0;
  double gap = 0.0;
  double relative_gap = 0.0;
  bool optimal = false;  // gap within 1e-9: the rounded schedule is BLP-optimal
  FeasibilityReport feasibility;
};

inline Certificate certify(const RoundedSelection& r, const PlanningProblem& p) {
  Certificate c;
  c.f_lp = r.f_lp;
  c.f_blp_hat = r.f_blp_hat;
  c.gap = r.gap;
  c.relative_gap = r.gap / std::max(std::abs(r.f_lp), 1e-300);
  const double tol = 1e-8 * (1.0 + std::abs(r.f_lp));
  if (r.gap < -tol) {
    throw Error(ErrorCode::kInternal, "negative gap " + std::to_string(r.gap) + ": rounding beat the LP bound");
  }
  c.optimal = r.gap <= 1e-9 * (1.0 + std::abs(r.f_lp));
  c.feasibility = check_feasibility(r.schedule, p.constraints);
  return c;
}

struct LpSelection {
  LpSolution relaxation;
  RoundedSelection rounded;
  Certificate certificate;
};

inline LpSelection select_lp(const PlanningProblem& p, const LpOptions& opt = {}) {
  LpSelection out;
  out.relaxation = solve_lp(build_lp(p), opt);
  if (out.relaxation.status != LpStatus::kOptimal) {
    throw Error(ErrorCode::kInfeasible, "LP relaxation is infeasible");
  }
  out.rounded = round_energy(out.relaxation, p);
  out.certificate = certify(out.rounded, p);
  return out;
}

}  // namespace sensel
