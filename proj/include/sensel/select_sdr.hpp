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

// Selection under correlated noise. The information objective is written as
// the Boolean quadratic program
//
//   minimize  Σₙ ωₙ γₙᵀ Bₙ γₙ,   Bₙ[i][s] = -trace(Hᵢᵀ (R⁻¹)ⁱˢ Hₛ),
//
// lifted to ±1 variables τ = 2γ - 1 (plus one homogenizing entry) and
// relaxed to an SDP. Gaussian randomization around the SDP solution then
// produces feasible schedules, scored on the exact objective.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sensel/error.hpp"
#include "sensel/linalg.hpp"
#include "sensel/lp.hpp"
#include "sensel/measure.hpp"
#include "sensel/parallel.hpp"
#include "sensel/problem.hpp"
#include "sensel/rng.hpp"
#include "sensel/sdp.hpp"
#include "sensel/select_lp.hpp"
#include "sensel/select_separable.hpp"

namespace sensel {

struct BqpProblem {
  std::vector<Matrix> b;  // [n] L×L
  std::vector<double> weights;
  ConstraintSet constraints;

  std::size_t sensors() const { return b.empty() ? 0 : static_cast<std::size_t>(b.front().rows()); }
  std::size_t steps() const { return b.size(); }

  /// Block-diagonal diag(ω₁B₁, …, ω_N B_N).
  Matrix weighted() const {
    const Index L = static_cast<Index>(sensors());
    Matrix out = Matrix::Zero(L * static_cast<Index>(steps()), L * static_cast<Index>(steps()));
    for (std::size_t n = 0; n < steps(); ++n) {
      out.block(static_cast<Index>(n) * L, static_cast<Index>(n) * L, L, L) = weights[n] * b[n];
    }
    return out;
  }
};

inline BqpProblem build_bqp(const PlanningProblem& p) {
  BqpProblem q;
  q.weights = p.weights;
  q.constraints = p.constraints;
  const std::size_t L = p.sensors();
  for (std::size_t n = 0; n < p.steps(); ++n) {
    Eigen::LLT<Matrix> llt(symmetrize(p.r[n]));
    if (llt.info() != Eigen::Success || !p.r[n].allFinite()) {
      throw Error(ErrorCode::kSingularNoise, "step " + std::to_string(n + 1) + " noise covariance is singular");
    }
    const Matrix t = llt.solve(Matrix::Identity(p.r[n].rows(), p.r[n].cols()));
    const Matrix h = p.stacked_h(n);
    // trace(Hᵢᵀ Tⁱˢ Hₛ) is the sum of the (i, s) block of T ∘ (H Hᵀ).
    const Matrix k = t.cwiseProduct(h * h.transpose());
    Matrix b(static_cast<Index>(L), static_cast<Index>(L));
    for (std::size_t i = 0; i < L; ++i) {
      for (std::size_t s = 0; s < L; ++s) {
        b(static_cast<Index>(i), static_cast<Index>(s)) =
            -k.block(p.offsets[i], p.offsets[s], p.sensor_dim(i), p.sensor_dim(s)).sum();
      }
    }
    q.b.push_back(symmetrize(b));
  }
  return q;
}

inline double bqp_objective(const BqpProblem& q, const SelectionSchedule& s) {
  double total = 0.0;
  for (std::size_t n = 0; n < q.steps(); ++n) {
    Vector g(static_cast<Index>(q.sensors()));
    for (std::size_t i = 0; i < q.sensors(); ++i) g(static_cast<Index>(i)) = s.at(i, n) ? 1.0 : 0.0;
    total += q.weights[n] * g.dot(q.b[n] * g);
  }
  return total;
}

/// Selection variables that take one value on the whole box relaxation,
/// and inequality rows that are tight everywhere on it. Either one leaves
/// the SDP without a strictly feasible point.
struct Presolve {
  std::vector<int> fixed;              // per entry n·L + i: -1 when free, else the forced 0/1 value
  std::vector<LinearConstraint> rows;  // selection rows, implied-tight inequalities as equalities

  std::size_t fixed_count() const {
    return static_cast<std::size_t>(std::count_if(fixed.begin(), fixed.end(), [](int v) { return v >= 0; }));
  }
};

/// Probes the box relaxation with a few LPs. Throws Infeasible when it is empty.
inline Presolve presolve_selection(const ConstraintSet& c, std::size_t sensors, std::size_t steps) {
  constexpr double kTol = 1e-9;
  const Index d = static_cast<Index>(sensors * steps);
  Presolve out;
  out.rows = selection_rows(c, sensors, steps);
  LpProblem lp;
  lp.rows = out.rows;
  lp.upper = Vector::Ones(d);
  Vector lo = Vector::Constant(d, std::numeric_limits<double>::infinity());
  Vector hi = Vector::Constant(d, -std::numeric_limits<double>::infinity());
  std::vector<double> slack(out.rows.size(), 0.0);
  auto signed_row = [&](std::size_t k) { return out.rows[k].relation == Relation::kGreaterEqual ? 1.0 : -1.0; };
  auto probe = [&](const Vector& objective) {
    lp.objective = objective;
    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::kOptimal) {
      throw Error(ErrorCode::kInfeasible, "selection constraints admit no relaxed solution");
    }
    lo = lo.cwiseMin(sol.x);
    hi = hi.cwiseMax(sol.x);
    for (std::size_t k = 0; k < out.rows.size(); ++k) {
      if (out.rows[k].relation == Relation::kEqual) continue;
      slack[k] = std::max(slack[k], signed_row(k) * (out.rows[k].a.dot(sol.x) - out.rows[k].b));
    }
  };
  probe(Vector::Zero(d));
  Rng rng(0x5e15e1);
  for (int k = 0; k < 4; ++k) {
    const Vector g = rng.normal_vector(d);
    probe(g);
    probe(-g);
  }
  for (Index j = 0; j < d; ++j) {
    if (hi(j) - lo(j) > kTol) continue;
    probe(Vector::Unit(d, j));
    probe(-Vector::Unit(d, j));
  }
  for (std::size_t k = 0; k < out.rows.size(); ++k) {
    if (out.rows[k].relation == Relation::kEqual || slack[k] > kTol) continue;
    probe(signed_row(k) * out.rows[k].a);
  }
  out.fixed.assign(static_cast<std::size_t>(d), -1);
  for (Index j = 0; j < d; ++j) {
    if (hi(j) - lo(j) > kTol) continue;
    if (std::abs(lo(j)) <= kTol) out.fixed[static_cast<std::size_t>(j)] = 0;
    if (std::abs(lo(j) - 1.0) <= kTol) out.fixed[static_cast<std::size_t>(j)] = 1;
  }
  for (std::size_t k = 0; k < out.rows.size(); ++k) {
    if (out.rows[k].relation != Relation::kEqual && slack[k] <= kTol) out.rows[k].relation = Relation::kEqual;
  }
  return out;
}

/// SDP in the free variables only. At a rank-one X̂ = [τ; 1][τ; 1]ᵀ the
/// value <C, X̂> + offset is four times the BQP objective, where fixed
/// entries enter through a linear term. A row aᵀγ ⋈ b becomes
/// <[[diag(a), a], [aᵀ, 0]], X̂> ⋈ 4b' - aᵀ1 over the free part of a, with
/// b' the rhs after substituting the fixed entries; every diagonal entry is 1.
struct ReducedSdp {
  SdpProblem sdp;
  double offset = 0.0;
  Matrix embed;  // (NL+1)×(free+1): full [τ; 1] = embed · [τ_free; 1]
};

inline ReducedSdp build_reduced_sdp(const BqpProblem& q, const std::vector<LinearConstraint>& rows,
                                    const std::vector<int>& fixed) {
  const Matrix bw = q.weighted();
  const Index d = bw.rows();
  std::vector<Index> free, held;
  Vector g_held(d);
  for (Index j = 0; j < d; ++j) {
    const int v = fixed.empty() ? -1 : fixed[static_cast<std::size_t>(j)];
    if (v < 0) {
      free.push_back(j);
    } else {
      g_held(static_cast<Index>(held.size())) = v;
      held.push_back(j);
    }
  }
  const Index f = static_cast<Index>(free.size());
  const Vector g = g_held.head(static_cast<Index>(held.size()));
  const Matrix qf = bw(free, free);
  const Vector lin = bw(free, held) * g;
  const Vector col = qf * Vector::Ones(f) + 2.0 * lin;

  ReducedSdp out;
  out.offset = qf.sum() + 4.0 * lin.sum() + 4.0 * g.dot(bw(held, held) * g);
  out.embed = Matrix::Zero(d + 1, f + 1);
  for (Index k = 0; k < f; ++k) out.embed(free[static_cast<std::size_t>(k)], k) = 1.0;
  for (std::size_t k = 0; k < held.size(); ++k) out.embed(held[k], f) = 2.0 * g(static_cast<Index>(k)) - 1.0;
  out.embed(d, f) = 1.0;

  SdpProblem& sdp = out.sdp;
  sdp.c = Matrix::Zero(f + 1, f + 1);
  sdp.c.topLeftCorner(f, f) = qf;
  sdp.c.col(f).head(f) = col;
  sdp.c.row(f).head(f) = col.transpose();
  for (const auto& row : rows) {
    const Vector a = row.a(free);
    if ((a.array() == 0.0).all()) continue;
    SdpConstraint c;
    for (Index j = 0; j < f; ++j) {
      if (a(j) == 0.0) continue;
      c.a.push_back({j, j, a(j)});
      c.a.push_back({j, f, a(j)});
      c.a.push_back({f, j, a(j)});
    }
    c.relation = row.relation;
    c.b = 4.0 * (row.b - row.a(held).dot(g)) - a.sum();
    sdp.rows.push_back(std::move(c));
  }
  for (Index j = 0; j <= f; ++j) sdp.rows.push_back({{{j, j, 1.0}}, Relation::kEqual, 1.0});
  return out;
}

/// The relaxation with no variable fixed; its offset is 1ᵀB1.
inline SdpProblem build_sdp(const BqpProblem& q) {
  return build_reduced_sdp(q, selection_rows(q.constraints, q.sensors(), q.steps()), {}).sdp;
}

struct SdpRelaxation {
  BqpProblem bqp;
  SdpSolution solution;  // x is full size NL+1; y and z belong to the reduced problem
  double offset = 0.0;
  std::size_t fixed_variables = 0;

  /// Lower bound on the BQP optimum in BQP units.
  double bqp_lower_bound() const { return (solution.primal_objective + offset) / 4.0; }
  double bqp_dual_bound() const { return (solution.dual_objective + offset) / 4.0; }
};

inline SdpRelaxation solve_relaxation(const PlanningProblem& p, const SdpOptions& opt = {}) {
  const Presolve pre = presolve_selection(p.constraints, p.sensors(), p.steps());
  SdpRelaxation out;
  out.bqp = build_bqp(p);
  const ReducedSdp reduced = build_reduced_sdp(out.bqp, pre.rows, pre.fixed);
  out.offset = reduced.offset;
  out.fixed_variables = pre.fixed_count();
  if (reduced.embed.cols() == 1) {
    out.solution.x = Matrix::Ones(1, 1);
    out.solution.z = Matrix::Zero(1, 1);
    out.solution.status = SdpStatus::kOptimal;
  } else {
    out.solution = solve_sdp(reduced.sdp, opt);
  }
  if (out.solution.status == SdpStatus::kInfeasible) {
    throw Error(ErrorCode::kInfeasible, "SDP relaxation reported infeasible");
  }
  out.solution.x = symmetrize(reduced.embed * out.solution.x * reduced.embed.transpose());
  return out;
}

struct RandomizationResult {
  SelectionSchedule schedule;
  double objective = 0.0;
  std::size_t samples = 0;
  std::size_t feasible_candidates = 0;
  std::size_t best_sample = 0;
};

/// Draws S samples ξ ~ N(0, X) and turns ±ξ into schedules by budgeted
/// per-step top-m rounding on the γ-part of ξ·sign(ξ_last). Sample s uses
/// the stream derive_seed(seed, s), so a larger S only adds candidates.
inline RandomizationResult randomize_round(const Matrix& x, const PlanningProblem& p, std::size_t samples,
                                           std::uint64_t seed, Objective objective,
                                           std::size_t threads = 1) {
  const Index d = static_cast<Index>(p.sensors() * p.steps());
  const Matrix factor = sampling_factor(x);
  struct Candidate {
    bool valid = false;
    SelectionSchedule schedule;
    double value = 0.0;
  };
  std::vector<Candidate> cands(2 * samples);
  parallel_for(samples, threads, [&](std::size_t s) {
    Rng rng(derive_seed(seed, s));
    const Vector xi = factor * rng.normal_vector(factor.cols());
    const double orient = xi(d) < 0.0 ? -1.0 : 1.0;
    for (int sign = 0; sign < 2; ++sign) {
      Candidate& c = cands[2 * s + static_cast<std::size_t>(sign)];
      const Vector score = (sign == 0 ? orient : -orient) * xi.head(d);
      try {
        c.schedule = round_scores(score, p);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kRoundingInfeasible) throw;
        continue;
      }
      if (!check_feasibility(c.schedule, p.constraints).all()) continue;
      c.value = objective_value(objective, c.schedule, p);
      c.valid = true;
    }
  });
  RandomizationResult out;
  out.samples = samples;
  bool found = false;
  for (std::size_t k = 0; k < cands.size(); ++k) {
    const Candidate& c = cands[k];
    if (!c.valid) continue;
    ++out.feasible_candidates;
    const int cmp = found ? compare_objective(objective, c.value, out.objective) : 1;
    if (cmp > 0 || (cmp == 0 && schedule_precedes(c.schedule, out.schedule))) {
      out.schedule = c.schedule;
      out.objective = c.value;
      out.best_sample = k / 2;
      found = true;
    }
  }
  if (!found) throw Error(ErrorCode::kRoundingInfeasible, "no randomized sample produced a feasible schedule");
  return out;
}

struct SdrOptions {
  std::size_t samples = 100;
  std::uint64_t seed = 0;
  Objective objective = Objective::kF3;
  std::size_t threads = 1;
  SdpOptions sdp;
};

struct SdrSelection {
  SdpRelaxation relaxation;
  RandomizationResult rounding;
};

inline SdrSelection select_sdr(const PlanningProblem& p, const SdrOptions& opt = {}) {
  SdrSelection out;
  out.relaxation = solve_relaxation(p, opt.sdp);
  if (out.relaxation.solution.status != SdpStatus::kOptimal) {
    throw Error(ErrorCode::kNotConverged, "SDP solver stopped after " +
                                              std::to_string(out.relaxation.solution.iterations) +
                                              " iterations without converging");
  }
  out.rounding = randomize_round(out.relaxation.solution.x, p, opt.samples, opt.seed, opt.objective, opt.threads);
  return out;
}

/// Baseline that drops cross-sensor correlation and plans as if the noise
/// were uncorrelated: top-m per step when only counts apply, else the LP
/// route.
inline SelectionSchedule select_ignore_dependence(const PlanningProblem& p) {
  const PlanningProblem stripped = without_dependence(p);
  if (!stripped.constraints.energy && stripped.constraints.linear.empty()) return select_topk_schedule(stripped);
  return select_lp(stripped).rounded.schedule;
}

}  // namespace sensel
