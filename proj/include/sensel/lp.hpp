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

// Dense bounded-variable primal simplex (two phases) for
//
//   maximize cᵀx  subject to  aₚᵀx ⊵ bₚ,  0 ≤ x ≤ u.
//
// Nonbasic variables sit at either bound, so box constraints never become
// rows. Entering variables are chosen by largest reduced cost; after a run
// of degenerate pivots the solver switches to Bland's rule (smallest index
// for entering and leaving) until the objective moves again.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "sensel/error.hpp"
#include "sensel/linalg.hpp"
#include "sensel/model.hpp"

namespace sensel {

struct LpProblem {
  Vector objective;                      // maximized
  std::vector<LinearConstraint> rows;
  Vector upper;                          // per-variable upper bound (may be +inf)
};

enum class LpStatus { kOptimal, kInfeasible };

struct LpSolution {
  Vector x;
  double objective = 0.0;
  LpStatus status = LpStatus::kOptimal;
  std::size_t iterations = 0;
};

struct LpOptions {
  double tol = 1e-9;
  std::size_t max_iterations = 200000;
  std::size_t degenerate_switch = 50;
};

namespace detail {

class BoundedSimplex {
 public:
  BoundedSimplex(const LpProblem& lp, const LpOptions& opt) : opt_(opt) {
    n_orig_ = static_cast<Index>(lp.objective.size());
    m_ = static_cast<Index>(lp.rows.size());
    Index n_slack = 0;
    for (const auto& r : lp.rows) n_slack += r.relation == Relation::kEqual ? 0 : 1;
    // Rows are normalized to b ≥ 0; a row whose slack ends up with +1 starts
    // with that slack basic, every other row gets an artificial.
    std::vector<double> sign(static_cast<std::size_t>(m_), 1.0);
    std::vector<bool> needs_art(static_cast<std::size_t>(m_), true);
    for (Index p = 0; p < m_; ++p) {
      const auto& r = lp.rows[static_cast<std::size_t>(p)];
      if (r.a.size() != n_orig_) throw Error(ErrorCode::kInvalidMatrix, "LP row has wrong length");
      sign[static_cast<std::size_t>(p)] = r.b < 0.0 ? -1.0 : 1.0;
      const double slack_coef = r.relation == Relation::kLessEqual ? 1.0 : -1.0;
      needs_art[static_cast<std::size_t>(p)] =
          r.relation == Relation::kEqual || slack_coef * sign[static_cast<std::size_t>(p)] < 0.0;
    }
    Index n_art = 0;
    for (bool v : needs_art) n_art += v ? 1 : 0;
    n_slack_ = n_slack;
    ncol_ = n_orig_ + n_slack + n_art;
    a_ = Matrix::Zero(m_, ncol_);
    rhs_ = Vector::Zero(m_);
    upper_ = Vector::Constant(ncol_, std::numeric_limits<double>::infinity());
    upper_.head(n_orig_) = lp.upper;
    basis_.assign(static_cast<std::size_t>(m_), -1);
    Index slack_col = n_orig_;
    Index art_col = n_orig_ + n_slack;
    art_begin_ = art_col;
    for (Index p = 0; p < m_; ++p) {
      const auto& r = lp.rows[static_cast<std::size_t>(p)];
      const double s = sign[static_cast<std::size_t>(p)];
      a_.row(p).head(n_orig_) = s * r.a.transpose();
      rhs_(p) = s * r.b;
      if (r.relation != Relation::kEqual) {
        const double coef = (r.relation == Relation::kLessEqual ? 1.0 : -1.0) * s;
        a_(p, slack_col) = coef;
        if (coef > 0.0) basis_[static_cast<std::size_t>(p)] = slack_col;
        ++slack_col;
      }
      if (needs_art[static_cast<std::size_t>(p)]) {
        a_(p, art_col) = 1.0;
        basis_[static_cast<std::size_t>(p)] = art_col;
        ++art_col;
      }
    }
    for (Index j = 0; j < n_orig_; ++j) {
      if (!(upper_(j) >= 0.0)) throw Error(ErrorCode::kInvalidMatrix, "LP upper bound must be >= 0");
    }
    init_basis_ = basis_;
    tableau_ = a_;
    beta_ = rhs_;
    at_upper_.assign(static_cast<std::size_t>(ncol_), false);
    is_basic_.assign(static_cast<std::size_t>(ncol_), -1);
    for (Index p = 0; p < m_; ++p) is_basic_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(p)])] = p;
  }

  LpSolution solve(const Vector& c) {
    LpSolution sol;
    if (ncol_ > n_orig_ + n_slack_) {
      Vector c1 = Vector::Zero(ncol_);
      c1.tail(ncol_ - art_begin_).setConstant(-1.0);
      run(c1, sol.iterations);
      const double infeas = -c1.dot(values());
      if (infeas > 1e-7 * (1.0 + rhs_.cwiseAbs().maxCoeff())) {
        sol.status = LpStatus::kInfeasible;
        sol.x = values().head(n_orig_);
        return sol;
      }
      drive_out_artificials();
      for (Index j = art_begin_; j < ncol_; ++j) upper_(j) = 0.0;
    }
    Vector c2 = Vector::Zero(ncol_);
    c2.head(n_orig_) = c;
    run(c2, sol.iterations);
    refresh_beta();
    sol.x = values().head(n_orig_);
    sol.objective = c.dot(sol.x);
    return sol;
  }

 private:
  Vector values() const {
    Vector x = Vector::Zero(ncol_);
    for (Index j = 0; j < ncol_; ++j) {
      if (at_upper_[static_cast<std::size_t>(j)]) x(j) = upper_(j);
    }
    for (Index p = 0; p < m_; ++p) x(basis_[static_cast<std::size_t>(p)]) = beta_(p);
    return x;
  }

  // beta = B⁻¹ (b − Σ_{j at upper} A_j u_j), with B⁻¹ read off the columns
  // that formed the initial identity basis.
  void refresh_beta() {
    Vector r = rhs_;
    for (Index j = 0; j < ncol_; ++j) {
      if (at_upper_[static_cast<std::size_t>(j)] && is_basic_[static_cast<std::size_t>(j)] < 0) r -= a_.col(j) * upper_(j);
    }
    Matrix binv(m_, m_);
    for (Index p = 0; p < m_; ++p) binv.col(p) = tableau_.col(init_basis_[static_cast<std::size_t>(p)]);
    beta_ = binv * r;
  }

  void pivot(Index row, Index col) {
    const double piv = tableau_(row, col);
    tableau_.row(row) /= piv;
    for (Index i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double f = tableau_(i, col);
      if (f != 0.0) tableau_.row(i) -= f * tableau_.row(row);
    }
    const Index leaving = basis_[static_cast<std::size_t>(row)];
    is_basic_[static_cast<std::size_t>(leaving)] = -1;
    basis_[static_cast<std::size_t>(row)] = col;
    is_basic_[static_cast<std::size_t>(col)] = row;
    at_upper_[static_cast<std::size_t>(col)] = false;
  }

  void run(const Vector& c, std::size_t& iterations) {
    std::size_t degenerate = 0;
    bool bland = false;
    while (true) {
      if (++iterations > opt_.max_iterations) {
        throw Error(ErrorCode::kNotConverged, "simplex iteration limit reached");
      }
      Vector cb(m_);
      for (Index p = 0; p < m_; ++p) cb(p) = c(basis_[static_cast<std::size_t>(p)]);
      const Vector d = c - tableau_.transpose() * cb;
      Index enter = -1;
      double best = 0.0;
      for (Index j = 0; j < ncol_; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)] >= 0 || upper_(j) <= 0.0) continue;
        const bool up = at_upper_[static_cast<std::size_t>(j)];
        const double gain = up ? -d(j) : d(j);
        if (gain <= opt_.tol) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (gain > best) {
          best = gain;
          enter = j;
        }
      }
      if (enter < 0) return;
      const double dir = at_upper_[static_cast<std::size_t>(enter)] ? -1.0 : 1.0;
      double t = upper_(enter);
      Index leave_row = -1;
      bool leave_to_upper = false;
      double leave_alpha = 0.0;
      constexpr double kPivTol = 1e-11;
      for (Index i = 0; i < m_; ++i) {
        const double delta = -dir * tableau_(i, enter);
        const Index bvar = basis_[static_cast<std::size_t>(i)];
        double ti;
        bool to_upper;
        if (delta < -kPivTol) {
          ti = std::max(beta_(i), 0.0) / -delta;
          to_upper = false;
        } else if (delta > kPivTol && std::isfinite(upper_(bvar))) {
          ti = std::max(upper_(bvar) - beta_(i), 0.0) / delta;
          to_upper = true;
        } else {
          continue;
        }
        // Ties with the bound flip keep the flip; ties between rows go to the
        // smallest basic index (Bland) or the largest pivot magnitude.
        const bool tie = std::isfinite(t) && std::abs(ti - t) <= 1e-12 * (1.0 + std::abs(t));
        bool take = !tie && ti < t;
        if (tie && leave_row >= 0) {
          take = bland ? bvar < basis_[static_cast<std::size_t>(leave_row)] : std::abs(delta) > leave_alpha;
        }
        if (take) {
          t = ti;
          leave_row = i;
          leave_to_upper = to_upper;
          leave_alpha = std::abs(delta);
        }
      }
      if (!std::isfinite(t)) throw Error(ErrorCode::kInternal, "LP is unbounded");
      if (t <= 1e-12) {
        if (++degenerate >= opt_.degenerate_switch) bland = true;
      } else {
        degenerate = 0;
        bland = false;
      }
      for (Index i = 0; i < m_; ++i) beta_(i) += -dir * tableau_(i, enter) * t;
      if (leave_row < 0) {
        at_upper_[static_cast<std::size_t>(enter)] = !at_upper_[static_cast<std::size_t>(enter)];
        continue;
      }
      const double enter_value = (at_upper_[static_cast<std::size_t>(enter)] ? upper_(enter) : 0.0) + dir * t;
      const Index leaving = basis_[static_cast<std::size_t>(leave_row)];
      pivot(leave_row, enter);
      beta_(leave_row) = enter_value;
      at_upper_[static_cast<std::size_t>(leaving)] = leave_to_upper;
    }
  }

  void drive_out_artificials() {
    for (Index p = 0; p < m_; ++p) {
      if (basis_[static_cast<std::size_t>(p)] < art_begin_) continue;
      Index col = -1;
      double best = 1e-9;
      for (Index j = 0; j < art_begin_; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)] >= 0) continue;
        if (std::abs(tableau_(p, j)) > best) {
          best = std::abs(tableau_(p, j));
          col = j;
        }
      }
      if (col < 0) continue;  // redundant row; its artificial stays basic at 0
      const double value = at_upper_[static_cast<std::size_t>(col)] ? upper_(col) : 0.0;
      const Index leaving = basis_[static_cast<std::size_t>(p)];
      pivot(p, col);
      beta_(p) = value;
      at_upper_[static_cast<std::size_t>(leaving)] = false;
    }
  }

  LpOptions opt_;
  Index n_orig_ = 0, n_slack_ = 0, m_ = 0, ncol_ = 0, art_begin_ = 0;
  Matrix a_, tableau_;
  Vector rhs_, upper_, beta_;
  std::vector<Index> basis_, init_basis_;
  std::vector<Index> is_basic_;
  std::vector<bool> at_upper_;
};

}  // namespace detail

inline LpSolution solve_lp(const LpProblem& lp, const LpOptions& opt = {}) {
  if (lp.upper.size() != lp.objective.size()) {
    throw Error(ErrorCode::kInvalidMatrix, "LP bounds and objective differ in length");
  }
  detail::BoundedSimplex simplex(lp, opt);
  return simplex.solve(lp.objective);
}

}  // namespace sensel
