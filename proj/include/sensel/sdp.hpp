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

// Primal-dual interior-point solver for
//
//   minimize  <C, X>   s.t.  <A_i, X> (=|<=|>=) b_i,   X ⪰ 0,
//
// with one dense PSD block. Inequality rows get a nonnegative slack, so the
// cone is PSD × R₊^s. Search directions use Nesterov-Todd scaling and a
// Mehrotra predictor to pick the centering parameter. Starts are infeasible;
// primal and dual step lengths are independent.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

#include "sensel/error.hpp"
#include "sensel/linalg.hpp"
#include "sensel/model.hpp"

namespace sensel {

struct SymEntry {
  Index row;
  Index col;
  double value;
};

/// Symmetric matrix as its nonzero entries; both (r, c) and (c, r) are
/// listed for off-diagonal entries.
using SparseSym = std::vector<SymEntry>;

inline SparseSym sparse_from_dense(const Matrix& a) {
  SparseSym out;
  for (Index c = 0; c < a.cols(); ++c) {
    for (Index r = 0; r < a.rows(); ++r) {
      if (a(r, c) != 0.0) out.push_back({r, c, a(r, c)});
    }
  }
  return out;
}

inline double inner(const SparseSym& a, const Matrix& x) {
  double s = 0.0;
  for (const auto& e : a) s += e.value * x(e.row, e.col);
  return s;
}

inline void add_scaled(Matrix& m, const SparseSym& a, double scale) {
  for (const auto& e : a) m(e.row, e.col) += scale * e.value;
}

inline double frobenius(const SparseSym& a) {
  double s = 0.0;
  for (const auto& e : a) s += e.value * e.value;
  return std::sqrt(s);
}

struct SdpConstraint {
  SparseSym a;
  Relation relation = Relation::kEqual;
  double b = 0.0;
};

struct SdpProblem {
  Matrix c;
  std::vector<SdpConstraint> rows;
};

enum class SdpStatus { kOptimal, kNotConverged, kInfeasible };

inline std::string_view to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::kOptimal: return "optimal";
    case SdpStatus::kNotConverged: return "not_converged";
    case SdpStatus::kInfeasible: return "infeasible";
  }
  return "?";
}

struct SdpOptions {
  int max_iterations = 200;
  double tol = 1e-9;          // target on max(primal inf., dual inf., relative gap)
  double reduced_tol = 1e-7;  // accepted when progress stalls before tol is met
  int stall_iterations = 10;  // without improvement, once reduced_tol is met
  double step_fraction = 0.95;
};

struct SdpSolution {
  Matrix x;
  Vector y;
  Matrix z;
  double primal_objective = 0.0;  // <C, X>
  double dual_objective = 0.0;    // bᵀy
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  SdpStatus status = SdpStatus::kNotConverged;

  double duality_gap() const { return std::abs(primal_objective - dual_objective); }
};

namespace detail {

/// Largest α with X + αΔX ⪰ 0 (infinity when unbounded).
inline double max_psd_step(const Eigen::LLT<Matrix>& x_chol, const Matrix& dx) {
  const Matrix l = x_chol.matrixL();
  const auto lt = l.triangularView<Eigen::Lower>();
  Matrix t = lt.solve(dx);
  t = lt.solve(t.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(t), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  return lo >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lo;
}

inline double max_orthant_step(const Vector& v, const Vector& dv) {
  double a = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < v.size(); ++k) {
    if (dv(k) < 0.0) a = std::min(a, -v(k) / dv(k));
  }
  return a;
}

class SdpSolver {
 public:
  SdpSolver(const SdpProblem& p, const SdpOptions& opt) : p_(p), opt_(opt) {
    n_ = p.c.rows();
    m_ = static_cast<Index>(p.rows.size());
    b_.resize(m_);
    for (Index i = 0; i < m_; ++i) {
      const auto& row = p.rows[static_cast<std::size_t>(i)];
      b_(i) = row.b;
      slack_of_.push_back(-1);
      sign_.push_back(0.0);
      if (row.relation != Relation::kEqual) {
        slack_of_.back() = static_cast<Index>(slack_row_.size());
        sign_.back() = row.relation == Relation::kLessEqual ? 1.0 : -1.0;
        slack_row_.push_back(i);
      }
    }
    ns_ = static_cast<Index>(slack_row_.size());
  }

  SdpSolution solve() {
    initialize();
    SdpSolution best;
    double best_merit = std::numeric_limits<double>::infinity();
    const double b_norm = 1.0 + b_.norm();
    const double c_norm = 1.0 + p_.c.norm();
    int iter = 0, best_iter = 0;
    for (;; ++iter) {
      Vector rp;
      Matrix rd;
      Vector rd_s;
      residuals(rp, rd, rd_s);
      const double pobj = p_.c.cwiseProduct(x_).sum();
      const double dobj = b_.dot(y_);
      const double pinf = rp.norm() / b_norm;
      const double dinf = std::sqrt(rd.squaredNorm() + rd_s.squaredNorm()) / c_norm;
      const double rgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
      const double merit = std::max({pinf, dinf, rgap});
      if (merit < best_merit) {
        best_merit = merit;
        best = snapshot(pobj, dobj, pinf, dinf, iter);
        best_iter = iter;
      }
      if (merit <= opt_.tol) {
        best.status = SdpStatus::kOptimal;
        return best;
      }
      if (iter >= opt_.max_iterations) break;
      if (best_merit <= opt_.reduced_tol && iter - best_iter >= opt_.stall_iterations) break;
      // Dual objective diverging upward while the primal stays infeasible.
      if (pinf > 1e-3 && dinf < opt_.tol && dobj > 1e8 * (1.0 + std::abs(pobj))) {
        best.status = SdpStatus::kInfeasible;
        return best;
      }
      if (!step(rp, rd, rd_s)) break;
    }
    if (best_merit <= opt_.reduced_tol) {
      best.status = SdpStatus::kOptimal;
    } else {
      best.status = best.primal_infeasibility > 1e-3 ? SdpStatus::kInfeasible : SdpStatus::kNotConverged;
    }
    return best;
  }

 private:
  void initialize() {
    const double sn = std::sqrt(static_cast<double>(n_));
    double xi = std::max(10.0, sn);
    double eta = std::max({10.0, sn, p_.c.norm()});
    for (Index i = 0; i < m_; ++i) {
      const auto& row = p_.rows[static_cast<std::size_t>(i)];
      const double an = frobenius(row.a);
      xi = std::max(xi, sn * (1.0 + std::abs(row.b)) / (1.0 + an));
      eta = std::max(eta, an);
    }
    x_ = xi * Matrix::Identity(n_, n_);
    z_ = eta * Matrix::Identity(n_, n_);
    s_ = Vector::Constant(ns_, xi);
    zs_ = Vector::Constant(ns_, eta);
    y_ = Vector::Zero(m_);
  }

  void residuals(Vector& rp, Matrix& rd, Vector& rd_s) const {
    rp = b_;
    rd = p_.c - z_;
    for (Index i = 0; i < m_; ++i) {
      const auto& row = p_.rows[static_cast<std::size_t>(i)];
      rp(i) -= inner(row.a, x_);
      if (slack_of_[static_cast<std::size_t>(i)] >= 0) rp(i) -= sign_[static_cast<std::size_t>(i)] * s_(slack_of_[static_cast<std::size_t>(i)]);
      add_scaled(rd, row.a, -y_(i));
    }
    rd_s.resize(ns_);
    for (Index k = 0; k < ns_; ++k) {
      const Index i = slack_row_[static_cast<std::size_t>(k)];
      rd_s(k) = -sign_[static_cast<std::size_t>(i)] * y_(i) - zs_(k);
    }
  }

  SdpSolution snapshot(double pobj, double dobj, double pinf, double dinf, int iter) const {
    SdpSolution s;
    s.x = x_;
    s.y = y_;
    s.z = z_;
    s.primal_objective = pobj;
    s.dual_objective = dobj;
    s.primal_infeasibility = pinf;
    s.dual_infeasibility = dinf;
    s.iterations = iter;
    return s;
  }

  // One predictor-corrector iteration; false when the Schur system breaks down.
  bool step(const Vector& rp, const Matrix& rd, const Vector& rd_s) {
    Eigen::LLT<Matrix> x_chol(x_);
    Eigen::LLT<Matrix> z_chol(z_);
    if (x_chol.info() != Eigen::Success || z_chol.info() != Eigen::Success) {
      return false;
    }

    // NT scaling point: W Z W = X.
    const Matrix l = x_chol.matrixL();
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(l.transpose() * z_ * l));
    const Vector lam = es.eigenvalues();
    if (lam.minCoeff() <= 0.0) return false;
    const Matrix lu = l * es.eigenvectors();
    const Matrix w = symmetrize(lu * lam.cwiseInverse().cwiseSqrt().asDiagonal() * lu.transpose());
    const Matrix z_inv = symmetrize(z_chol.solve(Matrix::Identity(n_, n_)));
    const Vector d = s_.cwiseQuotient(zs_);

    Matrix schur = Matrix::Zero(m_, m_);
    for (Index i = 0; i < m_; ++i) {
      const auto& ai = p_.rows[static_cast<std::size_t>(i)].a;
      for (Index j = i; j < m_; ++j) {
        const auto& aj = p_.rows[static_cast<std::size_t>(j)].a;
        double v = 0.0;
        // <A_i, W A_j W> = Σ a_kl a_pq W_lp W_qk
        for (const auto& e : ai) {
          for (const auto& f : aj) v += e.value * f.value * w(e.col, f.row) * w(f.col, e.row);
        }
        schur(i, j) = v;
        schur(j, i) = v;
      }
      const Index k = slack_of_[static_cast<std::size_t>(i)];
      if (k >= 0) schur(i, i) += d(k);
    }
    // Near the optimum the Schur matrix is often ill-conditioned, and
    // dependent rows (budgets summing to the counts) make it singular.
    // Cholesky first, then pivoted LDLT, then a minimum-norm solve.
    Eigen::LLT<Matrix> schur_chol(schur);
    Eigen::LDLT<Matrix> schur_ldlt;
    Matrix schur_pinv;
    int solver = schur_chol.info() == Eigen::Success ? 0 : 1;
    if (solver == 1) {
      schur_ldlt.compute(schur);
      if (schur_ldlt.info() != Eigen::Success) solver = 2;
    }
    auto pinv_solver = [&]() {
      Eigen::SelfAdjointEigenSolver<Matrix> se(schur);
      const Vector ev = se.eigenvalues();
      const double cut = 1e-14 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300) * static_cast<double>(m_);
      Vector inv = Vector::Zero(m_);
      for (Index k = 0; k < m_; ++k) inv(k) = ev(k) > cut ? 1.0 / ev(k) : 0.0;
      schur_pinv = se.eigenvectors() * inv.asDiagonal() * se.eigenvectors().transpose();
      solver = 2;
    };
    if (solver == 2) pinv_solver();
    auto schur_solve = [&](const Vector& rhs) -> Vector {
      if (solver == 0) return schur_chol.solve(rhs);
      if (solver == 1) {
        Vector dy = schur_ldlt.solve(rhs);
        if (dy.allFinite() && (schur * dy - rhs).norm() <= 1e-6 * (1.0 + rhs.norm())) return dy;
        pinv_solver();
      }
      return schur_pinv * rhs;
    };
    const Matrix wrdw = w * rd * w;
    const double total = static_cast<double>(n_ + ns_);
    const double mu = (x_.cwiseProduct(z_).sum() + s_.dot(zs_)) / total;

    struct Direction {
      Matrix dx, dz;
      Vector dy, ds, dzs;
    };
    auto solve_direction = [&](double target) {
      Direction dir;
      const Matrix rc = target * z_inv - x_;
      const Matrix g = rc - wrdw;
      Vector rhs(m_);
      for (Index i = 0; i < m_; ++i) {
        rhs(i) = rp(i) - inner(p_.rows[static_cast<std::size_t>(i)].a, g);
        const Index k = slack_of_[static_cast<std::size_t>(i)];
        if (k >= 0) {
          const double sg = sign_[static_cast<std::size_t>(i)];
          rhs(i) -= sg * ((target - s_(k) * zs_(k)) / zs_(k) - d(k) * rd_s(k));
        }
      }
      dir.dy = schur_solve(rhs);
      dir.dz = rd;
      for (Index i = 0; i < m_; ++i) add_scaled(dir.dz, p_.rows[static_cast<std::size_t>(i)].a, -dir.dy(i));
      dir.dz = symmetrize(dir.dz);
      dir.dx = symmetrize(rc - w * dir.dz * w);
      dir.dzs.resize(ns_);
      dir.ds.resize(ns_);
      for (Index k = 0; k < ns_; ++k) {
        const Index i = slack_row_[static_cast<std::size_t>(k)];
        dir.dzs(k) = rd_s(k) - sign_[static_cast<std::size_t>(i)] * dir.dy(i);
        dir.ds(k) = (target - s_(k) * zs_(k)) / zs_(k) - d(k) * dir.dzs(k);
      }
      return dir;
    };
    auto step_lengths = [&](const Direction& dir, double frac, double& ap, double& ad) {
      ap = std::min(max_psd_step(x_chol, dir.dx), max_orthant_step(s_, dir.ds));
      ad = std::min(max_psd_step(z_chol, dir.dz), max_orthant_step(zs_, dir.dzs));
      ap = std::min(1.0, frac * ap);
      ad = std::min(1.0, frac * ad);
    };

    const Direction pred = solve_direction(0.0);
    double ap = 0.0, ad = 0.0;
    step_lengths(pred, 1.0, ap, ad);
    const double mu_aff = ((x_ + ap * pred.dx).cwiseProduct(z_ + ad * pred.dz).sum() +
                           (s_ + ap * pred.ds).dot(zs_ + ad * pred.dzs)) /
                          total;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 1e-4, 1.0);

    const Direction dir = solve_direction(sigma * mu);
    step_lengths(dir, opt_.step_fraction, ap, ad);
    x_ = symmetrize(x_ + ap * dir.dx);
    s_ += ap * dir.ds;
    y_ += ad * dir.dy;
    z_ = symmetrize(z_ + ad * dir.dz);
    zs_ += ad * dir.dzs;
    return ap > 0.0 || ad > 0.0;
  }

  const SdpProblem& p_;
  SdpOptions opt_;
  Index n_ = 0, m_ = 0, ns_ = 0;
  Vector b_;
  std::vector<Index> slack_of_;   // per row: slack index or -1
  std::vector<double> sign_;      // +1 for <=, -1 for >=
  std::vector<Index> slack_row_;  // per slack: its row
  Matrix x_, z_;
  Vector y_, s_, zs_;
};

}  // namespace detail

inline SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opt = {}) {
  if (p.c.rows() != p.c.cols() || !p.c.allFinite()) {
    throw Error(ErrorCode::kInvalidMatrix, "SDP cost matrix must be square and finite");
  }
  return detail::SdpSolver(p, opt).solve();
}

}  // namespace sensel
