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

// Dense linear-algebra helpers on top of Eigen: Moore-Penrose inverse,
// symmetric positive (semi)definite handling and Cholesky sampling factors.
//
// "Sym" matrices are plain Eigen matrices that callers keep symmetric; every
// routine that produces one symmetrizes its output explicitly.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sensel/error.hpp"

namespace sensel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kDefaultPinvTol = 1e-12;

inline bool all_finite(const Matrix& a) { return a.allFinite(); }

inline Matrix symmetrize(const Matrix& a) {
  return 0.5 * (a + a.transpose());
}

// Eigenvalues below -psd_tolerance(a) mean "indefinite".
inline double psd_tolerance(const Matrix& a) { return 1e-9 * (1.0 + a.norm()); }

inline double min_eigenvalue(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline bool is_psd(const Matrix& a) {
  return min_eigenvalue(a) >= -psd_tolerance(a);
}

/// Projection onto the PSD cone by clipping negative eigenvalues to zero.
inline Matrix project_psd(const Matrix& a) {
  if (a.size() == 0) return a;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a));
  Vector lambda = es.eigenvalues().cwiseMax(0.0);
  return symmetrize(es.eigenvectors() * lambda.asDiagonal() *
                    es.eigenvectors().transpose());
}

/// A ⪯ B in the Loewner order, up to the PSD tolerance of B − A.
inline bool loewner_leq(const Matrix& a, const Matrix& b, double tol = 1e-9) {
  Matrix d = symmetrize(b - a);
  return min_eigenvalue(d) >= -tol * (1.0 + a.norm() + b.norm());
}

/// Moore-Penrose inverse via SVD; singular values below tol·σ_max are
/// treated as zero.
inline Matrix pinv(const Matrix& a, double tol = kDefaultPinvTol) {
  if (!a.allFinite()) {
    throw Error(ErrorCode::kInvalidMatrix, "pinv: non-finite entry");
  }
  if (!(tol > 0.0)) {
    throw Error(ErrorCode::kInvalidMatrix, "pinv: tolerance must be positive");
  }
  if (a.size() == 0) return Matrix::Zero(a.cols(), a.rows());
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const double cutoff = tol * (sigma.size() > 0 ? sigma(0) : 0.0);
  Vector inv = Vector::Zero(sigma.size());
  for (Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff && sigma(i) > 0.0) inv(i) = 1.0 / sigma(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// Inverse of a symmetric positive definite matrix. Throws
/// NotPositiveDefinite when the Cholesky factorization fails.
inline Matrix inverse_spd(const Matrix& a) {
  Eigen::LLT<Matrix> llt(symmetrize(a));
  if (llt.info() != Eigen::Success || !a.allFinite()) {
    throw Error(ErrorCode::kNotPositiveDefinite, "matrix is not positive definite");
  }
  return symmetrize(llt.solve(Matrix::Identity(a.rows(), a.cols())));
}

inline Matrix solve_spd(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || a.rows() != b.rows()) {
    throw Error(ErrorCode::kInvalidMatrix, "solve_spd: dimension mismatch");
  }
  Eigen::LLT<Matrix> llt(symmetrize(a));
  if (llt.info() != Eigen::Success || !a.allFinite()) {
    throw Error(ErrorCode::kNotPositiveDefinite, "solve_spd: matrix is not positive definite");
  }
  return llt.solve(b);
}

inline Matrix block_diagonal(std::span<const Matrix> blocks) {
  Index n = 0;
  for (const auto& b : blocks) n += b.rows();
  Matrix out = Matrix::Zero(n, n);
  Index off = 0;
  for (const auto& b : blocks) {
    out.block(off, off, b.rows(), b.cols()) = b;
    off += b.rows();
  }
  return out;
}

/// diag(γ₁R₁⁻¹, …, γ_L R_L⁻¹): the pseudoinverse of a block-diagonal matrix
/// whose unselected blocks are zeroed.
inline Matrix block_diag_pinv(std::span<const Matrix> blocks,
                              const std::vector<bool>& selected) {
  if (blocks.size() != selected.size()) {
    throw Error(ErrorCode::kInvalidMatrix, "block_diag_pinv: selection length mismatch");
  }
  std::vector<Matrix> inv;
  inv.reserve(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (!selected[i]) {
      inv.push_back(Matrix::Zero(blocks[i].rows(), blocks[i].cols()));
      continue;
    }
    Eigen::LLT<Matrix> llt(symmetrize(blocks[i]));
    if (llt.info() != Eigen::Success || !blocks[i].allFinite()) {
      throw Error(ErrorCode::kSingularBlock,
                  "block " + std::to_string(i) + " is not positive definite");
    }
    inv.push_back(symmetrize(llt.solve(Matrix::Identity(blocks[i].rows(), blocks[i].cols()))));
  }
  return block_diagonal(inv);
}

/// Lower-triangular L with L·Lᵀ = a for symmetric PSD a. Null directions
/// produce zero columns instead of failing.
inline Matrix cholesky(const Matrix& a) {
  if (a.rows() != a.cols() || !a.allFinite()) {
    throw Error(ErrorCode::kInvalidMatrix, "cholesky: expected a finite square matrix");
  }
  const Index n = a.rows();
  if (n == 0) return a;
  if (!is_psd(a)) {
    throw Error(ErrorCode::kNotPSD, "cholesky: matrix is indefinite");
  }
  Matrix s = symmetrize(a);
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() == Eigen::Success) {
    Matrix l = llt.matrixL();
    return l;
  }
  // Semidefinite: column-by-column factorization that skips vanishing pivots.
  const double eps = 1e-12 * (1.0 + s.diagonal().cwiseAbs().maxCoeff());
  Matrix l = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    double d = s(j, j) - l.row(j).head(j).squaredNorm();
    if (d <= eps) continue;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (Index i = j + 1; i < n; ++i) {
      l(i, j) = (s(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / ljj;
    }
  }
  return l;
}

/// Sampling factor for N(0, a) when a is PSD but possibly rank-deficient or
/// marginally indefinite: clip eigenvalues, add a 1e-12 ridge, factor.
inline Matrix sampling_factor(const Matrix& a) {
  Matrix clipped = project_psd(a);
  clipped.diagonal().array() += 1e-12;
  return cholesky(clipped);
}

}  // namespace sensel
