#pragma once

#include <Eigen/Dense>
#include <Eigen/QR>

#include "relunmd/core/matrix.hpp"

namespace relunmd {

struct LsSolution {
  Matrix solution;
  /// Set when the fixed factor was numerically rank deficient; `solution`
  /// is then the minimum-norm minimizer.
  bool rank_deficient = false;
  Index rank = 0;
};

inline constexpr double kLsRankTol = 1e-10;

/// argmin_H ||z - w H||_F for w (m x r), z (m x n). QR with column pivoting.
inline LsSolution solve_ls_right(const Matrix& z, const Matrix& w, double rank_tol = kLsRankTol) {
  if (z.rows() != w.rows()) throw ShapeError("solve_ls_right: z and w row counts differ");
  require_nonempty(w, "solve_ls_right");
  const Index r = w.cols();

  Eigen::ColPivHouseholderQR<Matrix> qr(w);
  qr.setThreshold(rank_tol);
  if (qr.rank() < r) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(w);
    cod.setThreshold(rank_tol);
    return {cod.solve(z), true, cod.rank()};
  }
  // w P = Q R  =>  H = P R^{-1} Q^T z
  const Matrix q = qr.householderQ() * Matrix::Identity(w.rows(), r);
  Matrix c = q.transpose() * z;
  qr.matrixR().topLeftCorner(r, r).triangularView<Eigen::Upper>().solveInPlace(c);
  return {qr.colsPermutation() * c, false, r};
}

/// argmin_W ||z - W h||_F for h (r x n), z (m x n).
inline LsSolution solve_ls_left(const Matrix& z, const Matrix& h, double rank_tol = kLsRankTol) {
  if (z.cols() != h.cols()) throw ShapeError("solve_ls_left: z and h column counts differ");
  require_nonempty(h, "solve_ls_left");
  const Index r = h.rows();

  const Matrix ht = h.transpose();
  Eigen::ColPivHouseholderQR<Matrix> qr(ht);
  qr.setThreshold(rank_tol);
  if (qr.rank() < r) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(ht);
    cod.setThreshold(rank_tol);
    const Matrix zt = z.transpose();
    return {cod.solve(zt).transpose(), true, cod.rank()};
  }
  // h^T P = Q R  =>  W = (z Q) R^{-T} P^T
  const Matrix q = qr.householderQ() * Matrix::Identity(ht.rows(), r);
  Matrix yt = (z * q).transpose();  // r x m
  qr.matrixR().topLeftCorner(r, r).triangularView<Eigen::Upper>().solveInPlace(yt);
  Matrix w_perm = qr.colsPermutation() * yt;  // r x m
  return {w_perm.transpose(), false, r};
}

}  // namespace relunmd
