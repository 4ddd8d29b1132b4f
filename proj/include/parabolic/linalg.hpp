#pragma once

#include <algorithm>
#include <limits>

#include <Eigen/Dense>

#include "parabolic/lie.hpp"

namespace parabolic {

/// Relative singular-value threshold for every rank decision.
inline constexpr double kRankTolerance = 1e-9;

/// Singular values on either side of a rank cut. `dropped` is 0 when nothing
/// was dropped and `kept` is +inf when nothing was kept.
struct SpectralGap {
  double kept = std::numeric_limits<double>::infinity();
  double dropped = 0.0;

  double ratio() const { return dropped > 0 ? kept / dropped : std::numeric_limits<double>::infinity(); }
};

struct RankInfo {
  int rank = 0;
  SpectralGap gap;
};

/// Orthonormal basis of a subspace of R^ambient, stored as columns.
struct Subspace {
  RMatrix basis;
  Eigen::Index ambient = 0;
  double tolerance = kRankTolerance;
  SpectralGap gap;

  int dim() const { return static_cast<int>(basis.cols()); }
  RMatrix projector() const { return basis * basis.transpose(); }
};

namespace detail {

inline double largest(const RVector& sv) { return sv.size() ? sv(0) : 0.0; }

/// Singular values above rel_tol * max(sigma_max, 1). The floor at 1 keeps
/// a numerically zero matrix at rank 0; every operator assembled here has
/// entries of order one (orthogonal maps minus identity, unitary products).
inline int count_above(const RVector& sv, double rel_tol) {
  const double cut = rel_tol * std::max(largest(sv), 1.0);
  int r = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > cut) ++r;
  return r;
}

inline SpectralGap gap_at(const RVector& sv, int rank) {
  SpectralGap g;
  if (rank > 0) g.kept = sv(rank - 1);
  if (rank < sv.size()) g.dropped = sv(rank);
  return g;
}

}  // namespace detail

/// Numerical rank by singular values with relative threshold.
inline RankInfo svd_rank(const RMatrix& a, double rel_tol = kRankTolerance) {
  RankInfo info;
  if (a.size() == 0) return info;
  Eigen::JacobiSVD<RMatrix> svd(a);
  const RVector& sv = svd.singularValues();
  info.rank = detail::count_above(sv, rel_tol);
  info.gap = detail::gap_at(sv, info.rank);
  return info;
}

/// Numerical rank by column-pivoted Householder QR with the same relative
/// threshold applied to |R_kk|.
inline int qr_rank(const RMatrix& a, double rel_tol = kRankTolerance) {
  if (a.size() == 0) return 0;
  Eigen::ColPivHouseholderQR<RMatrix> qr(a);
  const auto r = qr.matrixQR().diagonal().cwiseAbs();
  const double cut = rel_tol * std::max(r.size() ? r(0) : 0.0, 1.0);
  int rank = 0;
  for (Eigen::Index k = 0; k < r.size(); ++k)
    if (r(k) > cut) ++rank;
  return rank;
}

/// Orthonormal basis of ker(a) inside R^{a.cols()}.
inline Subspace null_space(const RMatrix& a, double rel_tol = kRankTolerance) {
  Subspace s;
  s.ambient = a.cols();
  s.tolerance = rel_tol;
  if (a.rows() == 0 || a.cols() == 0) {
    s.basis = RMatrix::Identity(a.cols(), a.cols());
    return s;
  }
  Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  const int rank = detail::count_above(sv, rel_tol);
  s.gap = detail::gap_at(sv, rank);
  s.basis = svd.matrixV().rightCols(a.cols() - rank);
  return s;
}

/// Orthonormal basis of range(a) inside R^{a.rows()}.
inline Subspace range_space(const RMatrix& a, double rel_tol = kRankTolerance) {
  Subspace s;
  s.ambient = a.rows();
  s.tolerance = rel_tol;
  if (a.rows() == 0 || a.cols() == 0) {
    s.basis = RMatrix::Zero(a.rows(), 0);
    return s;
  }
  Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeFullU);
  const RVector& sv = svd.singularValues();
  const int rank = detail::count_above(sv, rel_tol);
  s.gap = detail::gap_at(sv, rank);
  s.basis = svd.matrixU().leftCols(rank);
  return s;
}

/// Orthonormal basis of range(a)^perp inside R^{a.rows()}.
inline Subspace range_complement(const RMatrix& a, double rel_tol = kRankTolerance) {
  Subspace s;
  s.ambient = a.rows();
  s.tolerance = rel_tol;
  if (a.rows() == 0 || a.cols() == 0) {
    s.basis = RMatrix::Identity(a.rows(), a.rows());
    return s;
  }
  Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeFullU);
  const RVector& sv = svd.singularValues();
  const int rank = detail::count_above(sv, rel_tol);
  s.gap = detail::gap_at(sv, rank);
  s.basis = svd.matrixU().rightCols(a.rows() - rank);
  return s;
}

/// Minimum-norm least-squares solution of a x = b with the rank threshold.
inline RVector min_norm_solve(const RMatrix& a, const RVector& b, double rel_tol = kRankTolerance) {
  if (a.cols() == 0) return RVector::Zero(0);
  if (a.rows() == 0) return RVector::Zero(a.cols());
  Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& sv = svd.singularValues();
  const int rank = detail::count_above(sv, rel_tol);
  RVector coeff = svd.matrixU().leftCols(rank).transpose() * b;
  for (int k = 0; k < rank; ++k) coeff(k) /= sv(k);
  return svd.matrixV().leftCols(rank) * coeff;
}

/// Moore-Penrose pseudo-inverse with the rank threshold.
inline RMatrix pseudo_inverse(const RMatrix& a, double rel_tol = kRankTolerance) {
  if (a.size() == 0) return RMatrix::Zero(a.cols(), a.rows());
  Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& sv = svd.singularValues();
  const int rank = detail::count_above(sv, rel_tol);
  RMatrix inv_s = RMatrix::Zero(rank, rank);
  for (int k = 0; k < rank; ++k) inv_s(k, k) = 1.0 / sv(k);
  return svd.matrixV().leftCols(rank) * inv_s * svd.matrixU().leftCols(rank).transpose();
}

}  // namespace parabolic
