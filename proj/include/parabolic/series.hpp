#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "parabolic/lie.hpp"

namespace parabolic {

/// Truncated power series A_0 + A_1 t + ... + A_K t^K of N x N complex
/// matrices. Products discard orders above K.
class MatrixSeries {
 public:
  MatrixSeries() = default;
  MatrixSeries(Eigen::Index n, int order) : n_(n), coeffs_(static_cast<std::size_t>(order + 1), CMatrix::Zero(n, n)) {
    if (order < 0) throw InvalidInput("series order must be >= 0");
  }

  static MatrixSeries constant(const CMatrix& a0, int order) {
    MatrixSeries s(a0.rows(), order);
    s[0] = a0;
    return s;
  }

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  Eigen::Index size() const { return n_; }
  CMatrix& operator[](int k) { return coeffs_.at(static_cast<std::size_t>(k)); }
  const CMatrix& operator[](int k) const { return coeffs_.at(static_cast<std::size_t>(k)); }

  MatrixSeries operator+(const MatrixSeries& o) const {
    check(o);
    MatrixSeries r = *this;
    for (int k = 0; k <= order(); ++k) r[k] += o[k];
    return r;
  }
  MatrixSeries operator-(const MatrixSeries& o) const {
    check(o);
    MatrixSeries r = *this;
    for (int k = 0; k <= order(); ++k) r[k] -= o[k];
    return r;
  }
  MatrixSeries operator-() const {
    MatrixSeries r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }
  MatrixSeries operator*(Complex s) const {
    MatrixSeries r = *this;
    for (auto& c : r.coeffs_) c *= s;
    return r;
  }
  MatrixSeries operator*(const MatrixSeries& o) const {
    check(o);
    MatrixSeries r(n_, order());
    for (int i = 0; i <= order(); ++i) {
      if (coeffs_[static_cast<std::size_t>(i)].isZero(0.0)) continue;
      for (int j = 0; i + j <= order(); ++j) r[i + j] += (*this)[i] * o[j];
    }
    return r;
  }

  bool has_zero_constant() const { return coeffs_.front().isZero(0.0); }

  /// Inverse series; requires an invertible constant term.
  MatrixSeries inverse() const {
    MatrixSeries r(n_, order());
    const auto lu = coeffs_.front().partialPivLu();
    r[0] = lu.inverse();
    for (int m = 1; m <= order(); ++m) {
      CMatrix acc = CMatrix::Zero(n_, n_);
      for (int i = 1; i <= m; ++i) acc += (*this)[i] * r[m - i];
      r[m] = -(r[0] * acc);
    }
    return r;
  }

  /// Value at t of the truncated polynomial, in scalar type T.
  template <typename T = double>
  Eigen::Matrix<std::complex<T>, Eigen::Dynamic, Eigen::Dynamic> evaluate(T t) const {
    using M = Eigen::Matrix<std::complex<T>, Eigen::Dynamic, Eigen::Dynamic>;
    M acc = M::Zero(n_, n_);
    for (int k = order(); k >= 0; --k) acc = acc * std::complex<T>(t) + (*this)[k].template cast<std::complex<T>>();
    return acc;
  }

 private:
  void check(const MatrixSeries& o) const {
    if (o.n_ != n_) throw SizeMismatch(n_, o.n_);
    if (o.order() != order()) throw InvalidInput("series truncation orders differ");
  }

  Eigen::Index n_ = 0;
  std::vector<CMatrix> coeffs_;
};

/// exp(a) for a series with zero constant term, truncated at a.order().
inline MatrixSeries series_exp(const MatrixSeries& a) {
  if (!a.has_zero_constant()) throw InvalidInput("series_exp needs a zero constant term");
  const int k = a.order();
  MatrixSeries result = MatrixSeries::constant(CMatrix::Identity(a.size(), a.size()), k);
  MatrixSeries power = result;
  for (int m = 1; m <= k; ++m) {
    power = power * a * Complex(1.0 / m);
    result = result + power;
  }
  return result;
}

/// log(s) for a series with constant term I.
inline MatrixSeries series_log(const MatrixSeries& s) {
  const Eigen::Index n = s.size();
  if (!(s[0] - CMatrix::Identity(n, n)).isZero(1e-12))
    throw InvalidInput("series_log needs constant term I");
  MatrixSeries x = s;
  x[0].setZero();
  const int k = s.order();
  MatrixSeries result(n, k);
  MatrixSeries power = MatrixSeries::constant(CMatrix::Identity(n, n), k);
  for (int m = 1; m <= k; ++m) {
    power = power * x;
    result = result + power * Complex((m % 2 == 1 ? 1.0 : -1.0) / m);
  }
  return result;
}

}  // namespace parabolic
