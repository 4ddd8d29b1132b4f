#pragma once

// Numerics for U(N) and its Lie algebra u(N): the invariant form, adjoint
// action, exponential, Cayley transform, truncated BCH series and
// conjugacy-class bookkeeping.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "parabolic/detail/bch_table.hpp"
#include "parabolic/errors.hpp"

namespace parabolic {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Polar factor of an invertible matrix (closest unitary in Frobenius norm).
inline CMatrix polar_factor(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

inline double unitarity_defect(const CMatrix& m) {
  return (m * m.adjoint() - CMatrix::Identity(m.rows(), m.cols())).norm();
}

/// Element of u(N): a skew-Hermitian N x N matrix.
///
/// Construction from a matrix re-projects onto the skew-Hermitian part
/// x -> (x - x^H)/2 so the invariant holds to rounding; inputs that are far
/// from skew-Hermitian are rejected.
class AlgebraElement {
 public:
  AlgebraElement() = default;

  explicit AlgebraElement(const CMatrix& m) {
    if (m.rows() != m.cols()) throw InvalidInput("algebra element must be square");
    const double drift = (m + m.adjoint()).norm();
    if (drift > 1e-6 * std::max(1.0, m.norm()))
      throw InvalidInput("matrix is not skew-Hermitian");
    m_ = 0.5 * (m - m.adjoint());
  }

  static AlgebraElement zero(Eigen::Index n) {
    AlgebraElement x;
    x.m_ = CMatrix::Zero(n, n);
    return x;
  }

  /// Skew-Hermitian part of an arbitrary square matrix.
  static AlgebraElement skew_part(const CMatrix& m) {
    AlgebraElement x;
    x.m_ = 0.5 * (m - m.adjoint());
    return x;
  }

  const CMatrix& matrix() const { return m_; }
  Eigen::Index size() const { return m_.rows(); }
  double norm() const { return m_.norm(); }

  AlgebraElement operator+(const AlgebraElement& o) const {
    check(o);
    return raw(m_ + o.m_);
  }
  AlgebraElement operator-(const AlgebraElement& o) const {
    check(o);
    return raw(m_ - o.m_);
  }
  AlgebraElement operator-() const { return raw(-m_); }
  AlgebraElement operator*(double s) const { return raw(s * m_); }
  friend AlgebraElement operator*(double s, const AlgebraElement& x) { return x * s; }
  AlgebraElement& operator+=(const AlgebraElement& o) {
    check(o);
    m_ += o.m_;
    return *this;
  }

  void check(const AlgebraElement& o) const {
    if (o.size() != size()) throw SizeMismatch(size(), o.size());
  }

 private:
  static AlgebraElement raw(CMatrix m) {
    AlgebraElement x;
    x.m_ = std::move(m);
    return x;
  }
  CMatrix m_;
};

/// Element of U(N). Drift from unitarity above 1e-13 is removed by
/// replacing the matrix with its polar factor.
class UnitaryElement {
 public:
  UnitaryElement() = default;

  explicit UnitaryElement(const CMatrix& m) {
    if (m.rows() != m.cols()) throw InvalidInput("unitary element must be square");
    const double drift = unitarity_defect(m);
    if (drift > 1e-6) throw InvalidInput("matrix is not unitary");
    m_ = drift > 1e-13 ? polar_factor(m) : m;
  }

  static UnitaryElement identity(Eigen::Index n) {
    UnitaryElement u;
    u.m_ = CMatrix::Identity(n, n);
    return u;
  }

  const CMatrix& matrix() const { return m_; }
  Eigen::Index size() const { return m_.rows(); }

  UnitaryElement inverse() const {
    UnitaryElement u;
    u.m_ = m_.adjoint();
    return u;
  }

  UnitaryElement operator*(const UnitaryElement& o) const {
    if (o.size() != size()) throw SizeMismatch(size(), o.size());
    return UnitaryElement(CMatrix(m_ * o.m_));
  }

 private:
  CMatrix m_;
};

// ---------------------------------------------------------------------------
// Real coordinates on u(N)
//
// The basis is orthonormal for B(x, y) = -tr(xy): i E_kk, then for k < l the
// pair (E_kl - E_lk)/sqrt2, i (E_kl + E_lk)/sqrt2. With it, B becomes the
// Euclidean dot product on R^{N^2}.

inline Eigen::Index algebra_dim(Eigen::Index n) { return n * n; }

inline RVector to_coords(const CMatrix& x) {
  const Eigen::Index n = x.rows();
  RVector c(n * n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) c(k++) = x(i, i).imag();
  const double r2 = std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      c(k++) = (x(i, j).real() - x(j, i).real()) / r2;
      c(k++) = (x(i, j).imag() + x(j, i).imag()) / r2;
    }
  return c;
}

inline RVector to_coords(const AlgebraElement& x) { return to_coords(x.matrix()); }

inline CMatrix coords_to_matrix(const Eigen::Ref<const RVector>& c, Eigen::Index n) {
  if (c.size() != n * n) throw SizeMismatch(c.size(), n * n);
  CMatrix x = CMatrix::Zero(n, n);
  Eigen::Index k = 0;
  const Complex i1(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) x(i, i) = i1 * c(k++);
  const double r2 = std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double re = c(k++) / r2;
      const double im = c(k++) / r2;
      x(i, j) += Complex(re, im);
      x(j, i) += Complex(-re, im);
    }
  return x;
}

inline AlgebraElement from_coords(const Eigen::Ref<const RVector>& c, Eigen::Index n) {
  return AlgebraElement::skew_part(coords_to_matrix(c, n));
}

inline AlgebraElement basis_element(Eigen::Index n, Eigen::Index k) {
  return from_coords(RVector::Unit(n * n, k), n);
}

// ---------------------------------------------------------------------------
// Algebra operations

inline AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) {
  x.check(y);
  return AlgebraElement::skew_part(x.matrix() * y.matrix() - y.matrix() * x.matrix());
}

/// B(x, y) = -tr(xy); real, symmetric and positive definite on u(N).
inline double invariant_form(const AlgebraElement& x, const AlgebraElement& y) {
  x.check(y);
  return -(x.matrix().cwiseProduct(y.matrix().transpose())).sum().real();
}

inline AlgebraElement adjoint(const UnitaryElement& g, const AlgebraElement& x) {
  if (g.size() != x.size()) throw SizeMismatch(g.size(), x.size());
  return AlgebraElement::skew_part(g.matrix() * x.matrix() * g.matrix().adjoint());
}

/// Matrix of Ad(g) in the orthonormal coordinates; an orthogonal N^2 x N^2
/// matrix.
inline RMatrix adjoint_matrix(const CMatrix& g) {
  const Eigen::Index n = g.rows();
  RMatrix a(n * n, n * n);
  for (Eigen::Index k = 0; k < n * n; ++k) {
    const CMatrix e = coords_to_matrix(RVector::Unit(n * n, k), n);
    a.col(k) = to_coords(CMatrix(g * e * g.adjoint()));
  }
  return a;
}

inline RMatrix adjoint_matrix(const UnitaryElement& g) { return adjoint_matrix(g.matrix()); }

/// Spectral exponential: x = iH with H Hermitian, exp(x) = V e^{i diag} V^H.
inline CMatrix exp_skew(const CMatrix& x) {
  const CMatrix h = Complex(0.0, -1.0) * x;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()));
  const Eigen::VectorXcd phases =
      es.eigenvalues().unaryExpr([](double l) { return std::polar(1.0, l); });
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline UnitaryElement mat_exp(const AlgebraElement& x) {
  return UnitaryElement(exp_skew(x.matrix()));
}

/// Cayley transform (iI - A)(iI + A)^{-1} of the Hermitian generator
/// A = -ix, i.e. (I + x)(I - x)^{-1}. Sends 0 to I with derivative 2x.
inline CMatrix cayley_matrix(const CMatrix& x) {
  const Eigen::Index n = x.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix denom = id - x;
  Eigen::JacobiSVD<CMatrix> svd(denom);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1)
                                            : std::numeric_limits<double>::infinity();
  if (!(cond < 1e12)) throw NearSingular(cond);
  // (I - x)^{-1} and (I + x) commute.
  return denom.partialPivLu().solve(CMatrix(id + x));
}

inline UnitaryElement cayley(const AlgebraElement& x) {
  return UnitaryElement(cayley_matrix(x.matrix()));
}

inline int bch_max_order() { return 6; }

/// Truncated Baker-Campbell-Hausdorff series: z with
/// exp(z) = exp(x) exp(y) + O((|x| + |y|)^{order+1}).
inline AlgebraElement bch(const AlgebraElement& x, const AlgebraElement& y, int order) {
  x.check(y);
  if (order < 1 || order > bch_max_order())
    throw InvalidInput("BCH order must be in 1..6");
  const Eigen::Index n = x.size();
  CMatrix z = CMatrix::Zero(n, n);
  for (const auto& term : detail::kBchTerms) {
    if (static_cast<int>(term.word.size()) > order) continue;
    CMatrix w = CMatrix::Identity(n, n);
    for (char c : term.word) w = w * (c == 'X' ? x.matrix() : y.matrix());
    z += (static_cast<double>(term.numerator) / static_cast<double>(term.denominator)) * w;
  }
  return AlgebraElement::skew_part(z);
}

// ---------------------------------------------------------------------------
// Conjugacy classes

/// Distance on the unit circle between two angles.
inline double circle_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), kTwoPi);
  return std::min(d, kTwoPi - d);
}

inline double normalize_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

inline constexpr double kAngleTolerance = 1e-9;

/// Conjugacy class in U(N), given by eigenvalue angles e^{i theta_k}.
class ConjugacyClassSpec {
 public:
  ConjugacyClassSpec() = default;

  explicit ConjugacyClassSpec(std::vector<double> angles) : angles_(std::move(angles)) {
    if (angles_.empty()) throw InvalidInput("conjugacy class needs at least one angle");
    for (double& a : angles_) {
      if (!std::isfinite(a)) throw InvalidInput("conjugacy class angle is not finite");
      a = normalize_angle(a);
    }
  }

  const std::vector<double>& angles() const { return angles_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(angles_.size()); }

  /// Multiplicities of the distinct eigenvalues (angles grouped within
  /// kAngleTolerance on the circle).
  std::vector<int> multiplicities() const {
    std::vector<int> mult;
    std::vector<double> reps;
    for (double a : angles_) {
      auto it = std::find_if(reps.begin(), reps.end(), [a](double r) {
        return circle_distance(a, r) <= kAngleTolerance;
      });
      if (it == reps.end()) {
        reps.push_back(a);
        mult.push_back(1);
      } else {
        ++mult[static_cast<std::size_t>(it - reps.begin())];
      }
    }
    return mult;
  }

  /// Real dimension of the class: N^2 - sum m_k^2.
  int class_dimension() const {
    const int n = static_cast<int>(size());
    int s = 0;
    for (int m : multiplicities()) s += m * m;
    return n * n - s;
  }

  CMatrix representative() const {
    const Eigen::Index n = size();
    CMatrix d = CMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k)
      d(k, k) = std::polar(1.0, angles_[static_cast<std::size_t>(k)]);
    return d;
  }

  UnitaryElement representative_element() const { return UnitaryElement(representative()); }

  /// Sum of angles modulo 2 pi; the class determinant is e^{i * this}.
  double determinant_angle() const {
    double s = 0;
    for (double a : angles_) s += a;
    return normalize_angle(s);
  }

 private:
  std::vector<double> angles_;
};

/// True iff no product over a proper nonempty subset of the eigenvalues
/// e^{i theta_k} equals 1 (within kAngleTolerance on the circle).
/// Brute force over all 2^N - 2 subsets.
inline bool property_p_check(std::span<const double> angles) {
  const std::size_t n = angles.size();
  if (n >= 31) throw InvalidInput("property P enumeration limited to N < 31");
  const unsigned long full = (1ul << n) - 1;
  for (unsigned long mask = 1; mask < full; ++mask) {
    double s = 0;
    for (std::size_t k = 0; k < n; ++k)
      if (mask & (1ul << k)) s += angles[k];
    if (circle_distance(s, 0.0) <= kAngleTolerance) return false;
  }
  return true;
}

inline bool property_p_check(const ConjugacyClassSpec& spec) {
  return property_p_check(std::span<const double>(spec.angles()));
}

}  // namespace parabolic
