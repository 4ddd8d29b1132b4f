#pragma once

// Twisted group cohomology of the free group pi = pi_1(U) with coefficients
// in u(N) (adjoint action through rho), relative to the peripheral cyclic
// subgroups Gamma_j = <gamma_j>.
//
// Because pi is free on n = 2g + r - 1 generators, Z^1(pi, g) = g^n and
// H^2(pi, g) = 0. Everything reduces to finite real matrices in the
// orthonormal coordinates of lie.hpp:
//
//   d0        : g -> g^n            x |-> (Ad rho(x_i) x - x)_i
//   E_j       : g^n -> g            u |-> u(gamma_j)
//   K_j       : ker(Ad rho(gamma_j) - 1) = coker(Ad rho(gamma_j) - 1)^*
//   Res       : g^n -> (+)_j K_j    u |-> (K_j^T E_j u)_j
//
// H^1 = range(d0)^perp, the parabolic tangent space is ker(Res) within it,
// and the relative H^2 is coker(Res).

#include <map>
#include <string>
#include <vector>

#include "parabolic/linalg.hpp"
#include "parabolic/surface.hpp"

namespace parabolic {

/// Degree-1 cone cochain: a 1-cochain on pi plus one 0-cochain per puncture.
struct ConeCochain1 {
  Cochain1 u;
  std::vector<AlgebraElement> s;
};

inline Cochain1 coboundary0(const Representation& rho, const AlgebraElement& x) {
  const auto& pres = rho.presentation();
  Cochain1 c;
  for (int i = 0; i < pres.free_rank(); ++i) c.values.push_back(adjoint(rho.image(i), x) - x);
  return c;
}

/// Stacked (Ad rho(x_i) - 1), an nN^2 x N^2 matrix.
inline RMatrix coboundary_matrix(const Representation& rho) {
  const auto& pres = rho.presentation();
  const Eigen::Index d = algebra_dim(rho.rank());
  RMatrix m(d * pres.free_rank(), d);
  for (int i = 0; i < pres.free_rank(); ++i)
    m.middleRows(i * d, d) = adjoint_matrix(rho.image(i)) - RMatrix::Identity(d, d);
  return m;
}

/// Image of gamma_j, computed over the free basis for j = r.
inline CMatrix peripheral_image(const Representation& rho, int j) {
  const auto& pres = rho.presentation();
  return rho.evaluate(pres.expand(pres.peripheral_word(j)));
}

inline RMatrix peripheral_extension_matrix(const Representation& rho, int j) {
  return cocycle_extension_matrix(rho, rho.presentation().peripheral_word(j));
}

/// Ad rho(gamma_j) - 1 in coordinates.
inline RMatrix peripheral_operator(const Representation& rho, int j) {
  const Eigen::Index d = algebra_dim(rho.rank());
  return adjoint_matrix(peripheral_image(rho, j)) - RMatrix::Identity(d, d);
}

/// Orthonormal basis of ker(Ad rho(gamma_j) - 1). Since Ad is orthogonal
/// this is also range(Ad rho(gamma_j) - 1)^perp, i.e. H^1(Gamma_j, g).
inline Subspace peripheral_cokernel(const Representation& rho, int j) {
  return null_space(peripheral_operator(rho, j));
}

inline Subspace h1_basis(const Representation& rho) {
  return range_complement(coboundary_matrix(rho));
}

struct PeripheralRestriction {
  AlgebraElement value;     // u(gamma_j)
  RVector class_in_coker;   // coordinates in the peripheral_cokernel basis
};

inline PeripheralRestriction peripheral_restriction(const Representation& rho, const Cochain1& u, int j) {
  PeripheralRestriction out;
  out.value = extend_cocycle(rho, u, rho.presentation().peripheral_word(j));
  out.class_in_coker = peripheral_cokernel(rho, j).basis.transpose() * to_coords(out.value);
  return out;
}

/// Stacked restriction-to-cokernel map Res.
inline RMatrix restriction_matrix(const Representation& rho) {
  const auto& pres = rho.presentation();
  std::vector<RMatrix> blocks;
  Eigen::Index rows = 0;
  for (int j = 0; j < pres.punctures(); ++j) {
    blocks.push_back(peripheral_cokernel(rho, j).basis.transpose() * peripheral_extension_matrix(rho, j));
    rows += blocks.back().rows();
  }
  RMatrix res(rows, algebra_dim(rho.rank()) * pres.free_rank());
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    res.middleRows(at, b.rows()) = b;
    at += b.rows();
  }
  return res;
}

/// Orthonormal basis (in flattened g^n coordinates) of the parabolic
/// cohomology Ker(H^1(pi, g) -> prod_j H^1(Gamma_j, g)), with representatives
/// orthogonal to the coboundaries.
inline Subspace parabolic_tangent_basis(const Representation& rho) {
  const Subspace h1 = h1_basis(rho);
  const RMatrix res = restriction_matrix(rho);
  Subspace inner = null_space(RMatrix(res * h1.basis));
  Subspace out;
  out.ambient = h1.ambient;
  out.basis = h1.basis * inner.basis;
  out.gap = inner.gap;
  return out;
}

/// Cokernel dimension of H^1(pi, R) -> (+)_j H^1(Gamma_j, R) for trivial
/// one-dimensional coefficients. Equals 1 for every punctured surface.
inline int cone_h2_trivial_rank(int genus, int punctures) {
  const PresentationInfo pres(genus, punctures);
  const int n = pres.free_rank();
  // With trivial action u(w) is the exponent-sum pairing.
  RMatrix res = RMatrix::Zero(punctures, n);
  for (int j = 0; j < punctures; ++j)
    for (const Letter& l : pres.expand(pres.peripheral_word(j))) res(j, l.generator) += l.exponent;
  return punctures - svd_rank(res).rank;
}

struct RelativeH2 {
  int full = 0;       // dim coker(Res) with u(N) coefficients
  int traceless = 0;  // full minus the central summand (always 1)
  SpectralGap gap;
};

inline RelativeH2 relative_h2(const Representation& rho) {
  const RMatrix res = restriction_matrix(rho);
  const RankInfo r = svd_rank(res);
  RelativeH2 out;
  out.full = static_cast<int>(res.rows()) - r.rank;
  out.traceless = out.full - cone_h2_trivial_rank(rho.surface().genus, rho.surface().punctures);
  out.gap = r.gap;
  return out;
}

/// Dimension of the obstruction space H^2(pi, (Gamma_j), su(N)). The central
/// summand iR.I contributes a copy of the trivial-coefficient group, which
/// never carries an obstruction (the order-by-order right-hand sides are
/// traceless), and is excluded here.
inline int relative_h2_dim(const Representation& rho) { return relative_h2(rho).traceless; }

inline int centralizer_dimension(const Representation& rho) {
  return null_space(coboundary_matrix(rho)).dim();
}

/// Complex dimension of the commutant {M : M rho(x) = rho(x) M}.
inline int commutant_dimension(const Representation& rho) {
  const Eigen::Index n = rho.rank();
  const int gens = rho.presentation().free_rank();
  if (gens == 0) return static_cast<int>(n * n);
  const CMatrix id = CMatrix::Identity(n, n);
  CMatrix stacked(n * n * gens, n * n);
  for (int i = 0; i < gens; ++i) {
    const CMatrix& a = rho.image(i).matrix();
    // vec(M A - A M) = (A^T (x) I - I (x) A) vec(M)
    CMatrix k(n * n, n * n);
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = 0; q < n; ++q)
        k.block(p * n, q * n, n, n) = a(q, p) * id - (p == q ? a : CMatrix::Zero(n, n));
    stacked.middleRows(i * n * n, n * n) = k;
  }
  Eigen::JacobiSVD<CMatrix> svd(stacked);
  return static_cast<int>(n * n) - detail::count_above(svd.singularValues(), kRankTolerance);
}

inline bool is_irreducible(const Representation& rho) { return commutant_dimension(rho) == 1; }

/// (2g - 2) N^2 + sum_j dim C_j + 2z, clamped at 0.
inline int expected_dimension(const SurfaceData& data, int centralizer_dim) {
  int dim = (2 * data.genus - 2) * data.rank * data.rank + 2 * centralizer_dim;
  for (const auto& c : data.classes) dim += c.class_dimension();
  return std::max(dim, 0);
}

struct AnalysisReport {
  int h1_dim = 0;
  int tangent_dim = 0;
  int expected_dim = 0;
  int relative_h2_dim = 0;
  int relative_h2_dim_full = 0;
  int centralizer_dim = 0;
  bool irreducible = false;
  std::vector<bool> property_p;
  bool smooth = false;
  std::map<std::string, SpectralGap> spectral_gaps;
};

inline AnalysisReport analyze(const Representation& rho) {
  AnalysisReport rep;
  const Subspace h1 = h1_basis(rho);
  const Subspace tangent = parabolic_tangent_basis(rho);
  const RelativeH2 h2 = relative_h2(rho);
  const Subspace centralizer = null_space(coboundary_matrix(rho));
  rep.h1_dim = h1.dim();
  rep.tangent_dim = tangent.dim();
  rep.centralizer_dim = centralizer.dim();
  rep.expected_dim = expected_dimension(rho.surface(), rep.centralizer_dim);
  rep.relative_h2_dim = h2.traceless;
  rep.relative_h2_dim_full = h2.full;
  rep.irreducible = is_irreducible(rho);
  for (const auto& c : rho.surface().classes) rep.property_p.push_back(property_p_check(c));
  rep.smooth = rep.relative_h2_dim == 0;
  rep.spectral_gaps["coboundary"] = h1.gap;
  rep.spectral_gaps["centralizer"] = centralizer.gap;
  rep.spectral_gaps["tangent"] = tangent.gap;
  rep.spectral_gaps["relative_h2"] = h2.gap;
  return rep;
}

}  // namespace parabolic
