#pragma once

// The 2-form on the parabolic tangent space at a smooth irreducible point.
//
// Parabolic cocycles are lifted to cone cocycles (u, s_j) with
// u(gamma_j) = (Ad rho(gamma_j) - 1) s_j. The cone cup product of (u, s) and
// (v, t) has pi-component
//     (u cup v)(g1, g2) = B(u(g1), Ad rho(g1) v(g2))
// and Gamma_j-component sigma_j(tau) = -B(s_j, v(tau)). The result is
// evaluated against the relative fundamental cycle of the punctured surface:
// the staircase of the relation word, a correction [x | x^{-1}] for every
// inverse letter, and the peripheral 1-chains [gamma_j]. The cycle is scaled
// so that the trivial-coefficient class (gamma'_1, ..., gamma'_r) pairs to 1.

#include <functional>
#include <future>
#include <thread>
#include <vector>

#include "parabolic/cohomology.hpp"

namespace parabolic {

class FundamentalCycle {
 public:
  struct Step {
    Word prefix;
    Word letter;
  };

  explicit FundamentalCycle(const PresentationInfo& pres) : punctures_(pres.punctures()) {
    const Word& rel = pres.relation();
    for (std::size_t k = 0; k < rel.size(); ++k) {
      if (k > 0) staircase_.push_back({Word(rel.begin(), rel.begin() + static_cast<long>(k)), Word{rel[k]}});
      if (rel[k].exponent == -1) inverse_letters_.push_back({rel[k].generator, 1});
    }
  }

  const std::vector<Step>& staircase() const { return staircase_; }
  /// Generators x whose inverse occurs in the relation; each contributes
  /// -c(x, x^{-1}).
  const std::vector<Letter>& inverse_letters() const { return inverse_letters_; }
  int punctures() const { return punctures_; }
  double scale() const { return 1.0 / punctures_; }

  /// Pairing of a normalized real cone 2-cochain (c, sigma) with the cycle,
  /// before scaling. `sigma(j)` is sigma_j(gamma_j).
  double integral_evaluate(const std::function<double(const Word&, const Word&)>& c,
                           const std::function<double(int)>& sigma) const {
    double total = 0.0;
    for (const Step& st : staircase_) total += c(st.prefix, st.letter);
    for (const Letter& x : inverse_letters_) total -= c(Word{x}, Word{{x.generator, -1}});
    for (int j = 0; j < punctures_; ++j) total += sigma(j);
    return total;
  }

  double evaluate(const std::function<double(const Word&, const Word&)>& c,
                  const std::function<double(int)>& sigma) const {
    return scale() * integral_evaluate(c, sigma);
  }

 private:
  int punctures_;
  std::vector<Step> staircase_;
  std::vector<Letter> inverse_letters_;
};

inline constexpr double kParabolicTolerance = 1e-9;

/// Lift of a parabolic cocycle to a cone cocycle: s_j is the minimum-norm
/// solution of (Ad rho(gamma_j) - 1) s_j = u(gamma_j).
inline ConeCochain1 lift_to_cone(const Representation& rho, const Cochain1& u) {
  const double scale = std::max(1.0, u.flatten().norm());
  ConeCochain1 out{u, {}};
  for (int j = 0; j < rho.presentation().punctures(); ++j) {
    const PeripheralRestriction pr = peripheral_restriction(rho, u, j);
    const double excess = pr.class_in_coker.size() ? pr.class_in_coker.norm() : 0.0;
    if (excess > kParabolicTolerance * scale) throw NotParabolic(j, excess);
    const RMatrix op = peripheral_operator(rho, j);
    out.s.push_back(from_coords(min_norm_solve(op, to_coords(pr.value)), rho.rank()));
  }
  return out;
}

inline double cup_evaluate(const Representation& rho, const Cochain1& u, const Cochain1& v,
                           const Word& g1, const Word& g2) {
  const AlgebraElement ug1 = extend_cocycle(rho, u, g1);
  const AlgebraElement vg2 = extend_cocycle(rho, v, g2);
  const UnitaryElement prefix(rho.evaluate(rho.presentation().expand(g1)));
  return invariant_form(ug1, adjoint(prefix, vg2));
}

/// Evaluates the cone cup product of two cone 1-cochains on the fundamental
/// cycle. No smoothness or parabolicity checks.
inline double evaluate_cone_pairing(const Representation& rho, const FundamentalCycle& cycle,
                                    const ConeCochain1& a, const ConeCochain1& b) {
  const auto& pres = rho.presentation();
  auto cup = [&](const Word& g1, const Word& g2) { return cup_evaluate(rho, a.u, b.u, g1, g2); };
  auto sigma = [&](int j) {
    return -invariant_form(a.s[static_cast<std::size_t>(j)], extend_cocycle(rho, b.u, pres.peripheral_word(j)));
  };
  return cycle.evaluate(cup, sigma);
}

/// The pairing at a fixed representation. Construction certifies
/// irreducibility and smoothness and precomputes the bilinear matrix Omega
/// with omega(u, v) = u^T Omega v on flattened free-basis coordinates.
class SymplecticPairing {
 public:
  explicit SymplecticPairing(Representation rho, bool require_smooth = true)
      : rho_(std::move(rho)), cycle_(rho_.presentation()) {
    if (require_smooth) {
      if (!is_irreducible(rho_)) throw Reducible();
      const int h2 = relative_h2_dim(rho_);
      if (h2 != 0) throw NotSmooth(h2);
    }
    build_matrix();
  }

  const Representation& representation() const { return rho_; }
  const FundamentalCycle& cycle() const { return cycle_; }
  const RMatrix& matrix() const { return omega_; }

  /// Direct evaluation through cup products over the cycle.
  double form(const Cochain1& u, const Cochain1& v) const {
    return evaluate_cone_pairing(rho_, cycle_, lift_to_cone(rho_, u), lift_to_cone(rho_, v));
  }

  double form_flat(const RVector& u, const RVector& v) const { return u.dot(omega_ * v); }

 private:
  void build_matrix() {
    const auto& pres = rho_.presentation();
    const Eigen::Index d = algebra_dim(rho_.rank());
    const Eigen::Index dim = d * pres.free_rank();
    omega_ = RMatrix::Zero(dim, dim);
    if (dim == 0) return;
    auto ad_of = [&](const Word& w) { return adjoint_matrix(rho_.evaluate(pres.expand(w))); };
    for (const auto& st : cycle_.staircase())
      omega_ += cocycle_extension_matrix(rho_, st.prefix).transpose() * ad_of(st.prefix) *
                cocycle_extension_matrix(rho_, st.letter);
    for (const Letter& x : cycle_.inverse_letters()) {
      const Word w{x};
      omega_ -= cocycle_extension_matrix(rho_, w).transpose() * ad_of(w) *
                cocycle_extension_matrix(rho_, Word{{x.generator, -1}});
    }
    for (int j = 0; j < pres.punctures(); ++j) {
      const RMatrix ej = peripheral_extension_matrix(rho_, j);
      const RMatrix lift = pseudo_inverse(peripheral_operator(rho_, j)) * ej;
      omega_ -= lift.transpose() * ej;
    }
    omega_ *= cycle_.scale();
  }

  Representation rho_;
  FundamentalCycle cycle_;
  RMatrix omega_;
};

inline double symplectic_form(const Representation& rho, const Cochain1& u, const Cochain1& v) {
  return SymplecticPairing(rho).form(u, v);
}

struct GramMatrix {
  RMatrix entries;
  int rank = 0;
  double smallest_singular_value = 0.0;
  double largest_singular_value = 0.0;

  int basis_dim() const { return static_cast<int>(entries.rows()); }
  /// smallest / largest singular value; 1 for the empty matrix.
  double conditioning() const {
    if (entries.rows() == 0) return 1.0;
    return largest_singular_value > 0 ? smallest_singular_value / largest_singular_value : 0.0;
  }
  double skew_defect() const { return entries.rows() ? (entries + entries.transpose()).cwiseAbs().maxCoeff() : 0.0; }
};

/// Pairwise form on the columns of `basis`. Rows are split across `threads`
/// workers; assembly order does not depend on scheduling.
inline GramMatrix gram_matrix(const SymplecticPairing& pairing, const Subspace& basis, int threads = 1) {
  const Eigen::Index k = basis.basis.cols();
  GramMatrix g;
  g.entries = RMatrix::Zero(k, k);
  if (k == 0) return g;
  const RMatrix& omega = pairing.matrix();
  auto rows = [&](Eigen::Index begin, Eigen::Index end) {
    for (Eigen::Index i = begin; i < end; ++i)
      for (Eigen::Index j = 0; j < k; ++j)
        g.entries(i, j) = basis.basis.col(i).dot(omega * basis.basis.col(j));
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(k)));
  if (workers == 1) {
    rows(0, k);
  } else {
    std::vector<std::future<void>> jobs;
    const Eigen::Index chunk = (k + workers - 1) / workers;
    for (Eigen::Index b = 0; b < k; b += chunk)
      jobs.push_back(std::async(std::launch::async, rows, b, std::min(k, b + chunk)));
    for (auto& f : jobs) f.get();
  }
  Eigen::JacobiSVD<RMatrix> svd(g.entries);
  const RVector& sv = svd.singularValues();
  g.rank = detail::count_above(sv, kRankTolerance);
  g.largest_singular_value = sv(0);
  g.smallest_singular_value = sv(sv.size() - 1);
  return g;
}

inline GramMatrix gram_matrix(const Representation& rho, const Subspace& basis, int threads = 1) {
  return gram_matrix(SymplecticPairing(rho), basis, threads);
}

}  // namespace parabolic
