#pragma once

// Order-by-order formal deformations rho_t of a representation rho_0 with
// prescribed leading term.
//
// Ansatz on the free basis:  rho_t(x) = exp(-sum_m h_m(x) t^m) rho_0(x),
// peripheral constraint:     rho_t(gamma_j) = exp(C_j) rho_0(gamma_j) exp(-C_j),
//                            C_j = sum_m c_m^j t^m.
// With this sign the order-1 data is a crossed homomorphism h_1 with
// h_1(gamma_j) = (Ad rho_0(gamma_j) - 1) c_1^j, and the order-2 data satisfies
//   Ad rho_0(g1) h_2(g2) - h_2(g1 g2) + h_2(g1) = -1/2 [Ad rho_0(g1) h_1(g2), h_1(g1)].
//
// Since pi is free the homomorphism condition is automatic. For j < r the
// series of c_j is parametrized directly by C_j; the only surviving
// condition is the one for gamma_r, expressed over the free basis. At each
// order it is linear in the new coefficients, with right-hand side read off
// the truncated series expansion.

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "parabolic/symplectic.hpp"
#include "parabolic/series.hpp"

namespace parabolic {

class DeformationState {
 public:
  /// Snaps rho_0 so that c_r is exactly the product over the free basis.
  explicit DeformationState(const Representation& rho0) : base_(snap(rho0)) {
    const auto& pres = base_.presentation();
    exponents_.assign(static_cast<std::size_t>(pres.free_rank()), {});
    conjugators_.assign(static_cast<std::size_t>(pres.punctures()), {});
  }

  const Representation& base() const { return base_; }
  int order() const { return order_; }
  int rank() const { return base_.rank(); }

  /// h_m(x_i) for free generator i, m = 1..order().
  const AlgebraElement& exponent(int generator, int m) const {
    return exponents_.at(static_cast<std::size_t>(generator)).at(static_cast<std::size_t>(m - 1));
  }
  /// c_m^j for puncture j, m = 1..order().
  const AlgebraElement& conjugator(int puncture, int m) const {
    return conjugators_.at(static_cast<std::size_t>(puncture)).at(static_cast<std::size_t>(m - 1));
  }

  /// Appends one order. Exponents for peripheral free generators c_j (j < r)
  /// are recomputed from the conjugators.
  void push_order(const std::vector<AlgebraElement>& h, const std::vector<AlgebraElement>& c) {
    const auto& pres = base_.presentation();
    if (static_cast<int>(h.size()) != pres.free_rank() || static_cast<int>(c.size()) != pres.punctures())
      throw InvalidInput("deformation order has wrong shape");
    for (std::size_t i = 0; i < h.size(); ++i) exponents_[i].push_back(h[i]);
    for (std::size_t j = 0; j < c.size(); ++j) conjugators_[j].push_back(c[j]);
    ++order_;
  }

  void set_exponent(int generator, int m, const AlgebraElement& x) {
    exponents_.at(static_cast<std::size_t>(generator)).at(static_cast<std::size_t>(m - 1)) = x;
  }

  /// Series exp(C_j) rho_0(gamma_j) exp(-C_j) truncated at `order`.
  MatrixSeries peripheral_target(int j, int order) const {
    const Eigen::Index n = rank();
    MatrixSeries cs(n, order);
    for (int m = 1; m <= std::min(order, order_); ++m) cs[m] = conjugator(j, m).matrix();
    const CMatrix g = base_.image(base_.presentation().peripheral_generator(j)).matrix();
    return series_exp(cs) * MatrixSeries::constant(g, order) * series_exp(-cs);
  }

  /// Series of rho_t on generator `generator` (any of the 2g + r), truncated
  /// at `order`. Peripheral generators use their conjugation series.
  MatrixSeries generator_series(int generator, int order) const {
    const auto& pres = base_.presentation();
    if (generator >= 2 * pres.genus()) return peripheral_target(generator - 2 * pres.genus(), order);
    const Eigen::Index n = rank();
    MatrixSeries hs(n, order);
    for (int m = 1; m <= std::min(order, order_); ++m) hs[m] = -exponent(generator, m).matrix();
    return series_exp(hs) * MatrixSeries::constant(base_.image(generator).matrix(), order);
  }

  /// Series of rho_t(w) over the free basis (c_r expanded).
  MatrixSeries word_series(const Word& w, int order) const {
    const auto& pres = base_.presentation();
    const Eigen::Index n = rank();
    MatrixSeries acc = MatrixSeries::constant(CMatrix::Identity(n, n), order);
    for (const Letter& l : pres.expand(w)) {
      const MatrixSeries s = generator_series(l.generator, order);
      acc = acc * (l.exponent == 1 ? s : s.inverse());
    }
    return acc;
  }

  /// h_m(w), m = 1..order, defined by rho_t(w) = exp(-sum h_m(w) t^m) rho_0(w).
  std::vector<AlgebraElement> word_exponents(const Word& w) const {
    const auto& pres = base_.presentation();
    const int k = order_;
    const MatrixSeries s = word_series(w, k) *
                           MatrixSeries::constant(CMatrix(base_.evaluate(pres.expand(w)).adjoint()), k);
    const MatrixSeries lg = series_log(s);
    std::vector<AlgebraElement> out;
    for (int m = 1; m <= k; ++m) out.push_back(AlgebraElement::skew_part(-lg[m]));
    return out;
  }

 private:
  static Representation snap(const Representation& rho) {
    const auto& pres = rho.presentation();
    std::vector<UnitaryElement> imgs = rho.images();
    imgs.back() = UnitaryElement(polar_factor(rho.evaluate(pres.last_peripheral_word())));
    return Representation(rho.surface(), std::move(imgs));
  }

  Representation base_;
  int order_ = 0;
  std::vector<std::vector<AlgebraElement>> exponents_;
  std::vector<std::vector<AlgebraElement>> conjugators_;
};

/// Order-1 data from a parabolic cocycle: h_1 = u, c_1^j = the cone lift s_j.
inline DeformationState first_order_data(const Representation& rho0, const Cochain1& u) {
  DeformationState state(rho0);
  const ConeCochain1 lift = lift_to_cone(state.base(), u);
  state.push_order(u.values, lift.s);
  return state;
}

namespace detail {

/// Linear map from the order-m unknowns (h(a_i), h(b_i), c^1, ..., c^r) to
/// delta u(gamma_r) - (Ad rho_0(gamma_r) - 1) delta c^r.
inline RMatrix order_system_matrix(const Representation& rho) {
  const auto& pres = rho.presentation();
  const Eigen::Index d = algebra_dim(rho.rank());
  const int g2 = 2 * pres.genus();
  const int unknowns = g2 + pres.punctures();
  const int n = pres.free_rank();
  // Unknowns -> free-basis cochain values.
  RMatrix to_cochain = RMatrix::Zero(d * n, d * unknowns);
  for (int i = 0; i < g2; ++i) to_cochain.block(i * d, i * d, d, d).setIdentity();
  for (int j = 0; j + 1 < pres.punctures(); ++j)
    to_cochain.block((g2 + j) * d, (g2 + j) * d, d, d) = peripheral_operator(rho, j);
  const int last = pres.punctures() - 1;
  RMatrix m = peripheral_extension_matrix(rho, last) * to_cochain;
  m.middleCols((g2 + last) * d, d) -= peripheral_operator(rho, last);
  return m;
}

}  // namespace detail

inline constexpr double kObstructionTolerance = 1e-8;

/// Extends `state` from order k to k + 1 with the minimum-norm solution.
/// Throws ObstructionFound when the order-(k+1) system is inconsistent.
inline DeformationState solve_order(const DeformationState& state, int next_order) {
  if (next_order != state.order() + 1) throw InvalidInput("solve_order must extend by exactly one order");
  const Representation& rho = state.base();
  const auto& pres = rho.presentation();
  const Eigen::Index n = rho.rank();
  const Eigen::Index d = algebra_dim(n);
  const int last = pres.punctures() - 1;

  // Residual series with the new coefficients set to zero.
  const MatrixSeries word = state.word_series(pres.peripheral_word(last), next_order);
  const MatrixSeries target = state.peripheral_target(last, next_order);
  const MatrixSeries defect = word * target.inverse();
  const RVector rhs = to_coords(AlgebraElement::skew_part(defect[next_order]));

  const RMatrix m = detail::order_system_matrix(rho);
  const RVector delta = min_norm_solve(m, rhs);
  const RVector miss = m * delta - rhs;
  if (miss.norm() > kObstructionTolerance * std::max(1.0, rhs.norm()))
    throw ObstructionFound(next_order, miss);

  const int g2 = 2 * pres.genus();
  std::vector<AlgebraElement> h, c;
  for (int i = 0; i < g2; ++i) h.push_back(from_coords(delta.segment(i * d, d), n));
  for (int j = 0; j < pres.punctures(); ++j) c.push_back(from_coords(delta.segment((g2 + j) * d, d), n));
  // Placeholder exponents for c_j (j < r); filled from the conjugation series.
  for (int j = 0; j + 1 < pres.punctures(); ++j) h.push_back(AlgebraElement::zero(n));

  DeformationState next = state;
  next.push_order(h, c);
  for (int j = 0; j + 1 < pres.punctures(); ++j) {
    const int gen = pres.peripheral_generator(j);
    const MatrixSeries s = next.peripheral_target(j, next_order) *
                           MatrixSeries::constant(CMatrix(rho.image(gen).matrix().adjoint()), next_order);
    next.set_exponent(gen, next_order, AlgebraElement::skew_part(-series_log(s)[next_order]));
  }
  return next;
}

inline DeformationState build_deformation(const Representation& rho0, const Cochain1& u, int order) {
  if (order < 1) throw InvalidInput("deformation order must be >= 1");
  DeformationState state = first_order_data(rho0, u);
  for (int k = 2; k <= order; ++k) state = solve_order(state, k);
  return state;
}

struct DeformationSample {
  double t = 0.0;
  double relation_residual = 0.0;
  double conjugacy_residual = 0.0;  // max over punctures
  std::vector<double> per_puncture;
};

struct VerificationReport {
  int order = 0;
  std::vector<DeformationSample> samples;
  double base_relation_residual = 0.0;
  /// Per-sample residual below which a value is indistinguishable from
  /// double rounding of the stored coefficients, divided by t.
  double noise_floor = 0.0;
  /// Log-log slopes over the samples above the noise floor; +inf when fewer
  /// than two such samples remain (the residual vanishes to working precision).
  double relation_slope = 0.0;
  double conjugacy_slope = 0.0;
  double fitted_order = 0.0;
  bool exact() const { return std::isinf(fitted_order); }
};

inline std::vector<double> default_t_samples() {
  return {1e-1, std::pow(10.0, -1.5), 1e-2, std::pow(10.0, -2.5), 1e-3};
}

namespace detail {

inline double loglog_slope(const std::vector<double>& ts, const std::vector<double>& rs, double floor_per_t) {
  std::vector<double> x, y;
  for (std::size_t k = 0; k < ts.size(); ++k)
    if (rs[k] > floor_per_t * ts[k]) {
      x.push_back(std::log10(ts[k]));
      y.push_back(std::log10(rs[k]));
    }
  if (x.size() < 2) return std::numeric_limits<double>::infinity();
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  return sxy / sxx;
}

}  // namespace detail

/// Instantiates rho_t on the generators by evaluating the raw truncated
/// series (extended precision, no unitary projection) and measures
///   relation:   |rho_t(relation) - I|
///   conjugacy:  |rho_t(gamma_j) - exp(C_j(t)) rho_0(gamma_j) exp(-C_j(t))|
/// where rho_t(gamma_r) is the product over the free basis and the
/// exponentials are the truncated polynomials. Residuals are taken relative
/// to their t = 0 values so the rounding defect of rho_0 is not counted; it
/// is reported separately and sets the noise floor.
inline VerificationReport verify_deformation(const DeformationState& state,
                                             const std::vector<double>& t_samples = default_t_samples()) {
  using LD = long double;
  using LMatrix = Eigen::Matrix<std::complex<LD>, Eigen::Dynamic, Eigen::Dynamic>;
  const Representation& rho = state.base();
  const auto& pres = rho.presentation();
  const int k = std::max(state.order(), 1);
  const Eigen::Index n = rho.rank();
  const int g2 = 2 * pres.genus();

  // Free generators carry exp(-H) rho_0; the last peripheral generator is
  // their word. Conjugation targets are exp(C) rho_0(gamma_j) exp(-C).
  std::vector<MatrixSeries> free_series;
  for (int i = 0; i < pres.free_rank(); ++i) {
    MatrixSeries hs(n, k);
    for (int m = 1; m <= state.order(); ++m) hs[m] = -state.exponent(i, m).matrix();
    free_series.push_back(series_exp(hs) * MatrixSeries::constant(rho.image(i).matrix(), k));
  }
  std::vector<MatrixSeries> conj_plus, conj_minus;
  for (int j = 0; j < pres.punctures(); ++j) {
    MatrixSeries cs(n, k);
    for (int m = 1; m <= state.order(); ++m) cs[m] = state.conjugator(j, m).matrix();
    conj_plus.push_back(series_exp(cs));
    conj_minus.push_back(series_exp(-cs));
  }
  const Word last_word = pres.last_peripheral_word();

  struct Instance {
    std::vector<LMatrix> gens;
    std::vector<LMatrix> targets;
  };
  auto instantiate = [&](LD t) {
    Instance in;
    for (const auto& s : free_series) in.gens.push_back(s.evaluate<LD>(t));
    auto word_value = [&](const Word& w) {
      LMatrix acc = LMatrix::Identity(n, n);
      for (const Letter& l : w) {
        const LMatrix& m = in.gens[static_cast<std::size_t>(l.generator)];
        acc = acc * (l.exponent == 1 ? m : LMatrix(m.partialPivLu().inverse()));
      }
      return acc;
    };
    in.gens.push_back(word_value(last_word));
    for (int j = 0; j < pres.punctures(); ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const CMatrix base = rho.image(pres.peripheral_generator(j)).matrix();
      in.targets.push_back(conj_plus[ju].evaluate<LD>(t) * base.cast<std::complex<LD>>() *
                           conj_minus[ju].evaluate<LD>(t));
    }
    return in;
  };
  auto relation_of = [&](const Instance& in) {
    LMatrix w = LMatrix::Identity(n, n);
    for (const Letter& l : pres.relation()) {
      const LMatrix& m = in.gens[static_cast<std::size_t>(l.generator)];
      w = w * (l.exponent == 1 ? m : LMatrix(m.partialPivLu().inverse()));
    }
    return LMatrix(w - LMatrix::Identity(n, n));
  };
  auto conj_of = [&](const Instance& in, int j) {
    return LMatrix(in.gens[static_cast<std::size_t>(g2 + j)] - in.targets[static_cast<std::size_t>(j)]);
  };

  VerificationReport rep;
  rep.order = state.order();
  const Instance base = instantiate(0);
  const LMatrix rel0 = relation_of(base);
  std::vector<LMatrix> conj0;
  for (int j = 0; j < pres.punctures(); ++j) conj0.push_back(conj_of(base, j));
  rep.base_relation_residual = static_cast<double>(rel0.norm());

  // Coefficients are stored in double: each order can only be satisfied to
  // about one rounding unit of the largest coefficient, which shows up as a
  // residual linear in t.
  double scale = 1.0;
  for (int i = 0; i < pres.free_rank(); ++i)
    for (int m = 1; m <= state.order(); ++m) scale = std::max(scale, state.exponent(i, m).norm());
  for (int j = 0; j < pres.punctures(); ++j)
    for (int m = 1; m <= state.order(); ++m) scale = std::max(scale, state.conjugator(j, m).norm());
  rep.noise_floor = 64.0 * std::numeric_limits<double>::epsilon() *
                    std::max(scale, 1.0 + rep.base_relation_residual) *
                    static_cast<double>(pres.relation().size());

  std::vector<double> rel_res, conj_res;
  for (double t : t_samples) {
    const Instance in = instantiate(static_cast<LD>(t));
    DeformationSample s;
    s.t = t;
    s.relation_residual = static_cast<double>((relation_of(in) - rel0).norm());
    for (int j = 0; j < pres.punctures(); ++j) {
      const double r = static_cast<double>((conj_of(in, j) - conj0[static_cast<std::size_t>(j)]).norm());
      s.per_puncture.push_back(r);
      s.conjugacy_residual = std::max(s.conjugacy_residual, r);
    }
    rel_res.push_back(s.relation_residual);
    conj_res.push_back(s.conjugacy_residual);
    rep.samples.push_back(std::move(s));
  }
  rep.relation_slope = detail::loglog_slope(t_samples, rel_res, rep.noise_floor);
  rep.conjugacy_slope = detail::loglog_slope(t_samples, conj_res, rep.noise_floor);
  rep.fitted_order = std::min(rep.relation_slope, rep.conjugacy_slope);
  return rep;
}

}  // namespace parabolic
