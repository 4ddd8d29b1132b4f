#pragma once

// Riemannian optimization for points of the representation variety with
// prescribed peripheral classes.
//
// Unknowns are (a_i, b_i, Q_j) in U(N)^{2g + r}; peripheral images are
// c_j = Q_j Lambda_j Q_j^H with Lambda_j the diagonal class representative, so
// the class constraints hold structurally. The objective is
// f = |W - I|_F^2 for W the image of the relation word. Steps live in u(N)
// per factor and are applied by left multiplication with the Cayley
// transform. Each iteration first tries a Gauss-Newton step and falls back to
// a gradient step; both are accepted only under an Armijo decrease, so the
// residual history is non-increasing.

#include <algorithm>
#include <cstdint>
#include <future>
#include <optional>
#include <random>
#include <vector>

#include "parabolic/cohomology.hpp"

namespace parabolic {

struct SolverConfig {
  int max_iters = 500;
  double tolerance = 1e-10;
  std::uint64_t seed = 0;
  double initial_step = 1.0;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 30;
  int restarts = 8;
  int threads = 1;
  /// Restart when a converged point is reducible. The first reducible
  /// success is returned if no irreducible one is found.
  bool prefer_irreducible = true;

  void validate() const {
    if (!(tolerance > 0)) throw InvalidInput("solver tolerance must be positive");
    if (max_iters <= 0) throw InvalidInput("max_iters must be positive");
    if (restarts < 0) throw InvalidInput("restarts must be >= 0");
  }
};

struct SolveResult {
  std::optional<Representation> representation;
  bool success = false;
  bool irreducible = false;
  double residual = 0.0;
  std::vector<double> residual_history;  // of the returned attempt
  int iterations = 0;
  int restarts_used = 0;
  std::vector<CMatrix> conjugators;  // Q_j of the returned attempt

  const Representation& value() const {
    if (!success || !representation) throw NoConvergence(residual);
    return *representation;
  }
};

namespace detail {

inline CMatrix haar_unitary(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMatrix z(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) z(i, j) = Complex(gauss(rng), gauss(rng)) / std::sqrt(2.0);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex d = r(k, k);
    q.col(k) *= std::abs(d) > 0 ? d / std::abs(d) : Complex(1.0);
  }
  return q;
}

inline std::mt19937_64 seeded_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

/// Optimization state: free factors a_i, b_i and conjugators Q_j.
class RepVarProblem {
 public:
  RepVarProblem(const SurfaceData& data, std::vector<CMatrix> vars)
      : data_(data), pres_(data.genus, data.punctures), vars_(std::move(vars)) {
    for (const auto& c : data_.classes) lambdas_.push_back(c.representative());
  }

  int num_vars() const { return static_cast<int>(vars_.size()); }
  const std::vector<CMatrix>& vars() const { return vars_; }

  CMatrix peripheral(int j) const {
    const CMatrix& q = vars_[static_cast<std::size_t>(2 * data_.genus + j)];
    return q * lambdas_[static_cast<std::size_t>(j)] * q.adjoint();
  }

  std::vector<CMatrix> images() const {
    std::vector<CMatrix> out(vars_.begin(), vars_.begin() + 2 * data_.genus);
    for (int j = 0; j < data_.punctures; ++j) out.push_back(peripheral(j));
    return out;
  }

  std::vector<CMatrix> factors() const {
    const auto imgs = images();
    std::vector<CMatrix> out;
    for (const Letter& l : pres_.relation()) {
      const CMatrix& g = imgs[static_cast<std::size_t>(l.generator)];
      out.push_back(l.exponent == 1 ? g : CMatrix(g.adjoint()));
    }
    return out;
  }

  CMatrix relation_image() const {
    const Eigen::Index n = data_.rank;
    CMatrix w = CMatrix::Identity(n, n);
    for (const auto& f : factors()) w = w * f;
    return w;
  }

  double objective() const {
    const Eigen::Index n = data_.rank;
    return (relation_image() - CMatrix::Identity(n, n)).squaredNorm();
  }

  /// Real residual vector (Re, Im of W - I) and its Jacobian with respect to
  /// left-multiplicative perturbations (I + xi) of each variable, xi in u(N)
  /// coordinates.
  void linearize(RVector& residual, RMatrix& jac) const {
    const Eigen::Index n = data_.rank;
    const Eigen::Index d = n * n;
    const auto fs = factors();
    const std::size_t len = fs.size();
    std::vector<CMatrix> prefix(len + 1), suffix(len + 1);
    prefix[0] = CMatrix::Identity(n, n);
    for (std::size_t k = 0; k < len; ++k) prefix[k + 1] = prefix[k] * fs[k];
    suffix[len] = CMatrix::Identity(n, n);
    for (std::size_t k = len; k-- > 0;) suffix[k] = fs[k] * suffix[k + 1];

    residual = flatten(CMatrix(prefix[len] - CMatrix::Identity(n, n)));
    jac = RMatrix::Zero(2 * d, d * num_vars());
    std::vector<CMatrix> basis;
    for (Eigen::Index m = 0; m < d; ++m) basis.push_back(coords_to_matrix(RVector::Unit(d, m), n));

    const auto& rel = pres_.relation();
    for (std::size_t k = 0; k < len; ++k) {
      const Letter& l = rel[k];
      const bool peripheral_letter = l.generator >= 2 * data_.genus;
      const int var = l.generator;
      for (Eigen::Index m = 0; m < d; ++m) {
        const CMatrix& xi = basis[static_cast<std::size_t>(m)];
        CMatrix dl;
        if (peripheral_letter) {
          // c -> (I + xi) c (I - xi); for c^{-1} likewise.
          dl = xi * fs[k] - fs[k] * xi;
        } else if (l.exponent == 1) {
          dl = xi * fs[k];
        } else {
          dl = -fs[k] * xi;
        }
        jac.col(var * d + m) += flatten(CMatrix(prefix[k] * dl * suffix[k + 1]));
      }
    }
  }

  /// U_v <- cayley(step_v / 2) U_v for every variable.
  RepVarProblem stepped(const RVector& step) const {
    const Eigen::Index n = data_.rank;
    const Eigen::Index d = n * n;
    std::vector<CMatrix> next;
    for (int v = 0; v < num_vars(); ++v) {
      const CMatrix x = 0.5 * coords_to_matrix(step.segment(v * d, d), n);
      next.push_back(cayley_matrix(x) * vars_[static_cast<std::size_t>(v)]);
    }
    return RepVarProblem(data_, std::move(next));
  }

  static RVector flatten(const CMatrix& m) {
    RVector v(2 * m.size());
    for (Eigen::Index k = 0; k < m.size(); ++k) {
      v(2 * k) = m.data()[k].real();
      v(2 * k + 1) = m.data()[k].imag();
    }
    return v;
  }

 private:
  SurfaceData data_;
  PresentationInfo pres_;
  std::vector<CMatrix> vars_;
  std::vector<CMatrix> lambdas_;
};

struct Attempt {
  std::vector<CMatrix> vars;
  std::vector<double> history;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

inline Attempt optimize(const SurfaceData& data, std::vector<CMatrix> start, const SolverConfig& cfg) {
  RepVarProblem prob(data, std::move(start));
  Attempt at;
  double f = prob.objective();
  at.history.push_back(std::sqrt(f));
  double gd_step = cfg.initial_step;
  int polish_left = -1;
  for (int it = 0; it < cfg.max_iters; ++it) {
    if (std::sqrt(f) <= cfg.tolerance && polish_left < 0) polish_left = 4;
    if (polish_left == 0) break;
    RVector r;
    RMatrix jac;
    prob.linearize(r, jac);
    bool accepted = false;

    // Gauss-Newton with backtracking.
    const RVector gn = min_norm_solve(jac, -r, 1e-12);
    const double predicted = f - (r + jac * gn).squaredNorm();
    if (gn.size() && predicted > 0) {
      double tau = 1.0;
      for (int b = 0; b < cfg.max_backtracks; ++b, tau *= cfg.backtrack) {
        RepVarProblem trial = prob.stepped(tau * gn);
        const double ft = trial.objective();
        if (ft <= f - cfg.armijo * tau * predicted) {
          prob = std::move(trial);
          f = ft;
          accepted = true;
          break;
        }
      }
    }
    // Gradient descent with Armijo backtracking.
    if (!accepted) {
      const RVector grad = 2.0 * jac.transpose() * r;
      const double g2 = grad.squaredNorm();
      if (g2 > 0) {
        double tau = gd_step;
        for (int b = 0; b < cfg.max_backtracks; ++b, tau *= cfg.backtrack) {
          RepVarProblem trial = prob.stepped(-tau * grad);
          const double ft = trial.objective();
          if (ft <= f - cfg.armijo * tau * g2) {
            prob = std::move(trial);
            f = ft;
            accepted = true;
            gd_step = std::min(4.0 * cfg.initial_step, 2.0 * tau);
            break;
          }
        }
      }
    }
    at.iterations = it + 1;
    if (!accepted) break;
    at.history.push_back(std::sqrt(f));
    if (polish_left > 0) {
      --polish_left;
      const double prev = at.history[at.history.size() - 2];
      if (at.history.back() > 0.5 * prev) break;
    }
  }
  at.residual = std::sqrt(f);
  at.converged = at.residual <= cfg.tolerance;
  at.vars = prob.vars();
  return at;
}

}  // namespace detail

/// Starting point: Haar-random a_i, b_i and conjugators Q_j. Returns the
/// optimization variables (a_1, b_1, ..., a_g, b_g, Q_1, ..., Q_r).
inline std::vector<CMatrix> random_variables(const SurfaceData& data, std::uint64_t seed,
                                             std::uint64_t stream = 0) {
  data.validate();
  auto rng = detail::seeded_rng(seed, stream);
  std::vector<CMatrix> vars;
  for (int k = 0; k < 2 * data.genus + data.punctures; ++k) vars.push_back(detail::haar_unitary(data.rank, rng));
  return vars;
}

/// Candidate representation with the class constraints satisfied by
/// construction (the relation generally is not).
inline Representation random_point(const SurfaceData& data, std::uint64_t seed) {
  detail::RepVarProblem prob(data, random_variables(data, seed));
  std::vector<UnitaryElement> imgs;
  for (const auto& m : prob.images()) imgs.emplace_back(m);
  return Representation(data, std::move(imgs));
}

/// Eigenvalue angles of a unitary matrix, sorted, in [0, 2 pi).
inline std::vector<double> eigen_angles(const CMatrix& m) {
  Eigen::ComplexEigenSolver<CMatrix> es(m, false);
  std::vector<double> out;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) out.push_back(normalize_angle(std::arg(es.eigenvalues()(k))));
  std::sort(out.begin(), out.end());
  return out;
}

/// A representation with Haar-random images of the free generators and
/// c_r set to the word it must equal. The classes are read off the
/// peripheral images, so the result satisfies every constraint exactly
/// (to rounding) without optimization.
inline Representation sample_representation(int genus, int punctures, int rank, std::uint64_t seed) {
  const PresentationInfo pres(genus, punctures);
  auto rng = detail::seeded_rng(seed, 0x5a3c);
  std::vector<UnitaryElement> imgs;
  for (int i = 0; i < pres.free_rank(); ++i) imgs.emplace_back(detail::haar_unitary(rank, rng));
  imgs.push_back(UnitaryElement::identity(rank));
  SurfaceData data{genus, punctures, rank, {}};
  for (int j = 0; j < punctures; ++j) data.classes.emplace_back(std::vector<double>(static_cast<std::size_t>(rank), 0.0));
  const Representation provisional(data, imgs);
  imgs.back() = UnitaryElement(polar_factor(provisional.evaluate(pres.last_peripheral_word())));
  for (int j = 0; j < punctures; ++j)
    data.classes[static_cast<std::size_t>(j)] =
        ConjugacyClassSpec(eigen_angles(imgs[static_cast<std::size_t>(pres.peripheral_generator(j))].matrix()));
  return Representation(data, std::move(imgs));
}

inline double residual(const Representation& rho) { return rho.relation_residual(); }

inline SolveResult solve(const SurfaceData& data, const SolverConfig& cfg = {}) {
  data.validate();
  cfg.validate();
  const int attempts = cfg.restarts + 1;
  const int workers = std::max(1, cfg.threads);

  SolveResult best_failure;
  best_failure.residual = std::numeric_limits<double>::infinity();
  std::optional<SolveResult> reducible_success;

  auto run = [&](int k) {
    return detail::optimize(data, random_variables(data, cfg.seed, static_cast<std::uint64_t>(k)), cfg);
  };
  auto finish = [&](const detail::Attempt& at, int k) {
    SolveResult res;
    detail::RepVarProblem prob(data, at.vars);
    std::vector<UnitaryElement> imgs;
    for (const auto& m : prob.images()) imgs.emplace_back(m);
    res.representation.emplace(data, std::move(imgs));
    res.residual = at.residual;
    res.residual_history = at.history;
    res.iterations = at.iterations;
    res.restarts_used = k;
    res.success = at.converged;
    for (int j = 0; j < data.punctures; ++j)
      res.conjugators.push_back(at.vars[static_cast<std::size_t>(2 * data.genus + j)]);
    if (res.success) res.irreducible = is_irreducible(*res.representation);
    return res;
  };

  for (int base = 0; base < attempts; base += workers) {
    const int batch = std::min(workers, attempts - base);
    std::vector<detail::Attempt> results(static_cast<std::size_t>(batch));
    if (batch == 1) {
      results[0] = run(base);
    } else {
      std::vector<std::future<detail::Attempt>> jobs;
      for (int k = 0; k < batch; ++k) jobs.push_back(std::async(std::launch::async, run, base + k));
      for (int k = 0; k < batch; ++k) results[static_cast<std::size_t>(k)] = jobs[static_cast<std::size_t>(k)].get();
    }
    for (int k = 0; k < batch; ++k) {
      SolveResult res = finish(results[static_cast<std::size_t>(k)], base + k);
      if (res.success) {
        if (res.irreducible || !cfg.prefer_irreducible) return res;
        if (!reducible_success) reducible_success = std::move(res);
      } else if (res.residual < best_failure.residual) {
        best_failure = std::move(res);
      }
    }
  }
  if (reducible_success) {
    reducible_success->restarts_used = cfg.restarts;
    return *reducible_success;
  }
  best_failure.restarts_used = cfg.restarts;
  best_failure.representation.reset();
  return best_failure;
}

inline AnalysisReport certify(const Representation& rho) { return analyze(rho); }

}  // namespace parabolic
