#pragma once

// Presentations of punctured-surface groups, word evaluation under a
// representation and extension of twisted cocycles from the free basis to
// arbitrary words.
//
// Generators are ordered a_1, b_1, ..., a_g, b_g, c_1, ..., c_r with the
// single relation [a_1, b_1] ... [a_g, b_g] c_1 ... c_r = 1. The group is free
// on the first 2g + r - 1 generators; c_r is stored as a generator but is
// expanded to (prod [a_i, b_i] c_1 ... c_{r-1})^{-1} wherever cocycles are
// extended.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "parabolic/lie.hpp"

namespace parabolic {

struct Letter {
  int generator = 0;
  int exponent = 1;  // +1 or -1

  friend bool operator==(const Letter&, const Letter&) = default;
};

using Word = std::vector<Letter>;

inline Word inverse(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back({it->generator, -it->exponent});
  return out;
}

inline Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

/// Cancels adjacent x x^{-1} pairs. Never applied implicitly.
inline Word free_reduce(const Word& w) {
  Word out;
  for (const Letter& l : w) {
    if (!out.empty() && out.back().generator == l.generator && out.back().exponent == -l.exponent)
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

struct SurfaceData {
  int genus = 0;
  int punctures = 1;
  int rank = 1;
  std::vector<ConjugacyClassSpec> classes;

  void validate() const {
    if (genus < 0) throw InvalidInput("genus must be >= 0");
    if (punctures < 1) throw InvalidInput("at least one puncture is required");
    if (rank < 1) throw InvalidInput("rank must be >= 1");
    if (static_cast<int>(classes.size()) != punctures)
      throw InvalidInput("expected " + std::to_string(punctures) + " conjugacy classes, got " +
                         std::to_string(classes.size()));
    for (const auto& c : classes)
      if (c.size() != rank) throw InvalidInput("conjugacy class size differs from rank");
  }
};

class PresentationInfo {
 public:
  PresentationInfo(int genus, int punctures) : genus_(genus), punctures_(punctures) {
    if (genus < 0) throw InvalidInput("genus must be >= 0");
    if (punctures < 1) throw InvalidInput("closed surfaces are not supported (punctures must be >= 1)");
    for (int i = 0; i < genus; ++i) {
      const int a = 2 * i, b = 2 * i + 1;
      relation_.insert(relation_.end(), {{a, 1}, {b, 1}, {a, -1}, {b, -1}});
    }
    for (int j = 0; j < punctures; ++j) relation_.push_back({2 * genus + j, 1});
    last_peripheral_word_ = inverse(Word(relation_.begin(), relation_.end() - 1));
  }

  int genus() const { return genus_; }
  int punctures() const { return punctures_; }
  int num_generators() const { return 2 * genus_ + punctures_; }
  /// Rank of the free group pi: 2g + r - 1.
  int free_rank() const { return 2 * genus_ + punctures_ - 1; }
  bool is_free_generator(int i) const { return i >= 0 && i < free_rank(); }

  const Word& relation() const { return relation_; }

  /// Generator index of the loop around puncture j (0-based).
  int peripheral_generator(int j) const { return 2 * genus_ + j; }
  Word peripheral_word(int j) const { return {{peripheral_generator(j), 1}}; }

  /// c_r written over the free basis.
  const Word& last_peripheral_word() const { return last_peripheral_word_; }

  /// Substitutes every occurrence of c_r by its free-basis word.
  Word expand(const Word& w) const {
    const int last = num_generators() - 1;
    Word out;
    for (const Letter& l : w) {
      check_letter(l);
      if (l.generator != last) {
        out.push_back(l);
      } else {
        const Word& sub = l.exponent == 1 ? last_peripheral_word_ : inverse_last();
        out.insert(out.end(), sub.begin(), sub.end());
      }
    }
    return out;
  }

  void check_letter(const Letter& l) const {
    if (l.generator < 0 || l.generator >= num_generators())
      throw InvalidInput("generator index out of range");
    if (l.exponent != 1 && l.exponent != -1) throw InvalidInput("letter exponent must be +-1");
  }

  std::string generator_name(int i) const {
    if (i < 2 * genus_) return std::string(i % 2 == 0 ? "a" : "b") + std::to_string(i / 2 + 1);
    return "c" + std::to_string(i - 2 * genus_ + 1);
  }

 private:
  Word inverse_last() const { return inverse(last_peripheral_word_); }

  int genus_;
  int punctures_;
  Word relation_;
  Word last_peripheral_word_;
};

inline PresentationInfo standard_presentation(int genus, int punctures) {
  return PresentationInfo(genus, punctures);
}

inline constexpr double kRepresentationTolerance = 1e-8;

/// Largest circle distance in a greedy matching between the eigenvalue
/// angles of `m` and the class angles.
inline double class_angle_mismatch(const CMatrix& m, const ConjugacyClassSpec& spec) {
  Eigen::ComplexEigenSolver<CMatrix> es(m, false);
  std::vector<double> eig;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    eig.push_back(normalize_angle(std::arg(es.eigenvalues()(k))));
  std::vector<bool> used(eig.size(), false);
  double worst = 0.0;
  for (double a : spec.angles()) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < eig.size(); ++k) {
      if (used[k]) continue;
      const double d = circle_distance(a, eig[k]);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_d);
  }
  return worst;
}

/// A homomorphism pi_1(U) -> U(N): one unitary per generator (2g + r).
class Representation {
 public:
  Representation(SurfaceData surface, std::vector<UnitaryElement> images)
      : surface_(std::move(surface)),
        presentation_(surface_.genus, surface_.punctures),
        images_(std::move(images)) {
    surface_.validate();
    if (static_cast<int>(images_.size()) != presentation_.num_generators())
      throw InvalidInput("expected " + std::to_string(presentation_.num_generators()) +
                         " generator images");
    for (const auto& m : images_)
      if (m.size() != surface_.rank) throw SizeMismatch(m.size(), surface_.rank);
  }

  const SurfaceData& surface() const { return surface_; }
  const PresentationInfo& presentation() const { return presentation_; }
  int rank() const { return surface_.rank; }
  const std::vector<UnitaryElement>& images() const { return images_; }
  const UnitaryElement& image(int generator) const {
    return images_.at(static_cast<std::size_t>(generator));
  }

  /// Ordered matrix product of the letters of w (inverses as adjoints).
  CMatrix evaluate(const Word& w) const {
    CMatrix m = CMatrix::Identity(rank(), rank());
    for (const Letter& l : w) {
      presentation_.check_letter(l);
      const CMatrix& g = image(l.generator).matrix();
      m = l.exponent == 1 ? CMatrix(m * g) : CMatrix(m * g.adjoint());
    }
    return m;
  }

  double relation_residual() const {
    return (evaluate(presentation_.relation()) - CMatrix::Identity(rank(), rank())).norm();
  }

  double class_mismatch(int j) const {
    return class_angle_mismatch(image(presentation_.peripheral_generator(j)).matrix(),
                                surface_.classes.at(static_cast<std::size_t>(j)));
  }

  /// Throws InvalidInput unless the relation and all class constraints hold
  /// within `tol`.
  void validate(double tol = kRepresentationTolerance) const {
    const double res = relation_residual();
    if (!(res <= tol))
      throw InvalidInput("relation residual " + std::to_string(res) + " exceeds tolerance");
    for (int j = 0; j < surface_.punctures; ++j) {
      const double d = class_mismatch(j);
      if (!(d <= tol))
        throw InvalidInput("peripheral image " + std::to_string(j + 1) +
                           " is not in its conjugacy class (angle error " + std::to_string(d) + ")");
    }
  }

  /// The gauge-equivalent representation g rho g^{-1}.
  Representation conjugated(const UnitaryElement& g) const {
    std::vector<UnitaryElement> out;
    out.reserve(images_.size());
    for (const auto& m : images_) out.emplace_back(CMatrix(g.matrix() * m.matrix() * g.matrix().adjoint()));
    return Representation(surface_, std::move(out));
  }

 private:
  SurfaceData surface_;
  PresentationInfo presentation_;
  std::vector<UnitaryElement> images_;
};

inline UnitaryElement evaluate_word(const Representation& rho, const Word& w) {
  return UnitaryElement(rho.evaluate(w));
}

/// Twisted 1-cochain given by its values on the free basis.
struct Cochain1 {
  std::vector<AlgebraElement> values;

  static Cochain1 zero(int free_rank, Eigen::Index n) {
    return Cochain1{std::vector<AlgebraElement>(static_cast<std::size_t>(free_rank), AlgebraElement::zero(n))};
  }

  RVector flatten() const {
    if (values.empty()) return RVector(0);
    const Eigen::Index d = values.front().size() * values.front().size();
    RVector v(d * static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i)
      v.segment(static_cast<Eigen::Index>(i) * d, d) = to_coords(values[i]);
    return v;
  }

  static Cochain1 unflatten(const Eigen::Ref<const RVector>& v, int free_rank, Eigen::Index n) {
    const Eigen::Index d = n * n;
    if (v.size() != d * free_rank) throw SizeMismatch(v.size(), d * free_rank);
    Cochain1 c;
    for (int i = 0; i < free_rank; ++i) c.values.push_back(from_coords(v.segment(i * d, d), n));
    return c;
  }
};

/// Linear map u -> coords(u(w)) from flattened free-basis values, for the
/// crossed-homomorphism extension u(w1 w2) = u(w1) + Ad rho(w1) u(w2),
/// u(x^{-1}) = -Ad rho(x)^{-1} u(x).
inline RMatrix cocycle_extension_matrix(const Representation& rho, const Word& w) {
  const auto& pres = rho.presentation();
  const Eigen::Index n = rho.rank();
  const Eigen::Index d = n * n;
  RMatrix e = RMatrix::Zero(d, d * pres.free_rank());
  CMatrix prefix = CMatrix::Identity(n, n);
  for (const Letter& l : pres.expand(w)) {
    const CMatrix& g = rho.image(l.generator).matrix();
    if (l.exponent == 1) {
      e.middleCols(l.generator * d, d) += adjoint_matrix(prefix);
      prefix = prefix * g;
    } else {
      prefix = prefix * g.adjoint();
      e.middleCols(l.generator * d, d) -= adjoint_matrix(prefix);
    }
  }
  return e;
}

inline AlgebraElement extend_cocycle(const Representation& rho, const Cochain1& u, const Word& w) {
  const auto& pres = rho.presentation();
  if (static_cast<int>(u.values.size()) != pres.free_rank())
    throw SizeMismatch(static_cast<long>(u.values.size()), pres.free_rank());
  const Eigen::Index n = rho.rank();
  AlgebraElement acc = AlgebraElement::zero(n);
  UnitaryElement prefix = UnitaryElement::identity(n);
  for (const Letter& l : pres.expand(w)) {
    const AlgebraElement& val = u.values[static_cast<std::size_t>(l.generator)];
    const UnitaryElement& g = rho.image(l.generator);
    if (l.exponent == 1) {
      acc += adjoint(prefix, val);
      prefix = prefix * g;
    } else {
      prefix = prefix * g.inverse();
      acc = acc - adjoint(prefix, val);
    }
  }
  return acc;
}

}  // namespace parabolic
