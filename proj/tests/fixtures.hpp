#pragma once

// Shared builders for the test suites.

#include <map>
#include <random>

#include "parabolic/deformation.hpp"
#include "parabolic/solver.hpp"

namespace fixtures {

using namespace parabolic;

inline SurfaceData surface(int genus, int punctures, int rank, std::vector<std::vector<double>> classes) {
  SurfaceData d{genus, punctures, rank, {}};
  for (auto& c : classes) d.classes.emplace_back(std::move(c));
  return d;
}

/// U(2), g = 0, four punctures, every class with angles (pi/2, -pi/2).
inline SurfaceData canonical_u2() {
  const double h = std::numbers::pi / 2;
  return surface(0, 4, 2, {{h, -h}, {h, -h}, {h, -h}, {h, -h}});
}

/// Solves once per (data, seed) within a test binary.
inline const Representation& solved(const SurfaceData& data, std::uint64_t seed = 0) {
  static std::map<std::string, Representation> cache;
  std::string key = std::to_string(seed) + ":" + std::to_string(data.genus) + "," + std::to_string(data.punctures) +
                    "," + std::to_string(data.rank);
  for (const auto& c : data.classes)
    for (double a : c.angles()) key += "," + std::to_string(a);
  auto it = cache.find(key);
  if (it == cache.end()) {
    SolverConfig cfg;
    cfg.seed = seed;
    it = cache.emplace(key, solve(data, cfg).value()).first;
  }
  return it->second;
}

inline const Representation& canonical_point() { return solved(canonical_u2(), 0); }

inline AlgebraElement random_algebra(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g;
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return AlgebraElement::skew_part(scale * m);
}

inline Cochain1 random_cochain(const Representation& rho, std::mt19937_64& rng) {
  Cochain1 c;
  for (int i = 0; i < rho.presentation().free_rank(); ++i) c.values.push_back(random_algebra(rho.rank(), rng));
  return c;
}

inline UnitaryElement random_unitary(Eigen::Index n, std::mt19937_64& rng) {
  return UnitaryElement(detail::haar_unitary(n, rng));
}

/// Random word over all 2g + r generators with random exponents.
inline Word random_word(const PresentationInfo& pres, int length, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> gen(0, pres.num_generators() - 1), sign(0, 1);
  Word w;
  for (int k = 0; k < length; ++k) w.push_back({gen(rng), sign(rng) ? 1 : -1});
  return w;
}

/// Random element of the parabolic tangent space.
inline Cochain1 random_tangent(const Representation& rho, const Subspace& tangent, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  RVector coeffs(tangent.dim());
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) coeffs(k) = g(rng);
  return Cochain1::unflatten(tangent.basis * coeffs, rho.presentation().free_rank(), rho.rank());
}

inline Representation trivial_representation(int genus, int punctures, int rank) {
  SurfaceData d{genus, punctures, rank, {}};
  for (int j = 0; j < punctures; ++j) d.classes.emplace_back(std::vector<double>(static_cast<std::size_t>(rank), 0.0));
  return Representation(d, std::vector<UnitaryElement>(static_cast<std::size_t>(2 * genus + punctures),
                                                        UnitaryElement::identity(rank)));
}

/// U(2), g = 1, r = 1: a, b diagonal with distinct entries, c = I. A sum of
/// two distinct U(1) characters, so reducible with commutant dimension 2.
inline Representation diagonal_u2_torus() {
  CMatrix a = CMatrix::Zero(2, 2), b = CMatrix::Zero(2, 2);
  a(0, 0) = std::polar(1.0, 0.4);
  a(1, 1) = std::polar(1.0, 1.9);
  b(0, 0) = std::polar(1.0, -0.7);
  b(1, 1) = std::polar(1.0, 2.6);
  return Representation(surface(1, 1, 2, {{0.0, 0.0}}),
                        {UnitaryElement(a), UnitaryElement(b), UnitaryElement::identity(2)});
}

}  // namespace fixtures
