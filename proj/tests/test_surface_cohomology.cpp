#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace parabolic;
using namespace fixtures;

namespace {

// Left fold with inverses by LU, independent of Representation::evaluate.
CMatrix left_fold(const Representation& rho, const Word& w) {
  CMatrix acc = CMatrix::Identity(rho.rank(), rho.rank());
  for (const Letter& l : w) {
    const CMatrix& g = rho.image(l.generator).matrix();
    acc = acc * (l.exponent == 1 ? g : CMatrix(g.partialPivLu().inverse()));
  }
  return acc;
}

// Block-diagonal Ad g acting on flattened free-basis cochains.
RMatrix gauge_action(const Representation& rho, const UnitaryElement& g) {
  const Eigen::Index d = algebra_dim(rho.rank());
  const int n = rho.presentation().free_rank();
  RMatrix m = RMatrix::Zero(d * n, d * n);
  for (int i = 0; i < n; ++i) m.block(i * d, i * d, d, d) = adjoint_matrix(g);
  return m;
}

}  // namespace

// ------------------------------------------------------------ presentation

TEST(Presentation, StandardShapes) {
  const auto p03 = standard_presentation(0, 3);
  EXPECT_EQ(p03.num_generators(), 3);
  EXPECT_EQ(p03.free_rank(), 2);
  EXPECT_EQ(p03.relation(), (Word{{0, 1}, {1, 1}, {2, 1}}));
  EXPECT_EQ(p03.generator_name(0), "c1");

  const auto p11 = standard_presentation(1, 1);
  EXPECT_EQ(p11.num_generators(), 3);
  EXPECT_EQ(p11.free_rank(), 2);
  EXPECT_EQ(p11.relation(), (Word{{0, 1}, {1, 1}, {0, -1}, {1, -1}, {2, 1}}));
  EXPECT_EQ(p11.generator_name(1), "b1");
  EXPECT_EQ(p11.last_peripheral_word(), (Word{{1, 1}, {0, 1}, {1, -1}, {0, -1}}));

  const auto p22 = standard_presentation(2, 2);
  EXPECT_EQ(p22.num_generators(), 6);
  EXPECT_EQ(p22.free_rank(), 5);

  EXPECT_THROW(standard_presentation(0, 0), InvalidInput);
  EXPECT_THROW(standard_presentation(-1, 2), InvalidInput);
}

TEST(Presentation, RelationExpandsToIdentityWord) {
  for (int g = 0; g <= 2; ++g)
    for (int r = 1; r <= 3; ++r) {
      const auto p = standard_presentation(g, r);
      EXPECT_TRUE(free_reduce(p.expand(p.relation())).empty());
    }
}

TEST(Words, FreeReduce) {
  EXPECT_TRUE(free_reduce(Word{{0, 1}, {1, 1}, {1, -1}, {0, -1}}).empty());
  EXPECT_EQ(free_reduce(Word{{0, 1}, {0, 1}, {0, -1}}), (Word{{0, 1}}));
  const Word w{{2, 1}, {0, -1}, {1, 1}};
  EXPECT_TRUE(free_reduce(concat(w, inverse(w))).empty());
}

TEST(SurfaceDataTest, Validation) {
  EXPECT_THROW(surface(0, 2, 1, {{0.1}}).validate(), InvalidInput);
  EXPECT_THROW(surface(0, 1, 2, {{0.1}}).validate(), InvalidInput);
  EXPECT_NO_THROW(surface(1, 1, 1, {{0.0}}).validate());
}

// ------------------------------------------------------------ evaluation

TEST(EvaluateWord, EmptyInverseAndFoldOracle) {
  const Representation rho = sample_representation(1, 2, 3, 11);
  const auto& pres = rho.presentation();
  EXPECT_LT((evaluate_word(rho, {}).matrix() - CMatrix::Identity(3, 3)).norm(), 1e-15);
  EXPECT_LT((rho.evaluate(Word{{1, 1}, {1, -1}}) - CMatrix::Identity(3, 3)).norm(), 1e-12);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Word w = random_word(pres, 12, rng), v = random_word(pres, 7, rng);
    EXPECT_LT((rho.evaluate(w) - left_fold(rho, w)).norm(), 1e-12);
    EXPECT_LT((rho.evaluate(concat(w, v)) - rho.evaluate(w) * rho.evaluate(v)).norm(), 1e-11);
  }
}

TEST(EvaluateWord, SampledRepresentationIsValid) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Representation rho = sample_representation(static_cast<int>(seed % 3), 1 + static_cast<int>(seed % 4), 2, seed);
    EXPECT_LT(rho.relation_residual(), 1e-12);
    EXPECT_NO_THROW(rho.validate(1e-10));
  }
}

TEST(RepresentationTest, RejectsWrongClass) {
  const Representation rho = sample_representation(1, 2, 2, 3);
  SurfaceData bad = rho.surface();
  bad.classes[0] = ConjugacyClassSpec({0.123, 0.456});
  EXPECT_THROW(Representation(bad, rho.images()).validate(), InvalidInput);
}

// ------------------------------------------------------------ cocycles

TEST(ExtendCocycle, ZeroCoboundaryAndIdentity) {
  const Representation rho = sample_representation(1, 2, 2, 5);
  const auto& pres = rho.presentation();
  std::mt19937_64 rng(2);
  const Cochain1 zero = Cochain1::zero(pres.free_rank(), 2);
  const AlgebraElement x = random_algebra(2, rng);
  const Cochain1 dx = coboundary0(rho, x);
  const Cochain1 u = random_cochain(rho, rng), v = random_cochain(rho, rng);
  for (int trial = 0; trial < 30; ++trial) {
    const Word w1 = random_word(pres, 6, rng), w2 = random_word(pres, 5, rng);
    EXPECT_EQ(extend_cocycle(rho, zero, w1).norm(), 0.0);
    const UnitaryElement gw(rho.evaluate(w1));
    EXPECT_LT((extend_cocycle(rho, dx, w1) - (adjoint(gw, x) - x)).norm(), 1e-12);
    const AlgebraElement split =
        extend_cocycle(rho, u, concat(w1, w2)) - extend_cocycle(rho, u, w1) - adjoint(gw, extend_cocycle(rho, u, w2));
    EXPECT_LT(split.norm(), 1e-10);
    // Linearity and matrix form.
    Cochain1 uv = u;
    for (std::size_t i = 0; i < uv.values.size(); ++i) uv.values[i] = u.values[i] * 2.0 - v.values[i];
    EXPECT_LT((extend_cocycle(rho, uv, w1) - (extend_cocycle(rho, u, w1) * 2.0 - extend_cocycle(rho, v, w1))).norm(),
              1e-12);
    EXPECT_LT((cocycle_extension_matrix(rho, w1) * u.flatten() - to_coords(extend_cocycle(rho, u, w1))).norm(), 1e-12);
    // Reduction invariance.
    EXPECT_LT((extend_cocycle(rho, u, w1) - extend_cocycle(rho, u, free_reduce(w1))).norm(), 1e-10);
  }
  // The relation is trivial in pi, so every cocycle vanishes on it.
  EXPECT_LT(extend_cocycle(rho, u, pres.relation()).norm(), 1e-12);
}

// ------------------------------------------------------------ cohomology

TEST(Coboundary, ZeroAndCentral) {
  const Representation rho = sample_representation(0, 3, 3, 7);
  EXPECT_EQ(coboundary0(rho, AlgebraElement::zero(3)).flatten().norm(), 0.0);
  const AlgebraElement central(Complex(0, 0.8) * CMatrix::Identity(3, 3));
  EXPECT_LT(coboundary0(rho, central).flatten().norm(), 1e-14);
}

TEST(H1, Dimensions) {
  // U(1): n
  const Representation abel = sample_representation(1, 2, 1, 1);
  EXPECT_EQ(h1_basis(abel).dim(), 3);
  // trivial: n N^2
  const Representation triv = trivial_representation(1, 2, 2);
  EXPECT_EQ(h1_basis(triv).dim(), 3 * 4);
  EXPECT_EQ(centralizer_dimension(triv), 4);
  EXPECT_FALSE(is_irreducible(triv));
  // irreducible: n N^2 - N^2 + 1
  for (int n = 2; n <= 3; ++n) {
    const Representation rho = sample_representation(1, 2, n, 20 + static_cast<std::uint64_t>(n));
    EXPECT_EQ(svd_rank(coboundary_matrix(rho)).rank, n * n - 1);
    EXPECT_EQ(h1_basis(rho).dim(), 3 * n * n - n * n + 1);
    EXPECT_EQ(centralizer_dimension(rho), 1);
    EXPECT_TRUE(is_irreducible(rho));
  }
  EXPECT_TRUE(is_irreducible(trivial_representation(0, 2, 1)));
}

TEST(H1, SvdAndQrRanksAgree) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 1 + static_cast<int>(seed % 3);
    const Representation rho = sample_representation(static_cast<int>(seed % 2), 1 + static_cast<int>(seed % 3), n, seed);
    const RMatrix d0 = coboundary_matrix(rho);
    EXPECT_EQ(svd_rank(d0).rank, qr_rank(d0));
    const RMatrix res = restriction_matrix(rho);
    EXPECT_EQ(svd_rank(res).rank, qr_rank(res));
  }
  const RMatrix d0 = coboundary_matrix(diagonal_u2_torus());
  EXPECT_EQ(svd_rank(d0).rank, qr_rank(d0));
}

TEST(Peripheral, CoboundariesRestrictToZeroClass) {
  const Representation rho = sample_representation(1, 3, 2, 9);
  std::mt19937_64 rng(3);
  const Cochain1 dx = coboundary0(rho, random_algebra(2, rng));
  for (int j = 0; j < 3; ++j) EXPECT_LT(peripheral_restriction(rho, dx, j).class_in_coker.norm(), 1e-12);
}

TEST(Peripheral, CentralImageHasFullCokernel) {
  const Representation triv = trivial_representation(1, 2, 2);
  std::mt19937_64 rng(4);
  const Cochain1 u = random_cochain(triv, rng);
  for (int j = 0; j < 2; ++j) {
    EXPECT_EQ(peripheral_cokernel(triv, j).dim(), 4);
    const auto pr = peripheral_restriction(triv, u, j);
    EXPECT_NEAR(pr.class_in_coker.norm(), pr.value.norm(), 1e-12);
  }
}

TEST(Peripheral, CokernelDimensionMatchesClass) {
  const Representation& rho = canonical_point();
  for (int j = 0; j < 4; ++j)
    EXPECT_EQ(peripheral_cokernel(rho, j).dim(), 4 - rho.surface().classes[static_cast<std::size_t>(j)].class_dimension());
}

TEST(Tangent, CanonicalU2IsTwoDimensional) {
  const Representation& rho = canonical_point();
  const Subspace t = parabolic_tangent_basis(rho);
  EXPECT_EQ(t.dim(), 2);
  EXPECT_EQ(expected_dimension(rho.surface(), centralizer_dimension(rho)), 2);
  EXPECT_EQ(relative_h2_dim(rho), 0);
  EXPECT_LT((t.basis.transpose() * t.basis - RMatrix::Identity(2, 2)).norm(), 1e-10);
  // Tangent vectors restrict to zero classes and are orthogonal to coboundaries.
  std::mt19937_64 rng(5);
  const Cochain1 u = random_tangent(rho, t, rng);
  for (int j = 0; j < 4; ++j) EXPECT_LT(peripheral_restriction(rho, u, j).class_in_coker.norm(), 1e-9);
  EXPECT_LT((coboundary_matrix(rho).transpose() * t.basis).norm(), 1e-10);
}

TEST(Tangent, AbelianTorus) {
  const Representation rho(surface(1, 1, 1, {{0.0}}),
                           {UnitaryElement(CMatrix::Constant(1, 1, std::polar(1.0, 0.3))),
                            UnitaryElement(CMatrix::Constant(1, 1, std::polar(1.0, -1.2))),
                            UnitaryElement::identity(1)});
  EXPECT_EQ(parabolic_tangent_basis(rho).dim(), 2);
  EXPECT_EQ(expected_dimension(rho.surface(), 1), 2);
}

TEST(RelativeH2, Examples) {
  EXPECT_EQ(relative_h2_dim(canonical_point()), 0);
  // U(1), g = 0, r = 2, (theta, -theta): the full cokernel is the central line.
  const double th = 0.9;
  const Representation abel(surface(0, 2, 1, {{th}, {-th}}),
                            {UnitaryElement(CMatrix::Constant(1, 1, std::polar(1.0, th))),
                             UnitaryElement(CMatrix::Constant(1, 1, std::polar(1.0, -th)))});
  const RelativeH2 h2 = relative_h2(abel);
  EXPECT_EQ(h2.full, 1);
  EXPECT_EQ(h2.traceless, 0);
  EXPECT_EQ(cone_h2_trivial_rank(0, 3), 1);
  EXPECT_EQ(cone_h2_trivial_rank(1, 1), 1);
  EXPECT_EQ(cone_h2_trivial_rank(2, 5), 1);
  // Trivial U(2) on the once-punctured torus: full u(2) peripheral cokernel,
  // zero restriction, so the traceless part is su(2).
  EXPECT_EQ(relative_h2_dim(trivial_representation(1, 1, 2)), 3);
}

TEST(Irreducibility, DiagonalSumIsReducible) {
  const Representation rho = diagonal_u2_torus();
  EXPECT_EQ(commutant_dimension(rho), 2);
  EXPECT_EQ(centralizer_dimension(rho), 2);
  EXPECT_FALSE(is_irreducible(rho));
}

TEST(ExpectedDimension, Examples) {
  EXPECT_EQ(expected_dimension(surface(1, 1, 1, {{0.0}}), 1), 2);
  EXPECT_EQ(expected_dimension(canonical_u2(), 1), 2);
  EXPECT_EQ(expected_dimension(surface(0, 3, 1, {{1.0}, {2.0}, {kTwoPi - 3.0}}), 1), 0);
}

TEST(Gauge, SubspacesAreInvariant) {
  std::mt19937_64 rng(6);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Representation rho = sample_representation(1, 2, 2, 100 + seed);
    const UnitaryElement g = random_unitary(2, rng);
    const Representation rho_g = rho.conjugated(g);
    const RMatrix a = gauge_action(rho, g);
    const Subspace h1 = h1_basis(rho), h1g = h1_basis(rho_g);
    const Subspace t = parabolic_tangent_basis(rho), tg = parabolic_tangent_basis(rho_g);
    ASSERT_EQ(h1.dim(), h1g.dim());
    ASSERT_EQ(t.dim(), tg.dim());
    EXPECT_LT((a * h1.projector() * a.transpose() - h1g.projector()).norm(), 1e-8);
    EXPECT_LT((a * t.projector() * a.transpose() - tg.projector()).norm(), 1e-8);
    EXPECT_EQ(relative_h2_dim(rho), relative_h2_dim(rho_g));
  }
}

TEST(Analyze, CanonicalReport) {
  const AnalysisReport rep = analyze(canonical_point());
  EXPECT_EQ(rep.tangent_dim, 2);
  EXPECT_EQ(rep.expected_dim, 2);
  EXPECT_TRUE(rep.smooth);
  EXPECT_TRUE(rep.irreducible);
  EXPECT_EQ(rep.centralizer_dim, 1);
  EXPECT_EQ(rep.h1_dim, 3 * 4 - 4 + 1);
  ASSERT_EQ(rep.property_p.size(), 4u);
  for (bool p : rep.property_p) EXPECT_TRUE(p);
  EXPECT_GT(rep.spectral_gaps.at("tangent").ratio(), 1e3);
}
