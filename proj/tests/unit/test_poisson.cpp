#include <cmath>

#include <gtest/gtest.h>

#include "extkit/catalog.hpp"
#include "extkit/integrate.hpp"
#include "extkit/poisson.hpp"
#include "extkit/sampling.hpp"
#include "extkit/verify.hpp"
#include "fixtures.hpp"

namespace {

using extkit::apply_XL;
using extkit::apply_XL2;
using extkit::bracket;
using extkit::HamiltonianSystem;
using extkit::PhasePoint;
using extkit::PoissonStructure;
using extkit::ScalarField;

ScalarField coord(std::size_t dim, std::size_t i) { return ScalarField::coordinate(dim, i); }

TEST(Bracket, CanonicalPair) {
  const PoissonStructure pi = PoissonStructure::canonical(2);
  EXPECT_DOUBLE_EQ(bracket(pi, coord(2, 0), coord(2, 1), PhasePoint{0.3, -0.7}), 1.0);
  EXPECT_DOUBLE_EQ(bracket(pi, coord(2, 1), coord(2, 0), PhasePoint{0.3, -0.7}), -1.0);
}

TEST(Bracket, EulerTopStructure) {
  const auto euler = extkit::instantiate("euler_top").system;
  const PhasePoint x{0.2, -0.5, 0.9};
  EXPECT_NEAR(bracket(euler.structure, coord(3, 0), coord(3, 1), x), -0.9, 1e-15);
  EXPECT_NEAR(bracket(euler.structure, coord(3, 1), coord(3, 2), x), -0.2, 1e-15);
  EXPECT_NEAR(bracket(euler.structure, coord(3, 2), coord(3, 0), x), 0.5, 1e-15);
}

TEST(Bracket, LotkaVolterraStructure) {
  const auto lv = extkit::instantiate("lotka_volterra").system;
  const PhasePoint x{1.3, 0.7};
  const double expected = -std::pow(1.3, 2.0) * std::pow(0.7, 2.0) * std::exp(-0.7 - 1.3);
  EXPECT_NEAR(bracket(lv.structure, coord(2, 0), coord(2, 1), x), expected, 1e-14);
}

TEST(Bracket, Antisymmetric) {
  const auto euler = extkit::instantiate("euler_top").system;
  auto f = ScalarField::real(3, [](auto x) { return x[0] * x[1] + sin(x[2]); });
  auto g = ScalarField::real(3, [](auto x) { return x[2] * x[2] * x[0] - x[1]; });
  extkit::UniformStream rng(3);
  for (int i = 0; i < 20; ++i) {
    const PhasePoint x{rng.next(-1, 1), rng.next(-1, 1), rng.next(-1, 1)};
    EXPECT_NEAR(bracket(euler.structure, f, g, x), -bracket(euler.structure, g, f, x), 1e-14);
  }
}

TEST(Bracket, StructureRejectsNonAntisymmetricRule) {
  auto bad = PoissonStructure::custom(2, [](auto x) {
    using S = std::remove_cvref_t<decltype(x[0])>;
    extkit::Bivector<S> m(2, 0.0 * x[0]);
    m(0, 1) = 1.0 + 0.0 * x[0];
    m(1, 0) = 1.0 + 0.0 * x[0];
    return m;
  });
  const std::vector<double> x = {0.0, 0.0};
  EXPECT_THROW(bad.at(x), extkit::DomainError);
}

TEST(ApplyXL, FreeParticle) {
  auto l = ScalarField::real(2, [](auto x) { return 0.5 * x[1] * x[1]; });
  const HamiltonianSystem sys(PoissonStructure::canonical(2), l);
  EXPECT_DOUBLE_EQ(apply_XL(sys, coord(2, 0), PhasePoint{1.0, 3.0}), 3.0);
  EXPECT_DOUBLE_EQ(apply_XL(sys, l, PhasePoint{1.0, 3.0}), 0.0);
}

TEST(ApplyXL, CasimirIsInvariant) {
  const auto euler = extkit::instantiate("euler_top").system;
  const ScalarField& m = euler.observables.at("M");
  EXPECT_NEAR(apply_XL(euler, m, PhasePoint{0.3, -0.4, 0.8}), 0.0, 1e-15);
  EXPECT_NEAR(apply_XL(euler, euler.hamiltonian, PhasePoint{0.3, -0.4, 0.8}), 0.0, 1e-15);
}

TEST(ApplyXL2, HarmonicOscillator) {
  const auto sys = extkit::testing::harmonic_oscillator(2.0);
  EXPECT_NEAR(apply_XL2(sys, coord(2, 0), PhasePoint{1.0, 0.0}), -4.0, 1e-14);
  EXPECT_NEAR(apply_XL2(sys, coord(2, 0), PhasePoint{0.3, 0.5}), -1.2, 1e-14);
  EXPECT_DOUBLE_EQ(apply_XL2(sys, ScalarField::constant(2, 7.0), PhasePoint{0.3, 0.5}), 0.0);
}

TEST(ApplyXL2, Quartic1G) {
  const auto inst = extkit::instantiate("quartic1");
  const auto& sys = inst.system;
  const ScalarField& g = inst.g_solutions.front().g;
  extkit::UniformStream rng(9);
  for (int i = 0; i < 20; ++i) {
    const PhasePoint x{rng.next(-1.5, 1.5), rng.next(-1.5, 1.5)};
    const double l = extkit::eval_value(sys.hamiltonian, x);
    const double expect = -2.0 * (l + 1.0) * extkit::eval_value(g, x);
    EXPECT_NEAR(apply_XL2(sys, g, x), expect, 1e-11 * (1.0 + std::abs(expect)));
  }
}

TEST(ApplyXL2, MatchesFiniteDifferenceAlongFlow) {
  const auto euler = extkit::instantiate("euler_top").system;
  auto f = ScalarField::real(3, [](auto x) { return x[0] * x[1] + x[2] * x[2] * x[2]; });
  const std::vector<double> x0 = {0.4, -0.6, 0.5};
  const double h = 1e-3;
  const auto flow = extkit::base_flow(euler);
  const auto fwd = extkit::rk4(flow, x0, h, h / 10).states.back();
  const auto bwd = extkit::rk4([&](std::span<const double> y) {
                                 auto v = flow(y);
                                 for (double& e : v) e = -e;
                                 return v;
                               },
                               x0, h, h / 10)
                       .states.back();
  const double f0 = extkit::eval_value(f, PhasePoint(x0));
  const double fd = (extkit::eval_value(f, PhasePoint(fwd)) - 2 * f0 +
                     extkit::eval_value(f, PhasePoint(bwd))) /
                    (h * h);
  EXPECT_NEAR(apply_XL2(euler, f, PhasePoint(x0)), fd, 1e-5);
}

TEST(Jacobi, EulerAndLotkaVolterra) {
  const auto euler = extkit::instantiate("euler_top").system;
  const auto lv = extkit::instantiate("lotka_volterra").system;
  auto f3 = ScalarField::real(3, [](auto x) { return x[0] * x[1] + x[2]; });
  auto g3 = ScalarField::real(3, [](auto x) { return x[1] * x[2] * x[2]; });
  auto h3 = ScalarField::real(3, [](auto x) { return exp(x[0]) - x[1] * x[1]; });
  auto f2 = ScalarField::real(2, [](auto x) { return x[0] * x[1]; });
  auto g2 = ScalarField::real(2, [](auto x) { return x[0] * x[0] + x[1]; });
  auto h2 = ScalarField::real(2, [](auto x) { return log(x[1]) * x[0]; });
  extkit::UniformStream rng(17);
  for (int i = 0; i < 20; ++i) {
    const PhasePoint x3{rng.next(-1, 1), rng.next(-1, 1), rng.next(-1, 1)};
    EXPECT_LT(std::abs(extkit::jacobi_residual(euler.structure, f3, g3, h3, x3)), 1e-12);
    const PhasePoint x2{rng.next(0.2, 3.0), rng.next(0.2, 3.0)};
    EXPECT_LT(std::abs(extkit::jacobi_residual(lv.structure, f2, g2, h2, x2)), 1e-12);
  }
}

TEST(ExtendStructure, BlockLayout) {
  const auto euler = extkit::instantiate("euler_top").system;
  const PoissonStructure ext = extkit::extend_structure(euler.structure);
  ASSERT_EQ(ext.dim(), 5u);
  EXPECT_EQ(ext.kind(), extkit::StructureKind::custom);
  const std::vector<double> x = {0.7, -0.2, 0.2, -0.5, 0.9};
  const auto m = ext.at(x);
  EXPECT_EQ(m(0, 1), 1.0);
  EXPECT_EQ(m(1, 0), -1.0);
  EXPECT_EQ(m(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(m(2, 3), -0.9);
  EXPECT_DOUBLE_EQ(m(3, 4), -0.2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 2; j < 5; ++j) {
      EXPECT_EQ(m(i, j), 0.0);
      EXPECT_EQ(m(j, i), 0.0);
    }
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(m(i, j), -m(j, i));
}

TEST(ExtendStructure, CanonicalBaseStaysConstant) {
  const PoissonStructure ext = extkit::extend_structure(PoissonStructure::canonical(2));
  EXPECT_TRUE(ext.is_constant());
  const std::vector<double> x = {0.0, 0.0, 0.0, 0.0};
  const auto m = ext.at(x);
  EXPECT_EQ(m(0, 1), 1.0);
  EXPECT_EQ(m(2, 3), 1.0);
  EXPECT_EQ(m(3, 2), -1.0);
  EXPECT_EQ(m(0, 2), 0.0);
}

}  // namespace
