#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "derivation_algebra.hpp"
#include "extkit/catalog.hpp"
#include "extkit/errors.hpp"
#include "extkit/extension.hpp"
#include "extkit/sampling.hpp"
#include "fixtures.hpp"

namespace {

using extkit::ExtDerivValue;
using extkit::ExtendedState;
using extkit::ExtensionParams;
using extkit::PhasePoint;
using extkit::testing::harmonic_g;
using extkit::testing::harmonic_oscillator;
using extkit::testing::Poly;
using extkit::testing::rel_err;

using Values = std::array<double, extkit::testing::kVarCount>;

TEST(SeedPair, HarmonicOscillator) {
  const auto sys = harmonic_oscillator(2.0);
  const auto seed = extkit::seed_pair(sys, harmonic_g(2.0), PhasePoint{1.0, 3.0});
  EXPECT_DOUBLE_EQ(seed.g.value, 1.0);
  EXPECT_DOUBLE_EQ(seed.g.xl, 3.0);
  EXPECT_DOUBLE_EQ(seed.l, 6.5);
}

TEST(Gn, SmallIndices) {
  const ExtDerivValue<double> seed{2.0, 3.0};
  const double lambda = 0.5;
  const auto g1 = extkit::gn_closed(1, seed, lambda);
  EXPECT_DOUBLE_EQ(g1.value, 2.0);
  EXPECT_DOUBLE_EQ(g1.xl, 3.0);
  // G_2 = 2 G XG, X_L G_2 = 2 XG^2 - 4 lambda G^2.
  const auto g2 = extkit::gn_closed(2, seed, lambda);
  EXPECT_DOUBLE_EQ(g2.value, 12.0);
  EXPECT_DOUBLE_EQ(g2.xl, 10.0);
  // G_3 = 3 G XG^2 - 2 lambda G^3.
  const auto g3 = extkit::gn_closed(3, seed, lambda);
  EXPECT_DOUBLE_EQ(g3.value, 46.0);
  const auto r3 = extkit::gn_recursive(3, seed, lambda);
  EXPECT_NEAR(r3.value, g3.value, 1e-13);
  EXPECT_NEAR(r3.xl, g3.xl, 1e-13);
  EXPECT_THROW(extkit::gn_closed(0, seed, lambda), extkit::ConstraintError);
}

TEST(Gn, ClosedFormMatchesExactRecursion) {
  extkit::UniformStream rng(23);
  for (int n = 1; n <= 8; ++n) {
    const Poly gn = extkit::testing::gn_oracle(n);
    for (int trial = 0; trial < 20; ++trial) {
      Values v{};
      v[extkit::testing::kG] = rng.next(-2, 2);
      v[extkit::testing::kXG] = rng.next(-2, 2);
      v[extkit::testing::kLambda] = rng.next(-2, 2);
      const auto got = extkit::gn_closed(n, ExtDerivValue<double>{v[0], v[1]}, v[2]);
      const auto rec = extkit::gn_recursive(n, ExtDerivValue<double>{v[0], v[1]}, v[2]);
      std::array<std::complex<double>, extkit::testing::kVarCount> cv{};
      for (std::size_t i = 0; i < cv.size(); ++i) cv[i] = v[i];
      const double scale = gn.magnitude(cv) + gn.derive().magnitude(cv);
      EXPECT_LE(std::abs(got.value - gn.eval(v)), 1e-13 * scale);
      EXPECT_LE(std::abs(got.xl - gn.derive().eval(v)), 1e-13 * scale);
      EXPECT_LE(std::abs(rec.value - gn.eval(v)), 1e-13 * scale);
    }
  }
}

TEST(PDCoeffs, FirstPower) {
  const auto pd = extkit::pd_coeffs(2, 3, 1, 0.7, 1.5, 0.4);
  EXPECT_DOUBLE_EQ(pd.p, 0.7);
  EXPECT_DOUBLE_EQ(pd.d, 2.0 / 3.0 * 1.5 / 3.0);
}

TEST(PDCoeffs, SecondPower) {
  // beta = 2, mu = -1: P = p_u^2 + beta^2 mu, D = 2 beta p_u / n.
  const auto pd = extkit::pd_coeffs(2, 1, 2, 3.0, 1.0, 0.5);
  EXPECT_DOUBLE_EQ(pd.p, 9.0 - 4.0);
  EXPECT_DOUBLE_EQ(pd.d, 12.0);
}

TEST(PDCoeffs, ZeroGammaLeavesPowerOfMomentum) {
  const auto pd = extkit::pd_coeffs(5, 2, 4, 1.5, 0.0, 3.0);
  EXPECT_DOUBLE_EQ(pd.p, std::pow(1.5, 4));
  EXPECT_DOUBLE_EQ(pd.d, 0.0);
  EXPECT_THROW(extkit::pd_coeffs(2, 1, 3, 1.0, 1.0, 1.0), extkit::ConstraintError);
}

TEST(PDCoeffs, MatchClosedFormPolynomial) {
  extkit::UniformStream rng(29);
  for (int m = 1; m <= 5; ++m)
    for (int n = 1; n <= 4; ++n)
      for (int r = 0; r <= m; ++r) {
        const Poly exact = extkit::testing::pd_closed_form(m, n, r);
        Values v{};
        for (double& e : v) e = rng.next(-1.5, 1.5);
        const auto gn = extkit::gn_closed(n, ExtDerivValue<double>{v[0], v[1]}, v[2]);
        const auto pd = extkit::pd_coeffs(m, n, r, v[3], v[4], v[2]);
        const double got = pd.p * gn.value + pd.d * gn.xl;
        std::array<std::complex<double>, extkit::testing::kVarCount> cv{};
        for (std::size_t i = 0; i < cv.size(); ++i) cv[i] = v[i];
        EXPECT_LE(std::abs(got - exact.eval(v)), 1e-12 * (1.0 + exact.magnitude(cv)))
            << "m=" << m << " n=" << n << " r=" << r;
      }
}

ExtensionParams harmonic_params(int m, int n, double big_c, double omega = 0.0) {
  ExtensionParams p;
  p.c = 0.0;
  p.c0 = 0.5;
  p.big_c = big_c;
  p.m = m;
  p.n = n;
  p.omega = omega;
  return p;
}

TEST(KChar, FirstIndexIsGammaCorrectedG) {
  // K_{1,1} = p_u G + gamma X_L G.
  const auto sys = harmonic_oscillator(1.0);
  const ExtendedState s{2.0, 0.5, PhasePoint{0.3, -0.4}};
  const double k = extkit::k_char(sys, harmonic_g(1.0), harmonic_params(1, 1, 1.0), s);
  EXPECT_NEAR(k, 0.5 * 0.3 + (-2.0) * (-0.4), 1e-15);
}

TEST(KChar, VanishesWhereGAndItsDerivativeVanish) {
  const auto sys = harmonic_oscillator(1.0);
  const ExtendedState s{1.3, 0.5, PhasePoint{0.0, 0.0}};
  EXPECT_EQ(extkit::k_char(sys, harmonic_g(1.0), harmonic_params(3, 2, 1.0), s), 0.0);
}

TEST(KChar, HarmonicMatchesOperatorOracle) {
  const auto sys = harmonic_oscillator(1.0);
  const ExtendedState s{0.8, -0.6, PhasePoint{0.9, 0.4}};
  const auto params = harmonic_params(2, 1, 1.0);
  const double gam = -0.8;
  const double got = extkit::k_char(sys, harmonic_g(1.0), params, s);
  const Values v{0.9, 0.4, 0.5, -0.6, gam, 0.0};
  const double expected = extkit::testing::k_oracle(2, 1).eval(v);
  EXPECT_LT(rel_err(got, expected), 1e-13);
}

TEST(KbarChar, HarmonicMatchesOperatorOracle) {
  const auto sys = harmonic_oscillator(1.0);
  const ExtendedState s{0.8, -0.6, PhasePoint{0.9, 0.4}};
  const double omega = 0.3, gam = -0.8;
  const auto params = harmonic_params(4, 2, 1.0, omega);
  const double got = extkit::kbar_char(sys, harmonic_g(1.0), params, s);
  const Values v{0.9, 0.4, 0.5, -0.6, gam, 2.0 * omega / (gam * gam)};
  const double expected = extkit::testing::kbar_oracle(2, 2).eval(v);
  EXPECT_LT(rel_err(got, expected), 1e-13);
}

TEST(KbarChar, ReducesToKWithoutOmega) {
  const auto sys = harmonic_oscillator(1.0);
  const ExtendedState s{0.8, -0.6, PhasePoint{0.9, 0.4}};
  for (int m : {1, 2, 3, 4}) {
    const auto params = harmonic_params(m, 1, 1.0);
    EXPECT_NEAR(extkit::kbar_char(sys, harmonic_g(1.0), params, s),
                extkit::k_char(sys, harmonic_g(1.0), params, s), 1e-13);
  }
  EXPECT_THROW(extkit::k_char(sys, harmonic_g(1.0), harmonic_params(2, 1, 1.0, 0.1), s),
               extkit::ConstraintError);
}

TEST(HExtended, WorkedValue) {
  const auto sys = harmonic_oscillator(1.0);
  const ExtendedState s{2.0, 1.0, PhasePoint{std::sqrt(6.0), 0.0}};
  EXPECT_NEAR(extkit::h_extended(sys, harmonic_params(2, 1, 1.0), s), 20.5, 1e-13);
  EXPECT_NEAR(extkit::h_extended(sys, harmonic_params(2, 1, 1.0, 0.4), s), 20.6, 1e-13);
}

TEST(ExtendedFlow, WorkedValue) {
  const auto sys = harmonic_oscillator(1.0);
  const ExtendedState s{2.0, 1.0, PhasePoint{std::sqrt(6.0), 0.0}};
  const ExtendedState rate = extkit::extended_flow(sys, harmonic_params(2, 1, 1.0), s);
  EXPECT_DOUBLE_EQ(rate.u, 1.0);
  EXPECT_NEAR(rate.p_u, -8.0, 1e-14);
  ASSERT_EQ(rate.base.size(), 2u);
  EXPECT_NEAR(rate.base[0], 0.0, 1e-15);
  EXPECT_NEAR(rate.base[1], -4.0 * std::sqrt(6.0), 1e-13);
}

TEST(Params, AutoDoubling) {
  auto p = harmonic_params(3, 2, 1.0, 0.2);
  const auto eff = extkit::effective_params(p);
  EXPECT_EQ(eff.m, 6);
  EXPECT_EQ(eff.n, 4);
  EXPECT_DOUBLE_EQ(eff.k(), p.k());
  EXPECT_EQ(extkit::effective_params(harmonic_params(3, 2, 1.0)).m, 3);
  EXPECT_EQ(extkit::effective_params(harmonic_params(4, 3, 1.0, 0.2)).m, 4);
}

TEST(Params, Validation) {
  auto p = harmonic_params(1, 1, 1.0);
  EXPECT_NO_THROW(extkit::validate(p));
  p.c0 = 0.0;
  EXPECT_THROW(extkit::validate(p), extkit::ConstraintError);
  p = harmonic_params(0, 1, 1.0);
  EXPECT_THROW(extkit::validate(p), extkit::ConstraintError);
  p = harmonic_params(1, 1, 0.0, 0.5);
  EXPECT_THROW(extkit::validate(p), extkit::ConstraintError);
}

TEST(ExtensionBuild, Refusals) {
  const auto sys = harmonic_oscillator(1.0);
  EXPECT_THROW(extkit::Extension::build(sys, harmonic_g(1.0), harmonic_params(1, 1, 1.0)),
               extkit::ConstraintError);
  auto wrong = harmonic_params(1, 1, 1.0);
  wrong.c0 = 0.7;
  EXPECT_THROW(extkit::Extension::build(sys, harmonic_g(1.0), wrong, true),
               extkit::ConstraintError);
  const auto ext = extkit::Extension::build(sys, harmonic_g(1.0), harmonic_params(3, 1, 1.0, 0.1), true);
  EXPECT_TRUE(ext.doubled());
  EXPECT_EQ(ext.params().m, 6);
  EXPECT_EQ(ext.dim(), 4u);
}

TEST(ExtensionBuild, NullSolutionIsRejected) {
  const std::vector<PhasePoint> probes = {{0.0, 1.0}, {0.0, -2.0}};
  EXPECT_THROW(extkit::GSolution::create(extkit::ScalarField::coordinate(2, 0), 0.0, 0.5, "",
                                         extkit::Globality::globally_defined, probes),
               extkit::ConstraintError);
}

TEST(ExtensionBuild, PoleOfGamma) {
  const auto sys = harmonic_oscillator(1.0);
  const auto p = harmonic_params(1, 1, 1.0);
  const ExtendedState s{0.0, 1.0, PhasePoint{0.5, 0.5}};
  auto with_omega = harmonic_params(2, 1, 1.0, 0.3);
  EXPECT_THROW(extkit::h_extended(sys, with_omega, s), extkit::PoleError);
  EXPECT_NO_THROW(extkit::h_extended(sys, p, s));
}

}  // namespace
