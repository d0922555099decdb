#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "extkit/errors.hpp"
#include "extkit/gamma.hpp"

namespace {

using extkit::gamma_eval;
using extkit::GammaParams;
using extkit::tagged_trig;

constexpr double kPi = std::numbers::pi;

TEST(TaggedTrig, LinearCase) {
  const auto t = tagged_trig(0.0, 1.7);
  EXPECT_DOUBLE_EQ(t.s, 1.7);
  EXPECT_DOUBLE_EQ(t.c, 1.0);
  EXPECT_DOUBLE_EQ(t.t, 1.7);
}

TEST(TaggedTrig, TangentPoleIsAnError) {
  EXPECT_NEAR(extkit::tagged_sin(1.0, kPi / 2), 1.0, 1e-15);
  EXPECT_NEAR(extkit::tagged_cos(1.0, kPi / 2), 0.0, 1e-15);
  EXPECT_THROW(extkit::tagged_tan(1.0, kPi / 2), extkit::PoleError);
  EXPECT_THROW(tagged_trig(1.0, kPi / 2), extkit::PoleError);
}

TEST(TaggedTrig, HyperbolicCase) {
  const auto t = tagged_trig(-4.0, 0.3);
  EXPECT_NEAR(t.s, std::sinh(0.6) / 2, 1e-15);
  EXPECT_NEAR(t.c, std::cosh(0.6), 1e-15);
  EXPECT_NEAR(t.t, std::tanh(0.6) / 2, 1e-15);
}

TEST(TaggedTrig, PythagoreanIdentity) {
  for (double kappa : {2.5, 1.0, 0.0, -0.3, -4.0})
    for (double x = -2.0; x <= 2.0; x += 0.01) {
      const double s = extkit::tagged_sin(kappa, x), c = extkit::tagged_cos(kappa, x);
      EXPECT_NEAR(c * c + kappa * s * s, 1.0, 1e-12 * std::max(1.0, c * c));
    }
}

TEST(Gamma, LinearWhenCIsZero) {
  const auto g = gamma_eval(GammaParams(0.0, 2.0), 3.0);
  EXPECT_DOUBLE_EQ(g.value, -6.0);
  EXPECT_DOUBLE_EQ(g.d1, -2.0);
  EXPECT_DOUBLE_EQ(g.d2, 0.0);
}

TEST(Gamma, ReciprocalWhenKappaIsZero) {
  const auto g = gamma_eval(GammaParams(1.0, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(g.value, 0.5);
  EXPECT_DOUBLE_EQ(g.d1, -0.25);
  EXPECT_DOUBLE_EQ(g.d2, 0.25);
}

TEST(Gamma, CotangentWhenKappaIsOne) {
  const auto g = gamma_eval(GammaParams(1.0, 1.0), kPi / 4);
  EXPECT_NEAR(g.value, 1.0, 1e-15);
  EXPECT_NEAR(g.d1, -2.0, 1e-15);
  EXPECT_NEAR(g.d2, 4.0, 1e-14);
}

TEST(Gamma, PoleIsAnError) {
  EXPECT_THROW(gamma_eval(GammaParams(1.0, 1.0), 0.0), extkit::PoleError);
  EXPECT_THROW(gamma_eval(GammaParams(1.0, 1.0), kPi), extkit::PoleError);
  EXPECT_THROW(gamma_eval(GammaParams(1.0, 0.0), 0.0), extkit::PoleError);
  EXPECT_THROW(gamma_eval(GammaParams(1.0, 1.0, 0.5), 0.5), extkit::PoleError);
}

TEST(Gamma, OffsetTranslatesU) {
  const auto a = gamma_eval(GammaParams(1.0, -1.0, 0.4), 1.1);
  const auto b = gamma_eval(GammaParams(1.0, -1.0), 0.7);
  EXPECT_NEAR(a.value, b.value, 1e-14);
  EXPECT_NEAR(a.d1, b.d1, 1e-14);
}

struct Regime {
  double c;
  double big_c;
};

class GammaRegime : public ::testing::TestWithParam<Regime> {};

TEST_P(GammaRegime, SolvesTheOde) {
  const auto [c, big_c] = GetParam();
  const GammaParams params(c, big_c);
  int used = 0;
  for (int i = 0; i < 1000; ++i) {
    const double u = -3.0 + 6.0 * (i + 0.5) / 1000.0;
    extkit::GammaValue g{};
    try {
      g = gamma_eval(params, u);
    } catch (const extkit::PoleError&) {
      continue;
    }
    if (std::abs(g.value) > 1e3) continue;
    ++used;
    EXPECT_LE(std::abs(g.d1 + c * g.value * g.value + big_c), 1e-12 * std::max(1.0, g.value * g.value))
        << "u = " << u;
  }
  EXPECT_GT(used, 900);
}

TEST_P(GammaRegime, SecondDerivativeMatchesFiniteDifference) {
  const auto [c, big_c] = GetParam();
  const GammaParams params(c, big_c);
  const double h = 1e-5;
  for (double u : {0.37, 0.81, 1.23, -0.66, 2.1}) {
    extkit::GammaValue g{}, gp{}, gm{};
    try {
      g = gamma_eval(params, u);
      gp = gamma_eval(params, u + h);
      gm = gamma_eval(params, u - h);
    } catch (const extkit::PoleError&) {
      continue;
    }
    const double fd = (gp.d1 - gm.d1) / (2 * h);
    EXPECT_LE(std::abs(fd - g.d2), 1e-6 * std::max(1.0, std::abs(g.d2))) << "u = " << u;
  }
}

INSTANTIATE_TEST_SUITE_P(AllRegimes, GammaRegime,
                         ::testing::Values(Regime{0, 1}, Regime{1, 0}, Regime{1, 1}, Regime{1, -1},
                                           Regime{-1, 1}, Regime{2, 3}));

}  // namespace
