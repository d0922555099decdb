#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "extkit/catalog.hpp"
#include "extkit/diffkit.hpp"
#include "extkit/sampling.hpp"
#include "extkit/verify.hpp"
#include "fixtures.hpp"

namespace {

using extkit::cplx;
using extkit::eval_jet2;
using extkit::Jet2;
using extkit::PhasePoint;
using extkit::ScalarField;
using extkit::testing::fd_gradient;
using extkit::testing::fd_hessian;
using extkit::testing::rel_diff;

TEST(Jet2, SquareAtThree) {
  auto f = ScalarField::real(1, [](auto x) { return x[0] * x[0]; });
  const Jet2<double> j = eval_jet2<double>(f, PhasePoint{3.0});
  EXPECT_DOUBLE_EQ(j.value(), 9.0);
  EXPECT_DOUBLE_EQ(j.grad(0), 6.0);
  EXPECT_DOUBLE_EQ(j.hess(0, 0), 2.0);
}

TEST(Jet2, ConstantHasZeroDerivatives) {
  const ScalarField f = ScalarField::constant(3, 5.0);
  const Jet2<double> j = eval_jet2<double>(f, PhasePoint{0.3, -1.0, 2.0});
  EXPECT_EQ(j.value(), 5.0);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(j.grad(i), 0.0);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(j.hess(i, k), 0.0);
  }
}

TEST(Jet2, ExpOfProduct) {
  auto f = ScalarField::real(2, [](auto x) { return exp(x[0] * x[1]); });
  const Jet2<double> j = eval_jet2<double>(f, PhasePoint{1.0, 2.0});
  const double e2 = std::exp(2.0);
  EXPECT_NEAR(j.value(), e2, 1e-14 * e2);
  EXPECT_NEAR(j.grad(0), 2 * e2, 1e-14 * e2);
  EXPECT_NEAR(j.grad(1), e2, 1e-14 * e2);
  EXPECT_NEAR(j.hess(0, 0), 4 * e2, 1e-14 * e2);
  EXPECT_NEAR(j.hess(0, 1), 3 * e2, 1e-14 * e2);
  EXPECT_NEAR(j.hess(1, 0), 3 * e2, 1e-14 * e2);
  EXPECT_NEAR(j.hess(1, 1), e2, 1e-14 * e2);
}

TEST(Jet2, ExpOfProductAgreesWithFiniteDifferences) {
  auto f = ScalarField::real(2, [](auto x) { return exp(x[0] * x[1]); });
  const PhasePoint x{1.0, 2.0};
  const auto value = [&](std::span<const double> y) {
    return extkit::eval_value<double>(f, PhasePoint(std::vector<double>(y.begin(), y.end())));
  };
  const Jet2<double> j = eval_jet2<double>(f, x);
  EXPECT_LT(rel_diff(j.gradient(), fd_gradient(value, x.span(), 1e-5)), 1e-9);
}

TEST(Jet2, LeibnizRuleOnRandomPolynomials) {
  extkit::UniformStream rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = rng.next(-2, 2), b = rng.next(-2, 2), c = rng.next(-2, 2);
    auto f = ScalarField::real(3, [=](auto x) { return a * x[0] * x[1] + b * x[2] * x[2] * x[0] + c; });
    auto g = ScalarField::real(3, [=](auto x) { return x[1] * x[1] * x[1] - c * x[0] * x[2] + a; });
    const ScalarField fg = f * g;
    const PhasePoint x{rng.next(-1, 1), rng.next(-1, 1), rng.next(-1, 1)};
    const Jet2<double> jf = eval_jet2<double>(f, x), jg = eval_jet2<double>(g, x);
    const Jet2<double> jp = eval_jet2<double>(fg, x);
    std::vector<double> expect_grad(3), expect_hess(9);
    for (std::size_t i = 0; i < 3; ++i) {
      expect_grad[i] = jf.grad(i) * jg.value() + jf.value() * jg.grad(i);
      for (std::size_t k = 0; k < 3; ++k)
        expect_hess[i * 3 + k] = jf.hess(i, k) * jg.value() + jf.grad(i) * jg.grad(k) +
                                 jf.grad(k) * jg.grad(i) + jf.value() * jg.hess(i, k);
    }
    EXPECT_NEAR(jp.value(), jf.value() * jg.value(), 1e-12 * (1 + std::abs(jp.value())));
    EXPECT_LT(rel_diff(jp.gradient(), expect_grad, 1.0), 1e-12);
    EXPECT_LT(rel_diff(jp.hessian(), expect_hess, 1.0), 1e-12);
  }
}

TEST(Jet2, ComplexFieldOnRealCoordinates) {
  auto f = ScalarField::complex(2, [](auto x) {
    return exp(extkit::to_complex(x[0]) * cplx(0.0, 1.0)) * extkit::to_complex(x[1]);
  });
  const Jet2<cplx> j = eval_jet2<cplx>(f, PhasePoint{0.7, 2.0});
  const cplx e = std::exp(cplx(0.0, 0.7));
  EXPECT_LT(std::abs(j.value() - 2.0 * e), 1e-14);
  EXPECT_LT(std::abs(j.grad(0) - cplx(0.0, 2.0) * e), 1e-14);
  EXPECT_LT(std::abs(j.grad(1) - e), 1e-14);
  EXPECT_LT(std::abs(j.hess(0, 0) + 2.0 * e), 1e-14);
  EXPECT_LT(std::abs(j.hess(0, 1) - cplx(0.0, 1.0) * e), 1e-14);
  EXPECT_THROW(eval_jet2<double>(f, PhasePoint{0.7, 2.0}), extkit::Error);
}

TEST(Jet2, PrincipalBranchOfLog) {
  auto f = ScalarField::complex(1, [](auto x) { return log(extkit::to_complex(x[0])); });
  const cplx v = extkit::eval_value<cplx>(f, PhasePoint{-2.0});
  EXPECT_NEAR(v.real(), std::log(2.0), 1e-15);
  EXPECT_NEAR(v.imag(), std::numbers::pi, 1e-15);
}

TEST(Jet2, Errors) {
  auto f = ScalarField::real(
      2, [](auto x) { return 1.0 / x[0] + x[1]; },
      extkit::SingularSet([](std::span<const double> x, double m) { return std::abs(x[0]) <= m; }));
  EXPECT_THROW(eval_jet2<double>(f, PhasePoint{0.0, 1.0}), extkit::SingularPointError);
  EXPECT_THROW(eval_jet2<double>(f, PhasePoint{1.0}), extkit::DimensionError);
  auto g = ScalarField::real(1, [](auto x) { return log(x[0]); });
  EXPECT_THROW(eval_jet2<double>(g, PhasePoint{-1.0}), extkit::NonFiniteError);
  EXPECT_THROW(ScalarField::constant(extkit::kMaxJetDim + 1, 1.0), extkit::DimensionError);
}

// Every catalog L and G: jet derivatives against central differences.
TEST(Jet2, CatalogFieldsAgreeWithFiniteDifferences) {
  for (const extkit::EntryInfo& info : extkit::list_entries()) {
    SCOPED_TRACE(info.id);
    // A slower phase keeps the vortex G within reach of the difference stencil.
    const extkit::ParamMap params =
        info.id == "vortex_opposite" ? extkit::ParamMap{{"c0", 0.005}} : extkit::ParamMap{};
    const extkit::Instance inst = extkit::instantiate(info.id, params, {.run_gate = false});
    std::vector<ScalarField> fields = {inst.system.hamiltonian};
    for (const extkit::GSolution& g : inst.g_solutions) {
      fields.push_back(g.g.real_part());
      if (g.g.is_complex()) fields.push_back(g.g.imag_part());
    }
    extkit::SampleSpec spec = inst.sample_spec;
    spec.count = 100;
    spec.seed = 5;
    spec.margin = std::max(spec.margin, 0.3);
    const auto& sys = inst.system;
    const auto excluded = inst.g_solutions.empty()
                              ? extkit::SingularPredicate([&](std::span<const double> x, double m) {
                                  return sys.singular_at(x, m);
                                })
                              : extkit::sampling_exclusion(sys, inst.g_solutions.front());
    const auto points = extkit::sample_points(spec, excluded).points;
    ASSERT_EQ(points.size(), 100u);
    for (const ScalarField& f : fields) {
      const auto value = [&](std::span<const double> y) {
        return extkit::eval_value<double>(f, PhasePoint(std::vector<double>(y.begin(), y.end())));
      };
      double grad_err = 0.0, hess_err = 0.0;
      for (const PhasePoint& x : points) {
        const Jet2<double> j = eval_jet2<double>(f, x);
        grad_err = std::max(grad_err, rel_diff(j.gradient(), fd_gradient(value, x.span(), 1e-5), 1.0));
        hess_err = std::max(hess_err, rel_diff(j.hessian(), fd_hessian(value, x.span(), 1e-4), 1.0));
      }
      EXPECT_LT(grad_err, 1e-6);
      EXPECT_LT(hess_err, 1e-4);
    }
  }
}

}  // namespace
