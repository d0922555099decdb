#include "extkit/catalog.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <type_traits>

#include "extkit/errors.hpp"
#include "extkit/verify.hpp"

namespace extkit {

namespace {

template <class X>
using elem_t = std::remove_cvref_t<decltype(std::declval<X>()[0])>;

ParamSpec real_param(std::string name, double def, std::string constraint = "") {
  return {std::move(name), ParamKind::real, def, std::move(constraint)};
}

ParamSpec complex_param(std::string name, cplx def, std::string constraint = "") {
  return {std::move(name), ParamKind::complex, def, std::move(constraint)};
}

ParamSpec function_param(std::string name) {
  return {std::move(name), ParamKind::function, FunctionSpec::zero(), "built-in function"};
}

std::vector<Interval> box(std::initializer_list<Interval> ivs) { return ivs; }

std::vector<EntryInfo> build_entries() {
  const double pi = std::numbers::pi;
  std::vector<EntryInfo> out;

  out.push_back({"quartic1", 2, true, "globally defined",
                 "Perfect-square quartic Hamiltonian with linear G = C1 q + C2",
                 {"q", "p"}, {0, 1},
                 {real_param("C1", 1.0, "nonzero"), real_param("C2", 0.0), real_param("C3", 0.0),
                  real_param("c", 1.0, "nonzero"), real_param("c0", 1.0), function_param("f")},
                 box({{-1.5, 1.5}, {-1.5, 1.5}}), 0.05});

  const std::vector<ParamSpec> quartic2_params = {
      real_param("C1", 1.0, "nonzero"), real_param("C2", 3.0), real_param("C3", 1.0),
      real_param("C4", 0.5), real_param("c", 1.0, "nonzero"), real_param("c0", 0.5)};
  out.push_back({"quartic2a", 2, true, "globally defined",
                 "Quartic Hamiltonian p^4 + f p^2 + V with G = (C1 q + C2) p, first branch",
                 {"q", "p"}, {0, 1}, quartic2_params,
                 box({{-1.5, 1.5}, {-1.5, 1.5}}), 0.05});
  out.push_back({"quartic2b", 2, true, "globally defined",
                 "Quartic Hamiltonian p^4 + f p^2 + V with G = (C1 q + C2) p, second branch",
                 {"q", "p"}, {0, 1}, quartic2_params,
                 box({{-1.5, 1.5}, {-1.5, 1.5}}), 0.05});

  out.push_back({"square_polar", 4, true, "globally defined",
                 "Square of a natural Hamiltonian in polar coordinates, c0 = 0",
                 {"q1", "q2", "p1", "p2"}, {0, 1, 2, 3},
                 {real_param("C1", 0.5), real_param("C2", 0.3), real_param("C3", 1.0, "nonzero"),
                  real_param("c", 1.0, "nonzero"), function_param("F")},
                 box({{0.5, 2.0}, {-3.0, 3.0}, {-1.0, 1.0}, {-1.0, 1.0}}), 0.05});

  const std::vector<std::string> vortex_coords = {"X1t", "X2t", "Y1t", "Y2t"};
  const std::vector<std::size_t> vortex_display = {0, 2, 1, 3};
  out.push_back({"vortex_equal", 4, true, "conditionally-single-valued",
                 "Two point vortices of equal intensity k, c = 0", vortex_coords, vortex_display,
                 {real_param("k", 1.0, "positive"), real_param("c0", 0.5, "positive"),
                  complex_param("F1", 1.0), complex_param("F2", 0.0),
                  real_param("alpha", 1.0 / (8.0 * pi), "positive")},
                 box({{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}}), 0.1});
  out.push_back({"vortex_opposite", 4, true, "globally defined",
                 "Two point vortices of opposite intensities k and -k, c = 0", vortex_coords,
                 vortex_display,
                 {real_param("k", 1.0, "positive"), real_param("c0", 0.5, "positive"),
                  complex_param("F1", 1.0), complex_param("F2", 0.0),
                  real_param("alpha", 1.0 / (8.0 * pi), "positive")},
                 box({{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}}), 0.1});

  out.push_back({"lotka_volterra", 2, false, "no-extension",
                 "Lotka-Volterra prey-predator system on a non-canonical bivector", {"x", "y"},
                 {0, 1},
                 {real_param("a", 1.0), real_param("b", 1.0), real_param("d", 1.0),
                  real_param("g", 1.0)},
                 box({{0.2, 3.0}, {0.2, 3.0}}), 0.05});
  out.push_back({"euler_top", 3, false, "no-extension",
                 "Euler rigid body on the Lie-Poisson bivector", {"m1", "m2", "m3"}, {0, 1, 2},
                 {real_param("I1", 1.0, "positive, distinct"),
                  real_param("I2", 2.0, "positive, distinct"),
                  real_param("I3", 3.0, "positive, distinct")},
                 box({{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}}), 0.0});
  return out;
}

ParamMap resolve(const EntryInfo& info, const ParamMap& given) {
  ParamMap out;
  for (const ParamSpec& spec : info.params) out[spec.name] = spec.default_value;
  for (const auto& [name, value] : given) {
    auto it = std::find_if(info.params.begin(), info.params.end(),
                           [&](const ParamSpec& s) { return s.name == name; });
    if (it == info.params.end())
      throw ConstraintError("unknown parameter '" + name + "' for entry '" + info.id + "'");
    switch (it->kind) {
      case ParamKind::real:
        if (std::holds_alternative<FunctionSpec>(value) ||
            (std::holds_alternative<cplx>(value) && std::get<cplx>(value).imag() != 0.0))
          throw ConstraintError("parameter '" + name + "' must be real");
        break;
      case ParamKind::complex:
        if (std::holds_alternative<FunctionSpec>(value))
          throw ConstraintError("parameter '" + name + "' must be a number");
        break;
      case ParamKind::function:
        if (!std::holds_alternative<FunctionSpec>(value))
          throw ConstraintError("parameter '" + name + "' must be a function specification");
        break;
    }
    out[name] = value;
  }
  for (const auto& [name, value] : out) {
    if (const double* d = std::get_if<double>(&value); d && !std::isfinite(*d))
      throw ConstraintError("parameter '" + name + "' must be finite");
    const cplx* z = std::get_if<cplx>(&value);
    if (z && !(std::isfinite(z->real()) && std::isfinite(z->imag())))
      throw ConstraintError("parameter '" + name + "' must be finite");
  }
  return out;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConstraintError(message);
}

// |G| below margin times `scale`: keeps residual sampling away from zeros
// of G, where the relative residual is dominated by rounding.
SingularSet small_g(const ScalarField& g, double scale) {
  return SingularSet([g, scale](std::span<const double> x, double margin) {
    if (margin <= 0.0 || g.singular_at(x)) return false;
    return std::abs(g.raw_value_complex(x)) < margin * scale;
  });
}

GSolution make_g(const EntryInfo& info, ScalarField g, double c, double c0,
                 std::string constraints, Globality globality, SingularSet exclusion) {
  SampleSpec probe{info.sample_box, 16, 1, 0.0};
  const SampleResult probes = sample_points(probe, [&g](std::span<const double> x, double m) {
    return g.singular_at(x, m);
  });
  return GSolution::create(std::move(g), c, c0, std::move(constraints), globality, probes.points,
                           std::move(exclusion));
}

struct Built {
  HamiltonianSystem system;
  std::vector<GSolution> g_solutions;
};

Built build_quartic1(const EntryInfo& info, const ParamMap& p) {
  const double c1 = param_real(p, "C1"), c2 = param_real(p, "C2"), c3 = param_real(p, "C3");
  const double c = param_real(p, "c"), c0 = param_real(p, "c0");
  const FunctionSpec f = param_function(p, "f");
  require(c1 != 0.0, "quartic1 requires C1 != 0");
  require(c != 0.0, "quartic1 requires c != 0 (L contains -c0/c)");

  auto l = ScalarField::real(2, [=](auto x) {
    const auto& q = x[0];
    const auto& mom = x[1];
    const auto fq = f(q);
    const auto s = 16.0 * c1 * mom * mom + 8.0 * c1 * fq * mom + 2.0 * c * c1 * q * q +
                   4.0 * c * c2 * q + c1 * fq * fq + 8.0 * c1 * c3;
    return s * s / (256.0 * c1 * c1) - c0 / c;
  });
  auto g = ScalarField::real(2, [=](auto x) { return c1 * x[0] + c2; });
  Built b{HamiltonianSystem(PoissonStructure::canonical(2), l), {}};
  b.g_solutions.push_back(make_g(info, g, c, c0, "C1 != 0, c != 0", Globality::globally_defined,
                                 small_g(g, std::abs(c1))));
  return b;
}

SingularSet linear_zero(double c1, double c2) {
  return SingularSet([c1, c2](std::span<const double> x, double margin) {
    return std::abs(c1 * x[0] + c2) <= margin * std::abs(c1);
  });
}

Built build_quartic2(const EntryInfo& info, const ParamMap& p, bool second) {
  const double c1 = param_real(p, "C1"), c2 = param_real(p, "C2"), c3 = param_real(p, "C3");
  const double c4 = param_real(p, "C4"), c = param_real(p, "c"), c0 = param_real(p, "c0");
  require(c1 != 0.0, info.id + " requires C1 != 0");
  require(c != 0.0, info.id + " requires c != 0");

  ScalarField l;
  const SingularSet pole = linear_zero(c1, c2);
  if (!second) {
    l = ScalarField::real(
        2,
        [=](auto x) {
          const auto& q = x[0];
          const auto& mom = x[1];
          const auto w = c1 * q + c2;
          const auto f = c * q * q / 16.0 + c * c2 * q / (8.0 * c1) - c3 / (2.0 * c1 * w * w) + c4;
          const auto v = 0.25 * f * f - c0 / c;
          const auto p2 = mom * mom;
          return p2 * p2 + f * p2 + v;
        },
        pole);
  } else {
    l = ScalarField::real(
        2,
        [=](auto x) {
          const auto& q = x[0];
          const auto& mom = x[1];
          const auto w = c1 * q + c2;
          const auto f = c * w * w / (16.0 * c1 * c1) + c3 / (w * w);
          const double c12 = c1 * c1, c13 = c12 * c1, c14 = c13 * c1, c15 = c14 * c1;
          const double c16 = c15 * c1, c17 = c16 * c1;
          const double d2 = c2 * c2, d3 = d2 * c2, d4 = d3 * c2, d5 = d4 * c2, d6 = d5 * c2,
                       d7 = d6 * c2;
          const double cc2 = c * c, cc3 = cc2 * c;
          // Coefficients of the degree-7 polynomial in q, highest first.
          const double a7 = -c17 * cc3;
          const double a6 = -8.0 * c16 * c2 * cc3;
          const double a5 = -28.0 * c15 * d2 * cc3;
          const double a4 = -56.0 * c14 * d3 * cc3;
          const double a3 = -70.0 * c13 * d4 * cc3 + 1024.0 * c0 * c17 - 32.0 * c15 * c3 * cc2;
          const double a2 = 4096.0 * c0 * c16 * c2 - 128.0 * c14 * c2 * c3 * cc2 -
                            56.0 * c12 * d5 * cc3;
          const double a1 = -28.0 * c1 * d6 * cc3 + 6144.0 * c0 * c15 * d2 -
                            192.0 * c13 * d2 * c3 * cc2;
          const double a0 = -8.0 * d7 * cc3 + 4096.0 * c0 * c14 * d3 - 128.0 * c12 * d3 * c3 * cc2;
          auto poly = a7 * q + a6;
          for (double a : {a5, a4, a3, a2, a1, a0}) poly = poly * q + a;
          const auto w2 = w * w;
          const auto v = (c4 - q * poly / (1024.0 * c * c13)) / (w2 * w2);
          const auto p2 = mom * mom;
          return p2 * p2 + f * p2 + v;
        },
        pole);
  }
  auto g = ScalarField::real(2, [=](auto x) { return (c1 * x[0] + c2) * x[1]; });
  Built b{HamiltonianSystem(PoissonStructure::canonical(2), l), {}};
  b.g_solutions.push_back(make_g(info, g, c, c0, "C1 != 0, c != 0; singular at C1 q + C2 = 0",
                                 Globality::globally_defined, small_g(g, std::abs(c1))));
  return b;
}

Built build_square_polar(const EntryInfo& info, const ParamMap& p) {
  const double c1 = param_real(p, "C1"), c2 = param_real(p, "C2"), c3 = param_real(p, "C3");
  const double c = param_real(p, "c");
  const FunctionSpec big_f = param_function(p, "F");
  require(c3 != 0.0, "square_polar requires C3 != 0");
  require(c != 0.0, "square_polar requires c != 0 (c0 is fixed to 0)");

  const SingularSet axis([](std::span<const double> x, double margin) {
    return std::abs(x[0]) <= margin;
  });
  auto l = ScalarField::real(
      4,
      [=](auto x) {
        const auto& q1 = x[0];
        const auto& q2 = x[1];
        const auto s = sin(q2);
        const auto co = cos(q2);
        const auto v = c / (8.0 * c3 * c3) *
                           (2.0 * c2 * c3 * q1 * q1 * co * s + (c3 * c3 - c2 * c2) * q1 * q1 * co * co) +
                       c * c1 / (4.0 * c3) * q1 * co + big_f((s * c3 - co * c2) * q1);
        const auto n = x[2] * x[2] + x[3] * x[3] / (q1 * q1) + v;
        return n * n;
      },
      axis);
  auto g = ScalarField::real(4, [=](auto x) {
    return (sin(x[1]) * c2 + cos(x[1]) * c3) * x[0] + c1;
  });
  Built b{HamiltonianSystem(PoissonStructure::canonical(4), l), {}};
  b.g_solutions.push_back(make_g(info, g, c, 0.0, "C3 != 0, c != 0, c0 = 0; singular at q1 = 0",
                                 Globality::globally_defined,
                                 small_g(g, std::abs(c1) + std::abs(c2) + std::abs(c3))));
  return b;
}

struct VortexParams {
  double k, c0, alpha;
  cplx f1, f2;
};

VortexParams vortex_params(const ParamMap& p, const std::string& id) {
  VortexParams v{param_real(p, "k"), param_real(p, "c0"), param_real(p, "alpha"),
                 param_complex(p, "F1"), param_complex(p, "F2")};
  require(v.k > 0.0, id + " requires k > 0");
  require(v.c0 > 0.0, id + " requires c0 > 0 (the solution involves sqrt(2 c0))");
  require(v.alpha > 0.0, id + " requires alpha > 0");
  return v;
}

Built build_vortex_equal(const EntryInfo& info, const ParamMap& p) {
  const VortexParams v = vortex_params(p, info.id);
  const double k = v.k, alpha = v.alpha;
  const SingularSet origin([k](std::span<const double> x, double margin) {
    return std::sqrt(4.0 * x[0] * x[0] + x[2] * x[2] / (k * k)) <= margin;
  });
  auto l = ScalarField::real(
      4, [=](auto x) { return -alpha * k * k * log(4.0 * x[0] * x[0] + x[2] * x[2] / (k * k)); },
      origin);
  auto q1 = ScalarField::real(4, [=](auto x) { return x[2] * x[2] + 4.0 * k * k * x[0] * x[0]; });
  const double rate = std::sqrt(2.0 * v.c0) / (4.0 * alpha * k * k * k);
  auto exponent = ScalarField::real(
      4, [=](auto x) { return rate * (x[2] * x[2] + 4.0 * k * k * x[0] * x[0]); });

  // Principal branch: the cut is X1t = 0, Y1t < 0.
  const SingularSet cut([](std::span<const double> x, double margin) {
    return x[2] < 0.0 && std::abs(x[0]) <= margin;
  });
  const cplx f1 = v.f1, f2 = v.f2;
  auto g = ScalarField::complex(
      4,
      [=](auto x) {
        const auto q = x[2] * x[2] + 4.0 * k * k * x[0] * x[0];
        const auto e = to_complex(rate * q);
        const auto lw =
            log(to_complex(x[2]) + cplx(0.0, 2.0 * k) * to_complex(x[0])) - 0.5 * log(to_complex(q));
        const auto el = e * lw;
        return f1 * exp(el) + f2 * exp(-el);
      },
      origin | cut);

  std::map<std::string, ScalarField> obs{{"Q1", q1}, {"exponent", exponent}};
  Built b{HamiltonianSystem(PoissonStructure::canonical(4), l, obs), {}};
  b.g_solutions.push_back(
      make_g(info, g, 0.0, v.c0,
             "c = 0, c0 > 0; single-valued when Q1 sqrt(2 c0)/(4 alpha k^3) is an integer",
             Globality::conditionally_single_valued, small_g(g, std::abs(f1) + std::abs(f2))));
  return b;
}

Built build_vortex_opposite(const EntryInfo& info, const ParamMap& p) {
  const VortexParams v = vortex_params(p, info.id);
  const double k = v.k, alpha = v.alpha;
  const SingularSet origin([k](std::span<const double> x, double margin) {
    return std::sqrt(4.0 * x[0] * x[0] + x[3] * x[3] / (k * k)) <= margin;
  });
  const SingularSet axis([](std::span<const double> x, double margin) {
    return std::abs(x[3]) <= margin;
  });
  auto l = ScalarField::real(
      4, [=](auto x) { return alpha * k * k * log(4.0 * x[0] * x[0] + x[3] * x[3] / (k * k)); },
      origin);
  const double rate = std::sqrt(2.0 * v.c0) / (2.0 * alpha * k * k);
  auto phi = [=](auto x) {
    const auto q2 = 4.0 * k * k * x[0] * x[0] + x[3] * x[3];
    return rate * q2 * x[1] / x[3];
  };
  const cplx f1 = v.f1, f2 = v.f2;
  ScalarField g;
  if (f1.imag() == 0.0 && f2.imag() == 0.0) {
    const double a = f1.real(), b = f2.real();
    g = ScalarField::real(
        4, [=](auto x) { return a * sin(phi(x)) + b * cos(phi(x)); }, axis | origin);
  } else {
    g = ScalarField::complex(
        4,
        [=](auto x) {
          const auto t = to_complex(phi(x));
          return f1 * sin(t) + f2 * cos(t);
        },
        axis | origin);
  }
  std::map<std::string, ScalarField> obs{{"X1t", ScalarField::coordinate(4, 0)},
                                         {"Y2t", ScalarField::coordinate(4, 3)}};
  Built b{HamiltonianSystem(PoissonStructure::canonical(4), l, obs), {}};
  b.g_solutions.push_back(make_g(info, g, 0.0, v.c0, "c = 0, c0 > 0; singular at Y2t = 0",
                                 Globality::globally_defined,
                                 small_g(g, std::abs(f1) + std::abs(f2))));
  return b;
}

Built build_lotka_volterra(const ParamMap& p) {
  const double a = param_real(p, "a"), b = param_real(p, "b");
  const double d = param_real(p, "d"), g = param_real(p, "g");
  const SingularSet quadrant([](std::span<const double> x, double margin) {
    return x[0] <= margin || x[1] <= margin;
  });
  auto structure = PoissonStructure::custom(2, [=](auto x) {
    using S = elem_t<decltype(x)>;
    const S zero = 0.0 * x[0];
    const S big_a = -1.0 * pow(x[0], 1.0 + g) * pow(x[1], 1.0 + a) * exp(-b * x[1] - d * x[0]);
    Bivector<S> m(2, zero);
    m(0, 1) = big_a;
    m(1, 0) = -big_a;
    return m;
  });
  auto l = ScalarField::real(
      2, [=](auto x) { return pow(x[0], -g) * pow(x[1], -a) * exp(d * x[0] + b * x[1]); },
      quadrant);
  return {HamiltonianSystem(structure, l), {}};
}

Built build_euler_top(const ParamMap& p) {
  const double i1 = param_real(p, "I1"), i2 = param_real(p, "I2"), i3 = param_real(p, "I3");
  require(i1 > 0.0 && i2 > 0.0 && i3 > 0.0, "euler_top requires positive moments of inertia");
  require(i1 != i2 && i2 != i3 && i1 != i3, "euler_top requires distinct moments of inertia");
  auto structure = PoissonStructure::custom(3, [](auto x) {
    using S = elem_t<decltype(x)>;
    const S zero = 0.0 * x[0];
    Bivector<S> m(3, zero);
    m(0, 1) = -x[2];
    m(0, 2) = x[1];
    m(1, 0) = x[2];
    m(1, 2) = -x[0];
    m(2, 0) = -x[1];
    m(2, 1) = x[0];
    return m;
  });
  auto l = ScalarField::real(3, [=](auto x) {
    return 0.5 * (x[0] * x[0] / i1 + x[1] * x[1] / i2 + x[2] * x[2] / i3);
  });
  auto casimir =
      ScalarField::real(3, [](auto x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; });
  return {HamiltonianSystem(structure, l, {{"M", casimir}}), {}};
}

}  // namespace

std::string to_string(FunctionSpec::Kind kind) {
  switch (kind) {
    case FunctionSpec::Kind::polynomial: return "polynomial";
    case FunctionSpec::Kind::sine: return "sine";
    case FunctionSpec::Kind::cosine: return "cosine";
    case FunctionSpec::Kind::exponential: return "exponential";
  }
  return "unknown";
}

FunctionSpec::Kind function_kind_from_string(const std::string& name) {
  if (name == "polynomial") return FunctionSpec::Kind::polynomial;
  if (name == "sine" || name == "sin") return FunctionSpec::Kind::sine;
  if (name == "cosine" || name == "cos") return FunctionSpec::Kind::cosine;
  if (name == "exponential" || name == "exp") return FunctionSpec::Kind::exponential;
  throw ConstraintError("unknown built-in function '" + name + "'");
}

std::string to_string(ParamKind kind) {
  switch (kind) {
    case ParamKind::real: return "real";
    case ParamKind::complex: return "complex";
    case ParamKind::function: return "function";
  }
  return "unknown";
}

const std::vector<EntryInfo>& list_entries() {
  static const std::vector<EntryInfo> entries = build_entries();
  return entries;
}

const EntryInfo& entry_info(const std::string& id) {
  for (const EntryInfo& e : list_entries())
    if (e.id == id) return e;
  throw ConstraintError("unknown catalog entry '" + id + "'");
}

double param_real(const ParamMap& params, const std::string& name) {
  auto it = params.find(name);
  if (it == params.end()) throw ConstraintError("missing parameter '" + name + "'");
  if (const double* d = std::get_if<double>(&it->second)) return *d;
  if (const cplx* z = std::get_if<cplx>(&it->second); z && z->imag() == 0.0) return z->real();
  throw ConstraintError("parameter '" + name + "' must be real");
}

cplx param_complex(const ParamMap& params, const std::string& name) {
  auto it = params.find(name);
  if (it == params.end()) throw ConstraintError("missing parameter '" + name + "'");
  if (const double* d = std::get_if<double>(&it->second)) return *d;
  if (const cplx* z = std::get_if<cplx>(&it->second)) return *z;
  throw ConstraintError("parameter '" + name + "' must be a number");
}

const FunctionSpec& param_function(const ParamMap& params, const std::string& name) {
  auto it = params.find(name);
  if (it == params.end()) throw ConstraintError("missing parameter '" + name + "'");
  if (const FunctionSpec* f = std::get_if<FunctionSpec>(&it->second)) return *f;
  throw ConstraintError("parameter '" + name + "' must be a function specification");
}

Instance instantiate(const std::string& id, const ParamMap& params,
                     const InstantiateOptions& options) {
  const EntryInfo& info = entry_info(id);
  Instance inst;
  inst.id = id;
  inst.params = resolve(info, params);
  inst.sample_spec = {info.sample_box, options.gate_points, options.gate_seed, info.sample_margin};

  Built built;
  if (id == "quartic1") built = build_quartic1(info, inst.params);
  else if (id == "quartic2a") built = build_quartic2(info, inst.params, false);
  else if (id == "quartic2b") built = build_quartic2(info, inst.params, true);
  else if (id == "square_polar") built = build_square_polar(info, inst.params);
  else if (id == "vortex_equal") built = build_vortex_equal(info, inst.params);
  else if (id == "vortex_opposite") built = build_vortex_opposite(info, inst.params);
  else if (id == "lotka_volterra") built = build_lotka_volterra(inst.params);
  else built = build_euler_top(inst.params);

  inst.system = std::move(built.system);
  inst.g_solutions = std::move(built.g_solutions);
  if (options.run_gate) {
    for (GSolution& g : inst.g_solutions) {
      g.verification.performed = true;
      try {
        const ResidualReport r = pde_residual(inst.system, g, g.c, g.c0, inst.sample_spec);
        g.verification.max_residual = r.max;
        g.verification.points = r.points.size();
        g.verification.passed = r.max <= options.gate_tol;
      } catch (const DomainError&) {
        g.verification.passed = false;
      }
    }
  }
  return inst;
}

std::array<double, 4> vortex_to_tilde(const std::array<double, 4>& xy) {
  const auto [x1, y1, x2, y2] = xy;
  return {(x1 - x2) / 2.0, y1 - y2, (x1 + x2) / 2.0, y1 + y2};
}

std::array<double, 4> vortex_from_tilde(const std::array<double, 4>& t) {
  const auto [x1t, y1t, x2t, y2t] = t;
  return {x2t + x1t, (y2t + y1t) / 2.0, x2t - x1t, (y2t - y1t) / 2.0};
}

PhasePoint vortex_point(double x1t, double y1t, double x2t, double y2t) {
  return PhasePoint{x1t, x2t, y1t, y2t};
}

double vortex_alpha_default() { return 1.0 / (8.0 * std::numbers::pi); }

double vortex_equal_exponent(double k, double c0, double alpha, const PhasePoint& x) {
  const double q1 = x[2] * x[2] + 4.0 * k * k * x[0] * x[0];
  return q1 * std::sqrt(2.0 * c0) / (4.0 * alpha * k * k * k);
}

bool single_valued(double exponent) {
  return std::abs(exponent - std::round(exponent)) <= 1e-9;
}

}  // namespace extkit
