#include "extkit/extension.hpp"

#include <algorithm>
#include <cmath>

#include "extkit/errors.hpp"

namespace extkit {

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return std::round(out);
}

double ipow(double x, int e) {
  double out = 1.0;
  for (int i = 0; i < e; ++i) out *= x;
  return out;
}

template <class T>
ExtDerivValue<T> dpow(const ExtDerivValue<T>& x, int e) {
  ExtDerivValue<T> out{T(1.0), T(0.0)};
  for (int i = 0; i < e; ++i) out = out * x;
  return out;
}

// Truncated series d[i] = X_L^i(f), i = 0..order, for an element f of the
// derivation algebra. Products use the general Leibniz rule; the derivative
// shifts the series and loses one order.
template <class T>
class FlowSeries {
 public:
  static FlowSeries seed(int order, const T& g, const T& xg, double lambda) {
    FlowSeries s;
    s.d_.resize(static_cast<std::size_t>(order) + 1);
    s.d_[0] = g;
    if (order >= 1) s.d_[1] = xg;
    for (int i = 2; i <= order; ++i) s.d_[i] = -2.0 * lambda * s.d_[i - 2];
    return s;
  }

  int order() const { return static_cast<int>(d_.size()) - 1; }
  const T& operator[](int i) const { return d_[static_cast<std::size_t>(i)]; }

  FlowSeries derivative() const {
    FlowSeries s;
    s.d_.assign(d_.begin() + 1, d_.end());
    return s;
  }

  friend FlowSeries operator*(const FlowSeries& a, const FlowSeries& b) {
    const int order = std::min(a.order(), b.order());
    FlowSeries s;
    s.d_.assign(static_cast<std::size_t>(order) + 1, T{});
    for (int i = 0; i <= order; ++i)
      for (int j = 0; j <= i; ++j) s.d_[i] += binom(i, j) * a[j] * b[i - j];
    return s;
  }

  friend FlowSeries operator+(const FlowSeries& a, const FlowSeries& b) {
    const int order = std::min(a.order(), b.order());
    FlowSeries s;
    s.d_.resize(static_cast<std::size_t>(order) + 1);
    for (int i = 0; i <= order; ++i) s.d_[i] = a[i] + b[i];
    return s;
  }

  friend FlowSeries operator*(double k, const FlowSeries& a) {
    FlowSeries s = a;
    for (auto& v : s.d_) v = k * v;
    return s;
  }

 private:
  std::vector<T> d_;
};

void check_params_match(const GSolution& gsol, const ExtensionParams& params) {
  if (!gsol.supports(params.c, params.c0))
    throw ConstraintError("(c, c0) do not match the regime of the G solution");
}

void check_state(const HamiltonianSystem& sys, const ExtendedState& state) {
  if (state.base.size() != sys.dim())
    throw DimensionError("extended state base dimension does not match system");
  if (!std::isfinite(state.u) || !std::isfinite(state.p_u) || !state.base.all_finite())
    throw NonFiniteError("extended state has non-finite entries");
}

GammaValue gamma_at(const ExtensionParams& params, double u) {
  const GammaValue g = gamma_eval(params.gamma(), u);
  if (params.omega != 0.0 && g.value == 0.0) throw PoleError("gamma = 0 with Omega != 0");
  return g;
}

template <class T>
T char_sum(const ExtensionParams& eff, const ExtDerivValue<T>& gn, double p_u, double gamma,
           double lambda) {
  const int s = eff.m / 2;
  const double w = 2.0 * eff.omega / (gamma * gamma);
  T out{};
  for (int j = 0; j <= s; ++j) {
    const PDCoeffs pd = pd_coeffs(eff.m, eff.n, 2 * (s - j), p_u, gamma, lambda);
    out += binom(s, j) * ipow(w, j) * (pd.p * gn.value + pd.d * gn.xl);
  }
  return out;
}

}  // namespace

std::string to_string(Globality g) {
  switch (g) {
    case Globality::globally_defined: return "globally defined";
    case Globality::conditionally_single_valued: return "conditionally-single-valued";
    case Globality::multi_valued: return "multi-valued";
  }
  return "unknown";
}

void validate(const ExtensionParams& p) {
  if (p.c == 0.0 && p.c0 == 0.0) throw ConstraintError("(c, c0) must not both vanish");
  if (p.m < 1 || p.n < 1) throw ConstraintError("m and n must be positive integers");
  for (double v : {p.c, p.c0, p.big_c, p.omega, p.u_offset})
    if (!std::isfinite(v)) throw ConstraintError("extension parameters must be finite");
  if (p.omega != 0.0 && p.gamma().degenerate())
    throw ConstraintError("gamma is identically zero (c = C = 0) but Omega != 0");
}

ExtensionParams effective_params(const ExtensionParams& params) {
  ExtensionParams out = params;
  if (params.omega != 0.0 && params.m % 2 != 0) {
    out.m = 2 * params.m;
    out.n = 2 * params.n;
  }
  return out;
}

GSolution GSolution::create(ScalarField g, double c, double c0, std::string constraints,
                            Globality globality, std::span<const PhasePoint> probes,
                            SingularSet sample_exclusion) {
  if (!g.valid()) throw ConstraintError("G solution has no field");
  if (c == 0.0 && c0 == 0.0) throw ConstraintError("(c, c0) must not both vanish");
  bool nonzero = false;
  for (const PhasePoint& x : probes) {
    if (x.size() != g.dim() || g.singular_at(x.span())) continue;
    if (std::abs(eval_value<cplx>(g, x)) > 0.0) {
      nonzero = true;
      break;
    }
  }
  if (!nonzero) throw ConstraintError("G vanishes at every probe point (a null solution)");
  GSolution out;
  out.g = std::move(g);
  out.c = c;
  out.c0 = c0;
  out.constraints = std::move(constraints);
  out.globality = globality;
  out.sample_exclusion = std::move(sample_exclusion);
  return out;
}

bool GSolution::supports(double c_, double c0_) const {
  auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
  };
  return close(c, c_) && close(c0, c0_);
}

std::vector<double> ExtendedState::flatten() const {
  std::vector<double> out;
  out.reserve(base.size() + 2);
  out.push_back(u);
  out.push_back(p_u);
  out.insert(out.end(), base.coords().begin(), base.coords().end());
  return out;
}

ExtendedState ExtendedState::from_flat(std::span<const double> flat) {
  if (flat.size() < 2) throw DimensionError("extended state needs at least (u, p_u)");
  return {flat[0], flat[1], PhasePoint(std::vector<double>(flat.begin() + 2, flat.end()))};
}

template <class T>
SeedPair<T> seed_pair(const HamiltonianSystem& sys, const GSolution& gsol, const PhasePoint& x) {
  if (gsol.g.dim() != sys.dim()) throw DimensionError("G dimension does not match system");
  if (x.size() != sys.dim()) throw DimensionError("point dimension does not match system");
  if (sys.singular_at(x.span())) throw SingularPointError("point lies in the system's singular set");
  const Jet2<T> jg = eval_jet2<T>(gsol.g, x);
  const Jet2<double> jl = eval_jet2<double>(sys.hamiltonian, x);
  const std::vector<double> v = sys.structure.apply(x.span(), jl.gradient());
  T xg{};
  for (std::size_t i = 0; i < sys.dim(); ++i) xg += jg.grad(i) * v[i];
  return {{jg.value(), xg}, jl.value()};
}

template <class T>
ExtDerivValue<T> gn_recursive(int n, const ExtDerivValue<T>& seed, double lambda) {
  if (n < 1) throw ConstraintError("G_n needs n >= 1");
  const FlowSeries<T> g = FlowSeries<T>::seed(n, seed.value, seed.xl, lambda);
  const FlowSeries<T> xg = g.derivative();
  FlowSeries<T> gj = g;
  for (int j = 1; j < n; ++j) gj = xg * gj + (1.0 / j) * (g * gj.derivative());
  return {gj[0], gj[1]};
}

template <class T>
ExtDerivValue<T> gn_closed(int n, const ExtDerivValue<T>& seed, double lambda) {
  if (n < 1) throw ConstraintError("G_n needs n >= 1");
  const ExtDerivValue<T> g = seed;
  const ExtDerivValue<T> xg{seed.xl, -2.0 * lambda * seed.value};
  ExtDerivValue<T> out{};
  for (int k = 0; 2 * k + 1 <= n; ++k)
    out = out + (binom(n, 2 * k + 1) * ipow(-2.0 * lambda, k)) *
                    (dpow(g, 2 * k + 1) * dpow(xg, n - 2 * k - 1));
  return out;
}

PDCoeffs pd_coeffs(int m, int n, int r, double p_u, double gamma, double lambda) {
  if (m < 1 || n < 1) throw ConstraintError("m and n must be positive integers");
  if (r < 0 || r > m) throw ConstraintError("pd_coeffs requires 0 <= r <= m");
  const double beta = static_cast<double>(m) / n * gamma;
  const double mu = -2.0 * lambda;
  double p = 0.0;
  for (int j = 0; 2 * j <= r; ++j)
    p += binom(r, 2 * j) * ipow(beta, 2 * j) * ipow(p_u, r - 2 * j) * ipow(mu, j);
  double d = 0.0;
  for (int j = 0; 2 * j + 1 <= r; ++j)
    d += binom(r, 2 * j + 1) * ipow(beta, 2 * j + 1) * ipow(p_u, r - 2 * j - 1) * ipow(mu, j);
  return {p, d / n};
}

template <class T>
T k_char(const HamiltonianSystem& sys, const GSolution& gsol, const ExtensionParams& params,
         const ExtendedState& state) {
  if (params.omega != 0.0) throw ConstraintError("K_{m,n} requires Omega = 0; use kbar_char");
  validate(params);
  check_params_match(gsol, params);
  check_state(sys, state);
  const GammaValue gam = gamma_at(params, state.u);
  const SeedPair<T> seed = seed_pair<T>(sys, gsol, state.base);
  const double lambda = params.c * seed.l + params.c0;
  const ExtDerivValue<T> gn = gn_closed<T>(params.n, seed.g, lambda);
  const PDCoeffs pd = pd_coeffs(params.m, params.n, params.m, state.p_u, gam.value, lambda);
  return pd.p * gn.value + pd.d * gn.xl;
}

template <class T>
T kbar_char(const HamiltonianSystem& sys, const GSolution& gsol, const ExtensionParams& params,
            const ExtendedState& state) {
  if (params.omega == 0.0 && params.m % 2 != 0) return k_char<T>(sys, gsol, params, state);
  validate(params);
  check_params_match(gsol, params);
  check_state(sys, state);
  const ExtensionParams eff = effective_params(params);
  const GammaValue gam = gamma_at(eff, state.u);
  if (eff.omega != 0.0 && gam.value == 0.0) throw PoleError("gamma = 0 with Omega != 0");
  const SeedPair<T> seed = seed_pair<T>(sys, gsol, state.base);
  const double lambda = eff.c * seed.l + eff.c0;
  const ExtDerivValue<T> gn = gn_closed<T>(eff.n, seed.g, lambda);
  return char_sum<T>(eff, gn, state.p_u, gam.value, lambda);
}

double h_extended(const HamiltonianSystem& sys, const ExtensionParams& params,
                  const ExtendedState& state) {
  validate(params);
  check_state(sys, state);
  const GammaValue gam = gamma_at(params, state.u);
  const double l = eval_value<double>(sys.hamiltonian, state.base);
  const double k2 = params.k() * params.k();
  double h = 0.5 * state.p_u * state.p_u - k2 * gam.d1 * l + k2 * params.c0 * gam.value * gam.value;
  if (params.omega != 0.0) h += params.omega / (gam.value * gam.value);
  return h;
}

ExtendedState extended_flow(const HamiltonianSystem& sys, const ExtensionParams& params,
                            const ExtendedState& state) {
  validate(params);
  check_state(sys, state);
  const GammaValue gam = gamma_at(params, state.u);
  const Jet2<double> jl = eval_jet2<double>(sys.hamiltonian, state.base);
  const double k2 = params.k() * params.k();
  double pdot = k2 * gam.d2 * jl.value() - 2.0 * k2 * params.c0 * gam.value * gam.d1;
  if (params.omega != 0.0)
    pdot += 2.0 * params.omega * gam.d1 / (gam.value * gam.value * gam.value);
  std::vector<double> rate = sys.structure.apply(state.base.span(), jl.gradient());
  for (double& v : rate) v *= -k2 * gam.d1;
  return {state.p_u, pdot, PhasePoint(std::move(rate))};
}

Extension Extension::build(HamiltonianSystem sys, GSolution gsol, ExtensionParams params,
                           bool allow_unverified) {
  validate(params);
  if (gsol.g.dim() != sys.dim()) throw DimensionError("G dimension does not match system");
  check_params_match(gsol, params);
  if (!allow_unverified && !(gsol.verification.performed && gsol.verification.passed))
    throw ConstraintError("G solution has not passed its residual gate");
  const ExtensionParams eff = effective_params(params);
  return Extension(std::move(sys), std::move(gsol), params, eff);
}

double Extension::hamiltonian(const ExtendedState& s) const {
  return h_extended(sys_, params_, s);
}

ExtendedState Extension::flow(const ExtendedState& s) const {
  return extended_flow(sys_, params_, s);
}

cplx Extension::characteristic(const ExtendedState& s) const {
  if (params_.omega == 0.0) return k_char<cplx>(sys_, gsol_, params_, s);
  return kbar_char<cplx>(sys_, gsol_, params_, s);
}

double Extension::base_hamiltonian(const ExtendedState& s) const {
  return eval_value<double>(sys_.hamiltonian, s.base);
}

bool Extension::singular_at(const ExtendedState& s, double margin) const {
  if (s.base.size() != sys_.dim()) return true;
  if (sys_.singular_at(s.base.span(), margin) || gsol_.g.singular_at(s.base.span(), margin))
    return true;
  try {
    const GammaValue mid = gamma_at(params_, s.u);
    if (margin <= 0.0) return false;
    const GammaValue lo = gamma_at(params_, s.u - margin);
    const GammaValue hi = gamma_at(params_, s.u + margin);
    // Between poles gamma moves monotonically in the direction of -c; a step
    // the other way means a pole was crossed.
    const bool pole = params_.c != 0.0 && (hi.value - lo.value) * params_.c > 0.0;
    if (pole) return true;
    if (params_.omega != 0.0 && (lo.value * hi.value <= 0.0 || mid.value == 0.0)) return true;
  } catch (const PoleError&) {
    return true;
  }
  return false;
}

template SeedPair<double> seed_pair<double>(const HamiltonianSystem&, const GSolution&,
                                            const PhasePoint&);
template SeedPair<cplx> seed_pair<cplx>(const HamiltonianSystem&, const GSolution&,
                                        const PhasePoint&);
template ExtDerivValue<double> gn_recursive<double>(int, const ExtDerivValue<double>&, double);
template ExtDerivValue<cplx> gn_recursive<cplx>(int, const ExtDerivValue<cplx>&, double);
template ExtDerivValue<double> gn_closed<double>(int, const ExtDerivValue<double>&, double);
template ExtDerivValue<cplx> gn_closed<cplx>(int, const ExtDerivValue<cplx>&, double);
template double k_char<double>(const HamiltonianSystem&, const GSolution&,
                               const ExtensionParams&, const ExtendedState&);
template cplx k_char<cplx>(const HamiltonianSystem&, const GSolution&, const ExtensionParams&,
                           const ExtendedState&);
template double kbar_char<double>(const HamiltonianSystem&, const GSolution&,
                                  const ExtensionParams&, const ExtendedState&);
template cplx kbar_char<cplx>(const HamiltonianSystem&, const GSolution&,
                              const ExtensionParams&, const ExtendedState&);

}  // namespace extkit
