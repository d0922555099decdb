#pragma once

// Extended Hamiltonians and their characteristic first integrals.
//
// Given a Hamiltonian L and a non-null solution G of X_L^2 G = -2(cL + c0) G,
// the extension
//
//   H = p_u^2 / 2 - k^2 gamma'(u) L + k^2 c0 gamma(u)^2 + Omega / gamma(u)^2,
//
// with k = m/n and gamma' + c gamma^2 + C = 0, admits the characteristic
// first integral K_{m,n} (Omega = 0) or Kbar_{2s,r} (any Omega). Everything
// reduces to polynomials in p_u, gamma, G, X_L G and Lambda = cL + c0, because
// the pair (G, X_L G) is closed under X_L:
//
//   X_L(G) = X_L G,   X_L(X_L G) = -2 Lambda G,   X_L(Lambda) = 0.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "extkit/diffkit.hpp"
#include "extkit/gamma.hpp"
#include "extkit/poisson.hpp"

namespace extkit {

struct ExtensionParams {
  double c = 0.0;
  double c0 = 0.0;
  double big_c = 0.0;
  double omega = 0.0;
  int m = 1;
  int n = 1;
  double u_offset = 0.0;

  double k() const { return static_cast<double>(m) / static_cast<double>(n); }
  std::optional<double> kappa() const { return gamma().kappa(); }
  GammaParams gamma() const { return {c, big_c, u_offset}; }
};

/// Throws ConstraintError unless (c, c0) != (0, 0), m, n >= 1, and gamma is
/// not identically zero when Omega != 0.
void validate(const ExtensionParams& params);

/// Indices actually used for the characteristic integral: (2m, 2n) when
/// Omega != 0 and m is odd, otherwise unchanged. k = m/n is unaffected.
ExtensionParams effective_params(const ExtensionParams& params);

/// Element of the derivation algebra generated by (G, X_L G, L), stored as
/// the pair (value, X_L value). Products obey the Leibniz rule.
template <class T>
struct ExtDerivValue {
  T value{};
  T xl{};

  friend ExtDerivValue operator+(const ExtDerivValue& a, const ExtDerivValue& b) {
    return {a.value + b.value, a.xl + b.xl};
  }
  friend ExtDerivValue operator-(const ExtDerivValue& a, const ExtDerivValue& b) {
    return {a.value - b.value, a.xl - b.xl};
  }
  friend ExtDerivValue operator*(const ExtDerivValue& a, const ExtDerivValue& b) {
    return {a.value * b.value, a.xl * b.value + a.value * b.xl};
  }
  friend ExtDerivValue operator*(double s, const ExtDerivValue& a) {
    return {s * a.value, s * a.xl};
  }
};

enum class Globality { globally_defined, conditionally_single_valued, multi_valued };

std::string to_string(Globality g);

struct Verification {
  bool performed = false;
  bool passed = false;
  double max_residual = 0.0;
  std::size_t points = 0;
};

/// A solution G of X_L^2 G = -2(cL + c0) G together with the (c, c0) for
/// which it holds.
struct GSolution {
  /// Throws ConstraintError if G vanishes at every probe point.
  static GSolution create(ScalarField g, double c, double c0, std::string constraints,
                          Globality globality, std::span<const PhasePoint> probes,
                          SingularSet sample_exclusion = {});

  bool supports(double c_, double c0_) const;

  ScalarField g;
  double c = 0.0;
  double c0 = 0.0;
  std::string constraints;
  Globality globality = Globality::globally_defined;
  /// Points to keep away from when sampling residuals (e.g. zeros of G),
  /// in addition to the field's singular set.
  SingularSet sample_exclusion;
  Verification verification;
};

struct ExtendedState {
  double u = 0.0;
  double p_u = 0.0;
  PhasePoint base;

  /// (u, p_u, base...).
  std::vector<double> flatten() const;
  static ExtendedState from_flat(std::span<const double> flat);
};

template <class T>
struct SeedPair {
  ExtDerivValue<T> g;
  double l = 0.0;
};

/// (G(x), X_L G(x)) and L(x).
template <class T = double>
SeedPair<T> seed_pair(const HamiltonianSystem& sys, const GSolution& gsol, const PhasePoint& x);

/// (G_n, X_L G_n) from G_1 = G, G_{j+1} = X_L(G) G_j + (1/j) G X_L(G_j),
/// iterated in the derivation algebra. `lambda` = cL + c0 at the same point.
template <class T = double>
ExtDerivValue<T> gn_recursive(int n, const ExtDerivValue<T>& seed, double lambda);

/// (G_n, X_L G_n) from the closed form
/// G_n = sum_k binom(n, 2k+1) (-2 lambda)^k G^{2k+1} (X_L G)^{n-2k-1}.
template <class T = double>
ExtDerivValue<T> gn_closed(int n, const ExtDerivValue<T>& seed, double lambda);

struct PDCoeffs {
  double p;
  double d;
};

/// Coefficients with U_{m,n}^r(G_n) = P G_n + D X_L(G_n). Requires r <= m.
PDCoeffs pd_coeffs(int m, int n, int r, double p_u, double gamma, double lambda);

/// K_{m,n} = U_{m,n}^m(G_n). Requires Omega = 0.
template <class T = double>
T k_char(const HamiltonianSystem& sys, const GSolution& gsol, const ExtensionParams& params,
         const ExtendedState& state);

/// Kbar_{2s,r} = (U_{2s,r}^2 + 2 Omega / gamma^2)^s (G_r), with odd first
/// index doubled when Omega != 0. Reduces to k_char when Omega = 0.
template <class T = double>
T kbar_char(const HamiltonianSystem& sys, const GSolution& gsol, const ExtensionParams& params,
            const ExtendedState& state);

double h_extended(const HamiltonianSystem& sys, const ExtensionParams& params,
                  const ExtendedState& state);

/// Time derivative of (u, p_u, base) under the extended Hamiltonian.
ExtendedState extended_flow(const HamiltonianSystem& sys, const ExtensionParams& params,
                            const ExtendedState& state);

/// A validated bundle of system, G and parameters.
class Extension {
 public:
  /// Checks parameters, that (c, c0) match the G solution, and that G passed
  /// its residual gate (unless `allow_unverified`).
  static Extension build(HamiltonianSystem sys, GSolution gsol, ExtensionParams params,
                         bool allow_unverified = false);

  const HamiltonianSystem& system() const noexcept { return sys_; }
  const GSolution& g_solution() const noexcept { return gsol_; }
  const ExtensionParams& requested() const noexcept { return requested_; }
  /// Parameters after auto-doubling.
  const ExtensionParams& params() const noexcept { return params_; }
  bool doubled() const noexcept { return params_.m != requested_.m; }
  std::size_t dim() const { return sys_.dim() + 2; }
  PoissonStructure structure() const { return extend_structure(sys_.structure); }

  double hamiltonian(const ExtendedState& s) const;
  ExtendedState flow(const ExtendedState& s) const;
  /// K (Omega = 0) or Kbar (Omega != 0), in complex arithmetic.
  cplx characteristic(const ExtendedState& s) const;
  double base_hamiltonian(const ExtendedState& s) const;

  /// gamma pole, gamma = 0 with Omega != 0, or a singular base point,
  /// within `margin`.
  bool singular_at(const ExtendedState& s, double margin = 0.0) const;

 private:
  Extension(HamiltonianSystem sys, GSolution gsol, ExtensionParams requested,
            ExtensionParams params)
      : sys_(std::move(sys)),
        gsol_(std::move(gsol)),
        requested_(requested),
        params_(params) {}

  HamiltonianSystem sys_;
  GSolution gsol_;
  ExtensionParams requested_;
  ExtensionParams params_;
};

extern template SeedPair<double> seed_pair<double>(const HamiltonianSystem&, const GSolution&,
                                                   const PhasePoint&);
extern template SeedPair<cplx> seed_pair<cplx>(const HamiltonianSystem&, const GSolution&,
                                               const PhasePoint&);
extern template ExtDerivValue<double> gn_recursive<double>(int, const ExtDerivValue<double>&,
                                                           double);
extern template ExtDerivValue<cplx> gn_recursive<cplx>(int, const ExtDerivValue<cplx>&, double);
extern template ExtDerivValue<double> gn_closed<double>(int, const ExtDerivValue<double>&, double);
extern template ExtDerivValue<cplx> gn_closed<cplx>(int, const ExtDerivValue<cplx>&, double);
extern template double k_char<double>(const HamiltonianSystem&, const GSolution&,
                                      const ExtensionParams&, const ExtendedState&);
extern template cplx k_char<cplx>(const HamiltonianSystem&, const GSolution&,
                                  const ExtensionParams&, const ExtendedState&);
extern template double kbar_char<double>(const HamiltonianSystem&, const GSolution&,
                                         const ExtensionParams&, const ExtendedState&);
extern template cplx kbar_char<cplx>(const HamiltonianSystem&, const GSolution&,
                                     const ExtensionParams&, const ExtendedState&);

}  // namespace extkit
