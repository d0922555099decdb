#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "extkit/diffkit.hpp"
#include "extkit/extension.hpp"
#include "extkit/integrate.hpp"
#include "extkit/poisson.hpp"
#include "extkit/sampling.hpp"

namespace extkit {

/// Real observable on flat coordinates (base point or (u, p_u, base...)).
using FlatFn = std::function<double(std::span<const double>)>;

/// Denominator guard in relative residuals |A + B| / (|A| + |B| + eps).
inline constexpr double kResidualEps = 1e-12;
/// Floor of the drift denominator max(|O(0)|, eps).
inline constexpr double kDriftEps = 1e-12;

struct PointResidual {
  PhasePoint x;
  double value = 0.0;
};

struct ResidualReport {
  std::vector<PointResidual> points;
  double max = 0.0;
  double mean = 0.0;
  /// Index into `points` of the largest residual.
  std::size_t worst = 0;
  /// Draws rejected by the singular-set filter.
  std::size_t skipped = 0;
  /// Sampled points where the field could not be evaluated (branch/domain).
  std::size_t domain_failures = 0;
};

/// Union of the system's singular set, G's singular set and G's sampling
/// exclusion.
SingularPredicate sampling_exclusion(const HamiltonianSystem& sys, const GSolution& gsol);

/// |X_L^2 G + 2(cL + c0) G| / (|X_L^2 G| + |2(cL + c0) G| + eps) at x.
double pde_point_residual(const HamiltonianSystem& sys, const GSolution& gsol, double c, double c0,
                          const PhasePoint& x);

/// Relative residual of X_L^2 G = -2(cL + c0) G over sampled points.
/// Throws DomainError if no point could be evaluated.
ResidualReport pde_residual(const HamiltonianSystem& sys, const GSolution& gsol, double c,
                            double c0, const SampleSpec& spec);

/// A field known only pointwise; nullopt outside its domain or branch.
using LocalField = std::function<std::optional<cplx>(std::span<const double>)>;

LocalField local_field(const ScalarField& f);

/// d/dt G(flow_t(x)) at t = 0 by a central difference over one RK4 step of
/// +-h in each direction. nullopt when G is undefined at either end.
std::optional<cplx> flow_derivative(const HamiltonianSystem& sys, const LocalField& g,
                                    const PhasePoint& x, double h = 1e-6);

/// Relative residual of X_L G = sign sqrt(-2(cL + c0)) G, with X_L G from
/// flow_derivative and the principal complex square root. Points outside the
/// field's domain are counted, not fatal; with none left, max and mean are NaN.
ResidualReport kn_residual(const HamiltonianSystem& sys, const LocalField& g, double c, double c0,
                           int sign, const SampleSpec& spec, double h = 1e-6);

/// How the elliptic integral in the Euler-top solution is read.
/// corrected: F(asin z | -k^2) with exp(+sign A F).
/// literal: F(z | k^2) with exp(-sign A F), as printed.
enum class KnForm { corrected, literal };

struct EulerKnParams {
  double i1 = 2.0;
  double i2 = 3.0;
  double i3 = 1.0;
  double c = 0.0;
  double c0 = -0.5;
  int sign = 1;
  KnForm form = KnForm::corrected;
  cplx f = 1.0;
};

/// Kuru-Negro solution on the Euler top, in coordinates (m1, m2, m3).
LocalField euler_kn_g(const EulerKnParams& params);

struct TrajectoryReport {
  std::vector<double> times;
  std::map<std::string, std::vector<double>> series;
  /// max_t |O(t) - O(0)| / max(|O(0)|, eps).
  std::map<std::string, double> drift;
  std::size_t steps = 0;
  std::size_t rejected_steps = 0;
};

double relative_drift(std::span<const double> series);

TrajectoryReport conservation_report(const Trajectory& traj,
                                     const std::map<std::string, FlatFn>& observables);

struct BracketResult {
  double value = 0.0;
  /// |grad F| * ||Pi||_F * |grad G|.
  double scale = 0.0;
  double normalized = 0.0;
};

/// grad F . Pi grad G with central finite-difference gradients of step h.
/// Exactly antisymmetric in (F, G).
BracketResult fd_bracket(const PoissonStructure& structure, const FlatFn& f, const FlatFn& g,
                         std::span<const double> state, double h = 1e-5);

struct RankReport {
  std::size_t min_rank = 0;
  std::vector<std::size_t> ranks;
  std::vector<std::vector<double>> singular_values;
};

/// Numerical rank of the stacked, row-normalized finite-difference gradients
/// at each state; singular values below threshold * sigma_max count as zero.
RankReport independence_rank(const std::vector<FlatFn>& fields,
                             const std::vector<std::vector<double>>& states,
                             double threshold = 1e-6, double h = 1e-6);

/// Hamiltonian flow of L on the base manifold.
FlowFn base_flow(const HamiltonianSystem& sys);

/// L and the system's named observables (real parts of complex ones get a
/// `_re` suffix, imaginary parts `_im`).
std::map<std::string, FlatFn> base_observables(const HamiltonianSystem& sys);

FlowFn extension_flow(const Extension& ext);

/// Deterministic extended states: u and p_u uniform in the given intervals,
/// the base point in `base.box`. States within `base.margin` of a gamma pole,
/// of gamma = 0 (Omega != 0) or of the G sampling exclusion are rejected.
std::vector<ExtendedState> sample_extended_states(const Extension& ext, const SampleSpec& base,
                                                  Interval u, Interval p_u);

/// H, L, K_re, K_im and the lifted base observables on (u, p_u, base...).
std::map<std::string, FlatFn> extension_observables(const Extension& ext);

}  // namespace extkit
