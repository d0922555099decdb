#include "extkit/verify.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "extkit/elliptic.hpp"
#include "extkit/errors.hpp"

namespace extkit {

namespace {

void summarize(ResidualReport& report) {
  if (report.points.empty()) throw DomainError("no sample point could be evaluated");
  double sum = 0.0;
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    const double v = report.points[i].value;
    sum += v;
    if (v > report.max || i == 0) {
      report.max = v;
      report.worst = i;
    }
  }
  report.mean = sum / static_cast<double>(report.points.size());
}

std::vector<double> rk4_step(const FlowFn& flow, std::span<const double> y, double h) {
  auto shifted = [&](const std::vector<double>& k, double w) {
    std::vector<double> out(y.begin(), y.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * h * k[i];
    return out;
  };
  const auto k1 = flow(y);
  const auto k2 = flow(shifted(k1, 0.5));
  const auto k3 = flow(shifted(k2, 0.5));
  const auto k4 = flow(shifted(k3, 1.0));
  std::vector<double> out(y.begin(), y.end());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

std::vector<double> fd_gradient(const FlatFn& f, std::span<const double> x, double h) {
  std::vector<double> grad(x.size());
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = x[i] + h;
    const double fp = f(y);
    y[i] = x[i] - h;
    const double fm = f(y);
    y[i] = x[i];
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

SingularPredicate sampling_exclusion(const HamiltonianSystem& sys, const GSolution& gsol) {
  return [sys, gsol](std::span<const double> x, double margin) {
    return sys.singular_at(x, margin) || gsol.g.singular_at(x, margin) ||
           gsol.sample_exclusion.near(x, margin);
  };
}

double pde_point_residual(const HamiltonianSystem& sys, const GSolution& gsol, double c, double c0,
                          const PhasePoint& x) {
  const cplx x2g = apply_XL2<cplx>(sys, gsol.g, x);
  const double l = eval_value<double>(sys.hamiltonian, x);
  const cplx rhs = 2.0 * (c * l + c0) * eval_value<cplx>(gsol.g, x);
  return std::abs(x2g + rhs) / (std::abs(x2g) + std::abs(rhs) + kResidualEps);
}

ResidualReport pde_residual(const HamiltonianSystem& sys, const GSolution& gsol, double c,
                            double c0, const SampleSpec& spec) {
  if (spec.box.size() != sys.dim()) throw DimensionError("sample box does not match system");
  const SampleResult samples = sample_points(spec, sampling_exclusion(sys, gsol));
  ResidualReport report;
  report.skipped = samples.rejected;
  for (const PhasePoint& x : samples.points) {
    try {
      report.points.push_back({x, pde_point_residual(sys, gsol, c, c0, x)});
    } catch (const Error&) {
      ++report.domain_failures;
    }
  }
  summarize(report);
  return report;
}

LocalField local_field(const ScalarField& f) {
  return [f](std::span<const double> x) -> std::optional<cplx> {
    if (x.size() != f.dim() || f.singular_at(x)) return std::nullopt;
    const cplx v = f.raw_value_complex(x);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return std::nullopt;
    return v;
  };
}

std::optional<cplx> flow_derivative(const HamiltonianSystem& sys, const LocalField& g,
                                    const PhasePoint& x, double h) {
  const FlowFn flow = base_flow(sys);
  try {
    const auto fwd = rk4_step(flow, x.span(), h);
    const auto bwd = rk4_step(flow, x.span(), -h);
    const auto gp = g(fwd);
    const auto gm = g(bwd);
    if (!gp || !gm) return std::nullopt;
    return (*gp - *gm) / (2.0 * h);
  } catch (const Error&) {
    return std::nullopt;
  }
}

ResidualReport kn_residual(const HamiltonianSystem& sys, const LocalField& g, double c, double c0,
                           int sign, const SampleSpec& spec, double h) {
  if (sign != 1 && sign != -1) throw DomainError("sign must be +1 or -1");
  if (spec.box.size() != sys.dim()) throw DimensionError("sample box does not match system");
  const SampleResult samples = sample_points(
      spec, [&sys](std::span<const double> x, double margin) { return sys.singular_at(x, margin); });
  ResidualReport report;
  report.skipped = samples.rejected;
  for (const PhasePoint& x : samples.points) {
    const auto gx = g(x.span());
    const auto xg = gx ? flow_derivative(sys, g, x, h) : std::nullopt;
    if (!gx || !xg) {
      ++report.domain_failures;
      continue;
    }
    const double l = eval_value<double>(sys.hamiltonian, x);
    const cplx rhs = static_cast<double>(sign) * std::sqrt(cplx(-2.0 * (c * l + c0))) * *gx;
    const double r = std::abs(*xg - rhs) / (std::abs(*xg) + std::abs(rhs) + kResidualEps);
    report.points.push_back({x, r});
  }
  if (report.points.empty()) {
    report.max = report.mean = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
  summarize(report);
  return report;
}

LocalField euler_kn_g(const EulerKnParams& p) {
  if (!(p.i1 > 0.0 && p.i2 > 0.0 && p.i3 > 0.0)) throw ConstraintError("moments must be positive");
  if (p.sign != 1 && p.sign != -1) throw ConstraintError("sign must be +1 or -1");
  return [p](std::span<const double> m) -> std::optional<cplx> {
    if (m.size() != 3) return std::nullopt;
    const double l = 0.5 * (m[0] * m[0] / p.i1 + m[1] * m[1] / p.i2 + m[2] * m[2] / p.i3);
    const double big_m = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
    const double x1 = p.i1 * p.i2 * (big_m - 2.0 * p.i3 * l);
    const double x2 = p.i1 * p.i3 * (2.0 * p.i2 * l - big_m);
    const double w = p.i2 * (p.i1 - p.i3);
    if (!(x1 > 0.0 && x2 > 0.0 && w > 0.0)) return std::nullopt;
    const double z = m[0] * std::sqrt(w / x1);
    const double k2 = p.i3 * (p.i1 - p.i2) * x1 / (w * x2);
    const cplx amp = p.i1 * p.i2 * p.i3 / std::sqrt(w) *
                     std::sqrt(cplx(-2.0 * (p.c * l + p.c0) / x2));
    try {
      if (p.form == KnForm::corrected) {
        if (!(std::abs(z) <= 1.0 && 1.0 + k2 * z * z > 0.0)) return std::nullopt;
        if (!(m[1] * m[2] * (p.i2 - p.i3) > 0.0)) return std::nullopt;
        const double f = elliptic_f(std::asin(z), -k2);
        return p.f * std::exp(static_cast<double>(p.sign) * amp * f);
      }
      const double f = elliptic_f(z, k2);
      return p.f * std::exp(-static_cast<double>(p.sign) * amp * f);
    } catch (const DomainError&) {
      return std::nullopt;
    }
  };
}

double relative_drift(std::span<const double> series) {
  if (series.empty()) return 0.0;
  const double o0 = series[0];
  double worst = 0.0;
  for (double v : series) worst = std::max(worst, std::abs(v - o0));
  return worst / std::max(std::abs(o0), kDriftEps);
}

TrajectoryReport conservation_report(const Trajectory& traj,
                                     const std::map<std::string, FlatFn>& observables) {
  TrajectoryReport report;
  report.times = traj.times;
  report.steps = traj.steps;
  report.rejected_steps = traj.rejected_steps;
  for (const auto& [name, fn] : observables) {
    std::vector<double> values;
    values.reserve(traj.states.size());
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
      double v = 0.0;
      try {
        v = fn(traj.states[i]);
      } catch (const Error& e) {
        throw IntegrationError("observable '" + name + "' is singular on the path: " + e.what(),
                               traj.times[i]);
      }
      values.push_back(v);
    }
    report.drift[name] = relative_drift(values);
    report.series[name] = std::move(values);
  }
  return report;
}

BracketResult fd_bracket(const PoissonStructure& structure, const FlatFn& f, const FlatFn& g,
                         std::span<const double> state, double h) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  if (state.size() != structure.dim()) throw DimensionError("state does not match structure");
  const Bivector<double> pi = structure.at(state);
  std::vector<double> gf, gg;
  try {
    gf = fd_gradient(f, state, h);
    gg = fd_gradient(g, state, h);
  } catch (const Error& e) {
    throw SingularPointError(std::string("singular point in the finite-difference stencil: ") +
                             e.what());
  }
  const std::size_t n = state.size();
  double value = 0.0;
  double pi_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = 0.5 * (pi(i, j) - pi(j, i));
      value += a * (gf[i] * gg[j] - gf[j] * gg[i]);
      pi_norm += 2.0 * a * a;
    }
  }
  BracketResult out;
  out.value = value;
  out.scale = norm(gf) * std::sqrt(pi_norm) * norm(gg);
  out.normalized = out.scale > 0.0 ? std::abs(value) / out.scale : std::abs(value);
  return out;
}

RankReport independence_rank(const std::vector<FlatFn>& fields,
                             const std::vector<std::vector<double>>& states, double threshold,
                             double h) {
  if (fields.empty()) throw DomainError("no fields given");
  if (states.empty()) throw DomainError("degenerate state list: no states");
  RankReport report;
  report.min_rank = fields.size();
  for (const auto& s : states) {
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(fields.size()),
                        static_cast<Eigen::Index>(s.size()));
    for (std::size_t r = 0; r < fields.size(); ++r) {
      const std::vector<double> grad = fd_gradient(fields[r], s, h);
      const double nrm = norm(grad);
      for (std::size_t c = 0; c < grad.size(); ++c)
        jac(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            nrm > 0.0 ? grad[c] / nrm : 0.0;
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
    const Eigen::VectorXd sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (smax > 0.0 && sv(i) > threshold * smax) ++rank;
    report.ranks.push_back(rank);
    report.singular_values.emplace_back(sv.data(), sv.data() + sv.size());
    report.min_rank = std::min(report.min_rank, rank);
  }
  return report;
}

FlowFn base_flow(const HamiltonianSystem& sys) {
  return [sys](std::span<const double> y) {
    return ham_vector_field(sys, PhasePoint(std::vector<double>(y.begin(), y.end())));
  };
}

std::map<std::string, FlatFn> base_observables(const HamiltonianSystem& sys) {
  std::map<std::string, FlatFn> out;
  out["L"] = [sys](std::span<const double> y) {
    return eval_value<double>(sys.hamiltonian, PhasePoint(std::vector<double>(y.begin(), y.end())));
  };
  for (const auto& [name, field] : sys.observables) {
    auto at = [field](std::span<const double> y) {
      return eval_value<cplx>(field, PhasePoint(std::vector<double>(y.begin(), y.end())));
    };
    if (field.is_complex()) {
      out[name + "_re"] = [at](std::span<const double> y) { return at(y).real(); };
      out[name + "_im"] = [at](std::span<const double> y) { return at(y).imag(); };
    } else {
      out[name] = [at](std::span<const double> y) { return at(y).real(); };
    }
  }
  return out;
}

FlowFn extension_flow(const Extension& ext) {
  return [ext](std::span<const double> y) { return ext.flow(ExtendedState::from_flat(y)).flatten(); };
}

std::vector<ExtendedState> sample_extended_states(const Extension& ext, const SampleSpec& base,
                                                  Interval u, Interval p_u) {
  if (base.box.size() != ext.system().dim())
    throw DimensionError("sample box does not match system");
  SampleSpec spec = base;
  spec.box.clear();
  spec.box.push_back(u);
  spec.box.push_back(p_u);
  spec.box.insert(spec.box.end(), base.box.begin(), base.box.end());
  const SingularPredicate base_excluded = sampling_exclusion(ext.system(), ext.g_solution());
  const SampleResult r = sample_points(spec, [&](std::span<const double> y, double margin) {
    return base_excluded(y.subspan(2), margin) ||
           ext.singular_at(ExtendedState::from_flat(y), margin);
  });
  std::vector<ExtendedState> out;
  out.reserve(r.points.size());
  for (const PhasePoint& y : r.points) out.push_back(ExtendedState::from_flat(y.span()));
  return out;
}

std::map<std::string, FlatFn> extension_observables(const Extension& ext) {
  std::map<std::string, FlatFn> out;
  for (const auto& [name, fn] : base_observables(ext.system()))
    out[name] = [fn](std::span<const double> y) { return fn(y.subspan(2)); };
  out["H"] = [ext](std::span<const double> y) {
    return ext.hamiltonian(ExtendedState::from_flat(y));
  };
  out["K_re"] = [ext](std::span<const double> y) {
    return ext.characteristic(ExtendedState::from_flat(y)).real();
  };
  out["K_im"] = [ext](std::span<const double> y) {
    return ext.characteristic(ExtendedState::from_flat(y)).imag();
  };
  return out;
}

}  // namespace extkit
