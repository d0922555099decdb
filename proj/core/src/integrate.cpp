#include "extkit/integrate.hpp"

#include <algorithm>
#include <cmath>

#include "extkit/errors.hpp"

namespace extkit {

namespace {

std::vector<double> axpy(std::span<const double> y, double h,
                         std::initializer_list<std::pair<double, const std::vector<double>*>> terms) {
  std::vector<double> out(y.begin(), y.end());
  for (const auto& [w, k] : terms)
    if (w != 0.0)
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += h * w * (*k)[i];
  return out;
}

std::vector<double> eval(const FlowFn& flow, std::span<const double> y, double t) {
  std::vector<double> k;
  try {
    k = flow(y);
  } catch (const IntegrationError&) {
    throw;
  } catch (const Error& e) {
    throw IntegrationError(std::string("flow evaluation failed: ") + e.what(), t);
  }
  if (k.size() != y.size()) throw DimensionError("flow returned a vector of the wrong size");
  for (double v : k)
    if (!std::isfinite(v)) throw IntegrationError("flow returned a non-finite rate", t);
  return k;
}

void check_start(std::span<const double> y0, double t_final) {
  if (y0.empty()) throw DimensionError("empty initial state");
  if (!(t_final >= 0.0) || !std::isfinite(t_final))
    throw DomainError("t_final must be finite and non-negative");
  for (double v : y0)
    if (!std::isfinite(v)) throw NonFiniteError("initial state has non-finite entries");
}

}  // namespace

std::string to_string(Method m) { return m == Method::rk4 ? "rk4" : "rkf45"; }

Method method_from_string(const std::string& name) {
  if (name == "rk4") return Method::rk4;
  if (name == "rkf45") return Method::rkf45;
  throw DomainError("unknown integration method '" + name + "'");
}

Trajectory rk4(const FlowFn& flow, std::vector<double> y0, double t_final, double dt) {
  check_start(y0, t_final);
  if (!(dt > 0.0)) throw DomainError("rk4 step must be positive");
  Trajectory traj;
  const auto n_steps = static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
  traj.times.reserve(n_steps + 1);
  traj.states.reserve(n_steps + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(y0);
  std::vector<double> y = std::move(y0);
  double t = 0.0;
  for (std::size_t s = 0; s < n_steps; ++s) {
    const double h = std::min(dt, t_final - t);
    const auto k1 = eval(flow, y, t);
    const auto k2 = eval(flow, axpy(y, h, {{0.5, &k1}}), t);
    const auto k3 = eval(flow, axpy(y, h, {{0.5, &k2}}), t);
    const auto k4 = eval(flow, axpy(y, h, {{1.0, &k3}}), t);
    y = axpy(y, h, {{1.0 / 6, &k1}, {1.0 / 3, &k2}, {1.0 / 3, &k3}, {1.0 / 6, &k4}});
    t = (s + 1 == n_steps) ? t_final : t + h;
    traj.times.push_back(t);
    traj.states.push_back(y);
    ++traj.steps;
  }
  return traj;
}

Trajectory rkf45(const FlowFn& flow, std::vector<double> y0, double t_final, double tol) {
  check_start(y0, t_final);
  if (!(tol > 0.0)) throw DomainError("rkf45 tolerance must be positive");
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(y0);
  std::vector<double> y = std::move(y0);
  double t = 0.0;
  double h = std::min(1e-3, t_final > 0.0 ? t_final : 1e-3);
  const double h_min = 1e-14 * std::max(1.0, t_final);
  while (t < t_final) {
    h = std::min(h, t_final - t);
    if (h < h_min) throw IntegrationError("rkf45 step size underflow", t);
    const auto k1 = eval(flow, y, t);
    const auto k2 = eval(flow, axpy(y, h, {{1.0 / 4, &k1}}), t);
    const auto k3 = eval(flow, axpy(y, h, {{3.0 / 32, &k1}, {9.0 / 32, &k2}}), t);
    const auto k4 = eval(
        flow, axpy(y, h, {{1932.0 / 2197, &k1}, {-7200.0 / 2197, &k2}, {7296.0 / 2197, &k3}}), t);
    const auto k5 = eval(flow,
                         axpy(y, h,
                              {{439.0 / 216, &k1},
                               {-8.0, &k2},
                               {3680.0 / 513, &k3},
                               {-845.0 / 4104, &k4}}),
                         t);
    const auto k6 = eval(flow,
                         axpy(y, h,
                              {{-8.0 / 27, &k1},
                               {2.0, &k2},
                               {-3544.0 / 2565, &k3},
                               {1859.0 / 4104, &k4},
                               {-11.0 / 40, &k5}}),
                         t);
    const auto y5 = axpy(y, h,
                         {{16.0 / 135, &k1},
                          {6656.0 / 12825, &k3},
                          {28561.0 / 56430, &k4},
                          {-9.0 / 50, &k5},
                          {2.0 / 55, &k6}});
    const auto y4 = axpy(y, h,
                         {{25.0 / 216, &k1}, {1408.0 / 2565, &k3}, {2197.0 / 4104, &k4}, {-1.0 / 5, &k5}});
    double err = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double scale = tol * (1.0 + std::max(std::abs(y[i]), std::abs(y5[i])));
      err = std::max(err, std::abs(y5[i] - y4[i]) / scale);
    }
    if (!std::isfinite(err)) throw IntegrationError("rkf45 produced a non-finite state", t);
    if (err <= 1.0) {
      t = (t_final - t <= h) ? t_final : t + h;
      y = y5;
      traj.times.push_back(t);
      traj.states.push_back(y);
      traj.error_estimates.push_back(err * tol);
      ++traj.steps;
    } else {
      ++traj.rejected_steps;
    }
    const double factor = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
    h *= std::clamp(factor, 0.1, 5.0);
  }
  return traj;
}

Trajectory integrate(const FlowFn& flow, std::vector<double> y0,
                     const IntegrationSettings& settings) {
  if (settings.method == Method::rk4) return rk4(flow, std::move(y0), settings.t_final, settings.dt);
  return rkf45(flow, std::move(y0), settings.t_final, settings.tol);
}

}  // namespace extkit
