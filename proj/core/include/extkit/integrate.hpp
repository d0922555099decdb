#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace extkit {

/// Autonomous right-hand side y' = f(y).
using FlowFn = std::function<std::vector<double>(std::span<const double>)>;

enum class Method { rk4, rkf45 };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

struct IntegrationSettings {
  Method method = Method::rk4;
  double dt = 1e-3;
  double tol = 1e-10;
  double t_final = 10.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  /// Local error estimate of each accepted step (rkf45 only).
  std::vector<double> error_estimates;
  std::size_t steps = 0;
  std::size_t rejected_steps = 0;
};

/// Fixed-step classical Runge-Kutta. The last step is shortened to land on
/// t_final. Errors raised by `flow` are rethrown as IntegrationError carrying
/// the last good time.
Trajectory rk4(const FlowFn& flow, std::vector<double> y0, double t_final, double dt);

/// Adaptive Runge-Kutta-Fehlberg 4(5) with mixed absolute/relative error
/// control at `tol`. Throws IntegrationError on step underflow.
Trajectory rkf45(const FlowFn& flow, std::vector<double> y0, double t_final, double tol);

Trajectory integrate(const FlowFn& flow, std::vector<double> y0,
                     const IntegrationSettings& settings);

}  // namespace extkit
