#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "extkit/extension.hpp"
#include "extkit/poisson.hpp"

namespace extkit::testing {

using RealFn = std::function<double(std::span<const double>)>;

/// Central differences with step h in every coordinate.
inline std::vector<double> fd_gradient(const RealFn& f, std::span<const double> x, double h) {
  std::vector<double> y(x.begin(), x.end()), g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = x[i] + h;
    const double fp = f(y);
    y[i] = x[i] - h;
    const double fm = f(y);
    y[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Four-point second differences with step h, row-major.
inline std::vector<double> fd_hessian(const RealFn& f, std::span<const double> x, double h) {
  const std::size_t n = x.size();
  std::vector<double> y(x.begin(), x.end()), out(n * n);
  auto at = [&](std::size_t i, double si, std::size_t j, double sj) {
    y[i] += si * h;
    y[j] += sj * h;
    const double v = f(y);
    y.assign(x.begin(), x.end());
    return v;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out[i * n + j] = (at(i, 1, j, 1) - at(i, 1, j, -1) - at(i, -1, j, 1) + at(i, -1, j, -1)) /
                       (4.0 * h * h);
  return out;
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// max |a - b| / max(max |b|, floor).
inline double rel_diff(std::span<const double> a, std::span<const double> b, double floor = 1e-12) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d / std::max(max_abs(b), floor);
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

/// L = (p^2 + omega^2 q^2) / 2 on canonical (q, p).
inline HamiltonianSystem harmonic_oscillator(double omega) {
  auto l = ScalarField::real(2, [=](auto x) { return 0.5 * (x[1] * x[1] + omega * omega * x[0] * x[0]); });
  return HamiltonianSystem(PoissonStructure::canonical(2), l);
}

/// G = q solves X_L^2 G = -2 c0 G with c = 0, c0 = omega^2 / 2.
inline GSolution harmonic_g(double omega) {
  const std::vector<PhasePoint> probes = {{1.0, 0.0}, {0.5, 0.5}};
  return GSolution::create(ScalarField::coordinate(2, 0), 0.0, 0.5 * omega * omega, "",
                           Globality::globally_defined, probes);
}

}  // namespace extkit::testing
