#include "extkit/gamma.hpp"

#include <cmath>

#include "extkit/errors.hpp"

namespace extkit {

double tagged_sin(double kappa, double x) {
  if (kappa > 0.0) {
    const double r = std::sqrt(kappa);
    return std::sin(r * x) / r;
  }
  if (kappa < 0.0) {
    const double r = std::sqrt(-kappa);
    return std::sinh(r * x) / r;
  }
  return x;
}

double tagged_cos(double kappa, double x) {
  if (kappa > 0.0) return std::cos(std::sqrt(kappa) * x);
  if (kappa < 0.0) return std::cosh(std::sqrt(-kappa) * x);
  return 1.0;
}

double tagged_tan(double kappa, double x) {
  const double s = tagged_sin(kappa, x);
  const double c = tagged_cos(kappa, x);
  if (std::abs(c) <= kPoleTolerance * std::abs(s)) throw PoleError("tagged tangent pole");
  return s / c;
}

TaggedTrig tagged_trig(double kappa, double x) {
  return {tagged_sin(kappa, x), tagged_cos(kappa, x), tagged_tan(kappa, x)};
}

GammaValue gamma_eval(const GammaParams& params, double u) {
  const double c = params.c();
  const double big_c = params.big_c();
  const double shifted = u - params.u_offset();
  if (c == 0.0) return {-big_c * shifted, -big_c, 0.0};

  const double kappa = big_c / c;
  const double s = tagged_sin(kappa, c * shifted);
  const double co = tagged_cos(kappa, c * shifted);
  if (s == 0.0 || std::abs(s) <= kPoleTolerance * std::abs(co))
    throw PoleError("gamma pole: S_kappa(c u) = 0");
  const double g = co / s;
  const double d1 = -c / (s * s);
  return {g, d1, -2.0 * c * g * d1};
}

}  // namespace extkit
