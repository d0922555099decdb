#include "extkit/elliptic.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "extkit/errors.hpp"

namespace extkit {

double elliptic_f(double phi, double m) {
  if (!std::isfinite(phi) || !std::isfinite(m)) throw DomainError("elliptic_f arguments must be finite");
  if (phi == 0.0) return 0.0;
  if (m > 0.0) {
    // Largest sin^2 on [0, |phi|].
    const double a = std::abs(phi);
    const double s2 = a >= std::numbers::pi / 2 ? 1.0 : std::sin(a) * std::sin(a);
    if (!(m * s2 < 1.0)) throw DomainError("elliptic_f: m sin^2(theta) reaches 1 on the path");
  }
  auto integrand = [m](double theta) {
    const double s = std::sin(theta);
    return 1.0 / std::sqrt(1.0 - m * s * s);
  };
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(integrand, 0.0, phi, 15, 1e-13);
}

}  // namespace extkit
