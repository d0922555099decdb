#pragma once

namespace extkit {

/// Incomplete elliptic integral of the first kind in parameter form,
/// F(phi | m) = int_0^phi dtheta / sqrt(1 - m sin^2 theta), by adaptive
/// Gauss-Kronrod quadrature. Throws DomainError unless m sin^2 theta < 1 on
/// the whole path.
double elliptic_f(double phi, double m);

}  // namespace extkit
