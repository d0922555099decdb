#pragma once

#include <optional>

namespace extkit {

/// Relative size below which a tagged sine/cosine counts as a zero.
inline constexpr double kPoleTolerance = 1e-12;

/// Tagged trigonometric functions: trigonometric for kappa > 0, linear for
/// kappa = 0, hyperbolic for kappa < 0.
double tagged_sin(double kappa, double x);
double tagged_cos(double kappa, double x);
/// S/C; throws PoleError where C vanishes.
double tagged_tan(double kappa, double x);

struct TaggedTrig {
  double s;
  double c;
  double t;
};

TaggedTrig tagged_trig(double kappa, double x);

/// Parameters of gamma' + c gamma^2 + C = 0. The solution is fixed up to a
/// translation of u by `u_offset`.
class GammaParams {
 public:
  GammaParams(double c, double big_c, double u_offset = 0.0)
      : c_(c), big_c_(big_c), u_offset_(u_offset) {}

  double c() const noexcept { return c_; }
  double big_c() const noexcept { return big_c_; }
  double u_offset() const noexcept { return u_offset_; }
  /// C/c, defined only for c != 0.
  std::optional<double> kappa() const {
    if (c_ == 0.0) return std::nullopt;
    return big_c_ / c_;
  }
  /// gamma is identically zero.
  bool degenerate() const noexcept { return c_ == 0.0 && big_c_ == 0.0; }

 private:
  double c_;
  double big_c_;
  double u_offset_;
};

struct GammaValue {
  double value;
  double d1;
  double d2;
};

/// gamma, gamma', gamma''. gamma'' comes from differentiating the ODE:
/// gamma'' = -2 c gamma gamma'. Throws PoleError where S_kappa(c u) = 0.
GammaValue gamma_eval(const GammaParams& params, double u);

}  // namespace extkit
