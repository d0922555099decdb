#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "extkit/diffkit.hpp"
#include "extkit/extension.hpp"
#include "extkit/poisson.hpp"
#include "extkit/sampling.hpp"

namespace extkit {

/// A named built-in one-argument function with coefficients.
///   polynomial:  sum_i coeffs[i] x^i
///   sine:        amplitude sin(frequency x + phase)
///   cosine:      amplitude cos(frequency x + phase)
///   exponential: amplitude exp(frequency x)
struct FunctionSpec {
  enum class Kind { polynomial, sine, cosine, exponential };

  Kind kind = Kind::polynomial;
  std::vector<double> coeffs;
  double amplitude = 1.0;
  double frequency = 1.0;
  double phase = 0.0;

  static FunctionSpec zero() { return {}; }

  template <class S>
  S operator()(const S& x) const {
    switch (kind) {
      case Kind::polynomial: {
        S out = constant_like(x, 0.0);
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) out = out * x + *it;
        return out;
      }
      case Kind::sine: return amplitude * sin(frequency * x + phase);
      case Kind::cosine: return amplitude * cos(frequency * x + phase);
      case Kind::exponential: return amplitude * exp(frequency * x);
    }
    return constant_like(x, 0.0);
  }

  friend bool operator==(const FunctionSpec&, const FunctionSpec&) = default;
};

std::string to_string(FunctionSpec::Kind kind);
FunctionSpec::Kind function_kind_from_string(const std::string& name);

using ParamValue = std::variant<double, cplx, FunctionSpec>;
using ParamMap = std::map<std::string, ParamValue>;

enum class ParamKind { real, complex, function };

std::string to_string(ParamKind kind);

struct ParamSpec {
  std::string name;
  ParamKind kind = ParamKind::real;
  ParamValue default_value;
  std::string constraint;
};

struct EntryInfo {
  std::string id;
  std::size_t dim = 0;
  bool has_g = false;
  /// "globally defined", "conditionally-single-valued" or "no-extension".
  std::string notes;
  std::string description;
  /// Internal coordinate order.
  std::vector<std::string> coord_names;
  /// Internal indices in the order used for display and CSV output.
  std::vector<std::size_t> display_order;
  std::vector<ParamSpec> params;
  /// Default sampling box over the base coordinates.
  std::vector<Interval> sample_box;
  double sample_margin = 0.0;
};

/// The eight catalog entries, in a fixed order.
const std::vector<EntryInfo>& list_entries();

/// Throws ConstraintError for an unknown id.
const EntryInfo& entry_info(const std::string& id);

struct InstantiateOptions {
  /// Run the residual gate on every G solution and record the outcome.
  bool run_gate = true;
  std::size_t gate_points = 100;
  double gate_tol = 1e-7;
  std::uint64_t gate_seed = 20240607;
};

struct Instance {
  std::string id;
  /// Parameters after defaults were applied.
  ParamMap params;
  HamiltonianSystem system;
  std::vector<GSolution> g_solutions;
  /// Default sampling spec for the base manifold.
  SampleSpec sample_spec;
};

/// Builds the system and its G solutions. Unknown keys, wrong value kinds and
/// constraint violations throw ConstraintError.
Instance instantiate(const std::string& id, const ParamMap& params = {},
                     const InstantiateOptions& options = {});

/// Real parameter lookup on a resolved map (complex values with zero
/// imaginary part are accepted).
double param_real(const ParamMap& params, const std::string& name);
cplx param_complex(const ParamMap& params, const std::string& name);
const FunctionSpec& param_function(const ParamMap& params, const std::string& name);

/// Vortex coordinate change (X1, Y1, X2, Y2) -> (X1t, Y1t, X2t, Y2t) with
/// X1t = (X1 - X2)/2, X2t = (X1 + X2)/2, Y1t = Y1 - Y2, Y2t = Y1 + Y2.
std::array<double, 4> vortex_to_tilde(const std::array<double, 4>& xy);
std::array<double, 4> vortex_from_tilde(const std::array<double, 4>& tilde);

/// Internal vortex coordinates are (X1t, X2t, Y1t, Y2t) so the structure is
/// the canonical one with q = (X1t, X2t).
PhasePoint vortex_point(double x1t, double y1t, double x2t, double y2t);

/// Default alpha = 1/(8 pi).
double vortex_alpha_default();

/// Exponent Q1 sqrt(2 c0) / (4 alpha k^3) of the equal-intensity vortex
/// solution, with Q1 = k^2 exp(-L/(alpha k^2)) = Y1t^2 + 4 k^2 X1t^2.
double vortex_equal_exponent(double k, double c0, double alpha, const PhasePoint& x);

/// True iff the exponent is within 1e-9 of an integer.
bool single_valued(double exponent);

}  // namespace extkit
