#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "extkit/catalog.hpp"
#include "extkit/integrate.hpp"
#include "extkit/sampling.hpp"
#include "extkit/report.hpp"

namespace extkit::cli {

/// Invalid configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExtensionSettings {
  std::optional<double> c;
  std::optional<double> c0;
  double big_c = 1.0;
  double omega = 0.0;
  int m = 1;
  int n = 1;
  double u_offset = 0.0;
};

struct SamplingSettings {
  std::size_t count = 100;
  std::uint64_t seed = 1;
  std::optional<double> margin;
  std::optional<std::vector<Interval>> box;
  Interval u{0.3, 1.2};
  Interval p_u{-1.0, 1.0};
};

struct FlowSettings {
  IntegrationSettings integration;
  /// "auto" (extended when the entry has G), "extended" or "base".
  std::string flow = "auto";
};

struct StateSettings {
  std::optional<double> u;
  std::optional<double> p_u;
  /// Base coordinates in display order.
  std::optional<std::vector<double>> base;
};

struct CheckSettings {
  std::optional<double> tol;
  double drift_tol = 1e-6;
  std::size_t states = 50;
  double h = 1e-5;
  double threshold = 1e-6;
  int n_max = 8;
  int sign = 1;
  std::string form = "corrected";
  std::optional<std::vector<std::string>> fields;
  bool allow_unverified = false;
  std::size_t csv_every = 1;
};

struct OutputSettings {
  std::optional<std::string> report;
  std::optional<std::string> csv;
};

struct RunConfig {
  std::string system;
  ParamMap params;
  ExtensionSettings extension;
  SamplingSettings sampling;
  FlowSettings integration;
  StateSettings state;
  CheckSettings checks;
  OutputSettings output;
};

/// Every recognised key with its default; optional keys are absent.
Json default_config();

/// Recursive object merge; values in `overlay` win.
Json merge(Json base, const Json& overlay);

/// Validates the merged document and converts it. Unknown keys and
/// ill-typed values throw ConfigError.
RunConfig parse_config(const Json& merged);

ParamValue param_from_json(const std::string& name, const Json& v);

}  // namespace extkit::cli
