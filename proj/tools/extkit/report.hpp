#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

namespace extkit::cli {

using Json = nlohmann::ordered_json;

enum class GateOp { le, ge };

struct Gate {
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  GateOp op = GateOp::le;
  bool pass = false;
  /// Point, state or other context of the measured value.
  Json at;
};

class Report {
 public:
  Report(std::string command, Json config_echo)
      : command_(std::move(command)), config_echo_(std::move(config_echo)) {}

  Json& metrics() { return metrics_; }
  const std::vector<Gate>& gates() const { return gates_; }

  /// Adds a gate; NaN values never pass.
  const Gate& add_gate(const std::string& name, double value, double tol, GateOp op = GateOp::le,
                       Json at = nullptr);
  void add_skipped(std::size_t n) { skipped_ += n; }

  bool all_pass() const;
  Json to_json() const;

 private:
  std::string command_;
  Json config_echo_;
  Json metrics_ = Json::object();
  std::vector<Gate> gates_;
  std::size_t skipped_ = 0;
};

/// JSON token for v: %.17g (integral values keep a ".0"); non-finite values
/// become the quoted strings "nan", "inf", "-inf".
std::string format_double(double v);

/// Pretty JSON with two-space indentation and every float written with 17
/// significant digits, so identical values always give identical bytes.
std::string serialize(const Json& j);

Json json_vector(const std::vector<double>& v);

}  // namespace extkit::cli
