#include "extkit/report.hpp"

#include <cmath>
#include <cstdio>

namespace extkit::cli {

namespace {

void write(const Json& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(key).dump() + ": ";
        write(value, out, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        write(j[i], out, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float: out += format_double(j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string serialize(const Json& j) {
  std::string out;
  write(j, out, 0);
  out += "\n";
  return out;
}

Json json_vector(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

const Gate& Report::add_gate(const std::string& name, double value, double tol, GateOp op,
                             Json at) {
  Gate g{name, value, tol, op, false, std::move(at)};
  g.pass = op == GateOp::le ? value <= tol : value >= tol;
  gates_.push_back(std::move(g));
  return gates_.back();
}

bool Report::all_pass() const {
  for (const Gate& g : gates_)
    if (!g.pass) return false;
  return true;
}

Json Report::to_json() const {
  Json j;
  j["command"] = command_;
  j["config_echo"] = config_echo_;
  j["metrics"] = metrics_;
  Json gates = Json::array();
  for (const Gate& g : gates_) {
    Json e;
    e["name"] = g.name;
    e["value"] = g.value;
    e["tol"] = g.tol;
    e["op"] = g.op == GateOp::le ? "<=" : ">=";
    e["pass"] = g.pass;
    if (!g.at.is_null()) e["at"] = g.at;
    gates.push_back(std::move(e));
  }
  j["gates"] = std::move(gates);
  j["skipped_points"] = skipped_;
  return j;
}

}  // namespace extkit::cli
