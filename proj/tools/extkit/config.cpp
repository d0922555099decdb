#include "extkit/config.hpp"

#include <cmath>
#include <set>

namespace extkit::cli {

namespace {

void only_keys(const Json& obj, const std::string& where, std::set<std::string> allowed) {
  if (!obj.is_object()) throw ConfigError("'" + where + "' must be an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

double get_double(const Json& obj, const std::string& key, const std::string& where) {
  const Json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(where + "." + key + " must be finite");
  return d;
}

std::optional<double> opt_double(const Json& obj, const std::string& key,
                                 const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return get_double(obj, key, where);
}

long long get_int(const Json& obj, const std::string& key, const std::string& where) {
  const Json& v = obj.at(key);
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<long long>(d);
  }
  throw ConfigError(where + "." + key + " must be an integer");
}

std::string get_string(const Json& obj, const std::string& key, const std::string& where) {
  const Json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + " must be a string");
  return v.get<std::string>();
}

Interval get_interval(const Json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigError(where + " must be a [lo, hi] pair of numbers");
  Interval iv{v[0].get<double>(), v[1].get<double>()};
  if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.hi < iv.lo)
    throw ConfigError(where + " must satisfy lo <= hi with finite ends");
  return iv;
}

FunctionSpec function_from_json(const std::string& name, const Json& v) {
  only_keys(v, "params." + name, {"kind", "coeffs", "amplitude", "frequency", "phase"});
  FunctionSpec f;
  try {
    f.kind = function_kind_from_string(get_string(v, "kind", "params." + name));
  } catch (const extkit::Error& e) {
    throw ConfigError(e.what());
  }
  const std::string where = "params." + name;
  if (v.contains("coeffs")) {
    if (!v["coeffs"].is_array()) throw ConfigError(where + ".coeffs must be an array");
    for (const Json& c : v["coeffs"]) {
      if (!c.is_number()) throw ConfigError(where + ".coeffs must hold numbers");
      f.coeffs.push_back(c.get<double>());
    }
  }
  if (auto a = opt_double(v, "amplitude", where)) f.amplitude = *a;
  if (auto w = opt_double(v, "frequency", where)) f.frequency = *w;
  if (auto p = opt_double(v, "phase", where)) f.phase = *p;
  return f;
}

}  // namespace

ParamValue param_from_json(const std::string& name, const Json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_object() && v.contains("kind")) return function_from_json(name, v);
  if (v.is_object()) {
    only_keys(v, "params." + name, {"re", "im"});
    const double re = v.contains("re") ? get_double(v, "re", "params." + name) : 0.0;
    const double im = v.contains("im") ? get_double(v, "im", "params." + name) : 0.0;
    return cplx(re, im);
  }
  throw ConfigError("params." + name +
                    " must be a number, a {\"re\", \"im\"} object or a function object");
}

Json default_config() {
  Json j;
  j["system"] = "";
  j["params"] = Json::object();
  j["extension"] = {{"C", 1.0}, {"Omega", 0.0}, {"m", 1}, {"n", 1}, {"u_offset", 0.0}};
  j["sampling"] = {{"count", 100}, {"seed", 1}, {"u", {0.3, 1.2}}, {"p_u", {-1.0, 1.0}}};
  j["integration"] = {
      {"method", "rk4"}, {"dt", 1e-3}, {"tol", 1e-10}, {"t_final", 10.0}, {"flow", "auto"}};
  j["state"] = Json::object();
  j["checks"] = {{"drift_tol", 1e-6}, {"states", 50},   {"h", 1e-5},
                 {"threshold", 1e-6}, {"n_max", 8},     {"sign", 1},
                 {"form", "corrected"}, {"allow_unverified", false}, {"csv_every", 1}};
  j["output"] = Json::object();
  return j;
}

Json merge(Json base, const Json& overlay) {
  if (!base.is_object() || !overlay.is_object()) return overlay;
  for (const auto& [key, value] : overlay.items()) {
    if (base.contains(key) && base[key].is_object() && value.is_object() && key != "params")
      base[key] = merge(base[key], value);
    else if (key == "params" && base.contains(key) && base[key].is_object() && value.is_object())
      for (const auto& [pk, pv] : value.items()) base[key][pk] = pv;
    else
      base[key] = value;
  }
  return base;
}

RunConfig parse_config(const Json& j) {
  only_keys(j, "config",
            {"system", "params", "extension", "sampling", "integration", "state", "checks",
             "output"});
  RunConfig cfg;
  cfg.system = get_string(j, "system", "config");

  const Json& params = j.at("params");
  if (!params.is_object()) throw ConfigError("'params' must be an object");
  for (const auto& [name, value] : params.items()) cfg.params[name] = param_from_json(name, value);

  const Json& ext = j.at("extension");
  only_keys(ext, "extension", {"c", "c0", "C", "Omega", "m", "n", "u_offset"});
  cfg.extension.c = opt_double(ext, "c", "extension");
  cfg.extension.c0 = opt_double(ext, "c0", "extension");
  cfg.extension.big_c = get_double(ext, "C", "extension");
  cfg.extension.omega = get_double(ext, "Omega", "extension");
  const long long m = get_int(ext, "m", "extension"), n = get_int(ext, "n", "extension");
  if (m < 1 || n < 1 || m > 64 || n > 64) throw ConfigError("extension.m and .n must be in 1..64");
  cfg.extension.m = static_cast<int>(m);
  cfg.extension.n = static_cast<int>(n);
  cfg.extension.u_offset = get_double(ext, "u_offset", "extension");

  const Json& smp = j.at("sampling");
  only_keys(smp, "sampling", {"count", "seed", "margin", "box", "u", "p_u"});
  const long long count = get_int(smp, "count", "sampling");
  if (count < 1) throw ConfigError("sampling.count must be at least 1");
  cfg.sampling.count = static_cast<std::size_t>(count);
  const Json& seed = smp.at("seed");
  if (!seed.is_number_integer() || (seed.is_number_integer() && seed.get<long long>() < 0 &&
                                    !seed.is_number_unsigned()))
    throw ConfigError("sampling.seed must be a non-negative integer");
  cfg.sampling.seed = seed.get<std::uint64_t>();
  cfg.sampling.margin = opt_double(smp, "margin", "sampling");
  if (cfg.sampling.margin && *cfg.sampling.margin < 0.0)
    throw ConfigError("sampling.margin must be non-negative");
  if (smp.contains("box")) {
    if (!smp["box"].is_array()) throw ConfigError("sampling.box must be an array of pairs");
    std::vector<Interval> box;
    for (const Json& iv : smp["box"]) box.push_back(get_interval(iv, "sampling.box entry"));
    cfg.sampling.box = box;
  }
  cfg.sampling.u = get_interval(smp.at("u"), "sampling.u");
  cfg.sampling.p_u = get_interval(smp.at("p_u"), "sampling.p_u");

  const Json& integ = j.at("integration");
  only_keys(integ, "integration", {"method", "dt", "tol", "t_final", "flow"});
  try {
    cfg.integration.integration.method =
        method_from_string(get_string(integ, "method", "integration"));
  } catch (const extkit::Error& e) {
    throw ConfigError(e.what());
  }
  cfg.integration.integration.dt = get_double(integ, "dt", "integration");
  cfg.integration.integration.tol = get_double(integ, "tol", "integration");
  cfg.integration.integration.t_final = get_double(integ, "t_final", "integration");
  if (!(cfg.integration.integration.dt > 0.0) || !(cfg.integration.integration.tol > 0.0) ||
      !(cfg.integration.integration.t_final >= 0.0))
    throw ConfigError("integration.dt and .tol must be positive, t_final non-negative");
  cfg.integration.flow = get_string(integ, "flow", "integration");
  if (cfg.integration.flow != "auto" && cfg.integration.flow != "extended" &&
      cfg.integration.flow != "base")
    throw ConfigError("integration.flow must be auto, extended or base");

  const Json& st = j.at("state");
  only_keys(st, "state", {"u", "p_u", "base"});
  cfg.state.u = opt_double(st, "u", "state");
  cfg.state.p_u = opt_double(st, "p_u", "state");
  if (st.contains("base")) {
    if (!st["base"].is_array()) throw ConfigError("state.base must be an array of numbers");
    std::vector<double> base;
    for (const Json& v : st["base"]) {
      if (!v.is_number()) throw ConfigError("state.base must be an array of numbers");
      base.push_back(v.get<double>());
    }
    cfg.state.base = base;
  }

  const Json& ck = j.at("checks");
  only_keys(ck, "checks",
            {"tol", "drift_tol", "states", "h", "threshold", "n_max", "sign", "form", "fields",
             "allow_unverified", "csv_every"});
  cfg.checks.tol = opt_double(ck, "tol", "checks");
  cfg.checks.drift_tol = get_double(ck, "drift_tol", "checks");
  const long long states = get_int(ck, "states", "checks");
  if (states < 1) throw ConfigError("checks.states must be at least 1");
  cfg.checks.states = static_cast<std::size_t>(states);
  cfg.checks.h = get_double(ck, "h", "checks");
  if (!(cfg.checks.h > 0.0)) throw ConfigError("checks.h must be positive");
  cfg.checks.threshold = get_double(ck, "threshold", "checks");
  const long long n_max = get_int(ck, "n_max", "checks");
  if (n_max < 1 || n_max > 64) throw ConfigError("checks.n_max must be in 1..64");
  cfg.checks.n_max = static_cast<int>(n_max);
  const long long sign = get_int(ck, "sign", "checks");
  if (sign != 1 && sign != -1) throw ConfigError("checks.sign must be 1 or -1");
  cfg.checks.sign = static_cast<int>(sign);
  cfg.checks.form = get_string(ck, "form", "checks");
  if (cfg.checks.form != "corrected" && cfg.checks.form != "literal")
    throw ConfigError("checks.form must be corrected or literal");
  if (ck.contains("fields")) {
    if (!ck["fields"].is_array()) throw ConfigError("checks.fields must be an array of names");
    std::vector<std::string> fields;
    for (const Json& f : ck["fields"]) {
      if (!f.is_string()) throw ConfigError("checks.fields must be an array of names");
      fields.push_back(f.get<std::string>());
    }
    cfg.checks.fields = fields;
  }
  if (!ck.at("allow_unverified").is_boolean())
    throw ConfigError("checks.allow_unverified must be a boolean");
  cfg.checks.allow_unverified = ck["allow_unverified"].get<bool>();
  const long long every = get_int(ck, "csv_every", "checks");
  if (every < 1) throw ConfigError("checks.csv_every must be at least 1");
  cfg.checks.csv_every = static_cast<std::size_t>(every);

  const Json& out = j.at("output");
  only_keys(out, "output", {"report", "csv"});
  if (out.contains("report")) cfg.output.report = get_string(out, "report", "output");
  if (out.contains("csv")) cfg.output.csv = get_string(out, "csv", "output");
  return cfg;
}

}  // namespace extkit::cli
