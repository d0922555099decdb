#include "extkit/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "extkit/catalog.hpp"
#include "extkit/config.hpp"
#include "extkit/errors.hpp"
#include "extkit/extension.hpp"
#include "extkit/integrate.hpp"
#include "extkit/report.hpp"
#include "extkit/sampling.hpp"
#include "extkit/verify.hpp"

namespace extkit::cli {

namespace {

struct Options {
  std::optional<std::string> config_path;
  std::vector<std::string> params;
  bool json = false;
  Json overlay = Json::object();
};

// ---------------------------------------------------------------------------
// Command-line plumbing
// ---------------------------------------------------------------------------

template <class T>
void bind_option(CLI::App* app, const std::string& flag, Json& overlay, const std::string& section,
          const std::string& key, const std::string& help) {
  app->add_option_function<T>(
      flag,
      [&overlay, section, key](const T& v) {
        if (section.empty())
          overlay[key] = v;
        else
          overlay[section][key] = v;
      },
      help);
}

void add_system_options(CLI::App* app, Options& o) {
  app->add_option("--config", o.config_path, "JSON configuration file");
  bind_option<std::string>(app, "--system", o.overlay, "", "system", "catalog entry id");
  app->add_option("--param", o.params, "system parameter KEY=JSON (repeatable)")
      ->allow_extra_args(false);
}

void add_run_options(CLI::App* app, Options& o) {
  add_system_options(app, o);
  Json& j = o.overlay;
  bind_option<std::uint64_t>(app, "--seed", j, "sampling", "seed", "sampling seed");
  bind_option<long long>(app, "--samples", j, "sampling", "count", "number of sampled points");
  bind_option<double>(app, "--margin", j, "sampling", "margin", "distance kept from singular sets");

  bind_option<double>(app, "--c", j, "extension", "c", "extension parameter c");
  bind_option<double>(app, "--c0", j, "extension", "c0", "extension parameter c0");
  bind_option<double>(app, "--C", j, "extension", "C", "gamma parameter C");
  bind_option<double>(app, "--omega", j, "extension", "Omega", "coefficient of 1/gamma^2");
  bind_option<long long>(app, "--m", j, "extension", "m", "index m");
  bind_option<long long>(app, "--n", j, "extension", "n", "index n");
  bind_option<double>(app, "--u-offset", j, "extension", "u_offset", "shift of u in gamma");

  bind_option<std::string>(app, "--method", j, "integration", "method", "rk4 or rkf45");
  bind_option<double>(app, "--dt", j, "integration", "dt", "rk4 step");
  bind_option<double>(app, "--tol", j, "integration", "tol", "rkf45 tolerance");
  bind_option<double>(app, "--t-final", j, "integration", "t_final", "integration time");
  bind_option<std::string>(app, "--flow", j, "integration", "flow", "auto, extended or base");

  bind_option<double>(app, "--u", j, "state", "u", "initial u");
  bind_option<double>(app, "--p-u", j, "state", "p_u", "initial p_u");
  app->add_option_function<std::vector<double>>(
         "--base", [&j](const std::vector<double>& v) { j["state"]["base"] = v; },
         "initial base point, comma separated, display order")
      ->delimiter(',')
      ->allow_extra_args(false);

  bind_option<double>(app, "--gate-tol", j, "checks", "tol", "gate tolerance");
  bind_option<double>(app, "--drift-tol", j, "checks", "drift_tol", "relative drift tolerance");
  bind_option<long long>(app, "--states", j, "checks", "states", "number of sampled extended states");
  bind_option<double>(app, "--fd-step", j, "checks", "h", "finite-difference step");
  bind_option<double>(app, "--threshold", j, "checks", "threshold", "relative singular-value cutoff");
  bind_option<long long>(app, "--n-max", j, "checks", "n_max", "largest n in gn-compare");
  bind_option<long long>(app, "--sign", j, "checks", "sign", "sign in X_L G = sign sqrt(...) G");
  bind_option<std::string>(app, "--form", j, "checks", "form", "corrected or literal");
  app->add_option_function<std::vector<std::string>>(
         "--fields", [&j](const std::vector<std::string>& v) { j["checks"]["fields"] = v; },
         "observables for rank, comma separated")
      ->delimiter(',')
      ->allow_extra_args(false);
  app->add_flag_callback(
      "--allow-unverified", [&j] { j["checks"]["allow_unverified"] = true; },
      "build extensions from G solutions that failed their residual gate");
  bind_option<long long>(app, "--csv-every", j, "checks", "csv_every", "write every k-th CSV row");

  bind_option<std::string>(app, "--out", j, "output", "report", "also write the report here");
  bind_option<std::string>(app, "--csv", j, "output", "csv", "trajectory CSV path");
}

std::uint64_t parse_seed(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("EXTKIT_SEED must be a non-negative integer, got '" + s + "'");
  return v;
}

/// default < config file < EXTKIT_SEED < flags.
Json assemble(const Options& o) {
  Json merged = default_config();
  if (o.config_path) {
    std::ifstream in(*o.config_path);
    if (!in) throw ConfigError("cannot read config file '" + *o.config_path + "'");
    Json file;
    try {
      file = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!file.is_object()) throw ConfigError("config file must hold a JSON object");
    merged = merge(merged, file);
  }
  if (const char* seed = std::getenv("EXTKIT_SEED"))
    merged["sampling"]["seed"] = parse_seed(seed);
  Json overlay = o.overlay;
  for (const std::string& p : o.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--param expects KEY=JSON, got '" + p + "'");
    Json value;
    try {
      value = Json::parse(p.substr(eq + 1));
    } catch (const Json::parse_error&) {
      throw ConfigError("--param value for '" + p.substr(0, eq) + "' is not valid JSON");
    }
    overlay["params"][p.substr(0, eq)] = value;
  }
  return merge(merged, overlay);
}

// ---------------------------------------------------------------------------
// Catalog helpers
// ---------------------------------------------------------------------------

const EntryInfo& require_entry(const RunConfig& cfg) {
  if (cfg.system.empty()) throw ConfigError("no system given; use --system or \"system\"");
  return entry_info(cfg.system);
}

Instance load(const RunConfig& cfg, bool gate) {
  InstantiateOptions options;
  options.run_gate = gate;
  return instantiate(cfg.system, cfg.params, options);
}

const GSolution& first_g(const Instance& inst) {
  if (inst.g_solutions.empty()) throw ConstraintError("entry has no G solution");
  return inst.g_solutions.front();
}

template <class T>
std::vector<T> to_internal(const EntryInfo& info, const std::vector<T>& display,
                           const std::string& what) {
  if (display.size() != info.dim)
    throw ConfigError(what + " needs " + std::to_string(info.dim) + " entries, got " +
                      std::to_string(display.size()));
  std::vector<T> out(info.dim);
  for (std::size_t i = 0; i < info.dim; ++i) out[info.display_order[i]] = display[i];
  return out;
}

std::vector<std::string> display_names(const EntryInfo& info) {
  std::vector<std::string> out;
  for (std::size_t i : info.display_order) out.push_back(info.coord_names[i]);
  return out;
}

Json point_json(const EntryInfo& info, std::span<const double> base) {
  Json j = Json::object();
  for (std::size_t i : info.display_order) j[info.coord_names[i]] = base[i];
  return j;
}

Json ext_state_json(const EntryInfo& info, std::span<const double> flat) {
  Json j = Json::object();
  j["u"] = flat[0];
  j["p_u"] = flat[1];
  for (std::size_t i : info.display_order) j[info.coord_names[i]] = flat[2 + i];
  return j;
}

SampleSpec base_spec(const RunConfig& cfg, const EntryInfo& info, const Instance& inst,
                     std::size_t count) {
  SampleSpec s = inst.sample_spec;
  s.count = count;
  s.seed = cfg.sampling.seed;
  if (cfg.sampling.margin) s.margin = *cfg.sampling.margin;
  if (cfg.sampling.box) s.box = to_internal(info, *cfg.sampling.box, "sampling.box");
  return s;
}

ExtensionParams extension_params(const RunConfig& cfg, const GSolution& g) {
  ExtensionParams p;
  p.c = cfg.extension.c.value_or(g.c);
  p.c0 = cfg.extension.c0.value_or(g.c0);
  p.big_c = cfg.extension.big_c;
  p.omega = cfg.extension.omega;
  p.m = cfg.extension.m;
  p.n = cfg.extension.n;
  p.u_offset = cfg.extension.u_offset;
  return p;
}

Extension build_extension(const RunConfig& cfg, const Instance& inst) {
  const GSolution& g = first_g(inst);
  return Extension::build(inst.system, g, extension_params(cfg, g), cfg.checks.allow_unverified);
}

std::vector<ExtendedState> sample_states(const RunConfig& cfg, const EntryInfo& info,
                                         const Instance& inst, const Extension& ext,
                                         std::size_t count) {
  return sample_extended_states(ext, base_spec(cfg, info, inst, count), cfg.sampling.u,
                                cfg.sampling.p_u);
}

ExtendedState initial_state(const RunConfig& cfg, const EntryInfo& info, const Instance& inst,
                            const Extension& ext) {
  ExtendedState s;
  if (!(cfg.state.u && cfg.state.p_u && cfg.state.base))
    s = sample_states(cfg, info, inst, ext, 1).front();
  if (cfg.state.u) s.u = *cfg.state.u;
  if (cfg.state.p_u) s.p_u = *cfg.state.p_u;
  if (cfg.state.base) s.base = PhasePoint(to_internal(info, *cfg.state.base, "state.base"));
  if (ext.singular_at(s)) throw DomainError("initial state is singular for this extension");
  return s;
}

std::vector<PhasePoint> sample_base(const RunConfig& cfg, const EntryInfo& info,
                                    const Instance& inst, std::size_t count) {
  const HamiltonianSystem& sys = inst.system;
  return sample_points(base_spec(cfg, info, inst, count),
                       [&sys](std::span<const double> x, double margin) {
                         return sys.singular_at(x, margin);
                       })
      .points;
}

PhasePoint initial_base(const RunConfig& cfg, const EntryInfo& info, const Instance& inst) {
  PhasePoint x = cfg.state.base ? PhasePoint(to_internal(info, *cfg.state.base, "state.base"))
                                : sample_base(cfg, info, inst, 1).front();
  if (inst.system.singular_at(x.span())) throw DomainError("initial point is singular");
  return x;
}

Json param_json(const ParamValue& v) {
  if (const double* d = std::get_if<double>(&v)) return *d;
  if (const cplx* z = std::get_if<cplx>(&v)) return Json{{"re", z->real()}, {"im", z->imag()}};
  const FunctionSpec& f = std::get<FunctionSpec>(v);
  Json j = {{"kind", to_string(f.kind)}};
  if (f.kind == FunctionSpec::Kind::polynomial) {
    j["coeffs"] = json_vector(f.coeffs);
  } else {
    j["amplitude"] = f.amplitude;
    j["frequency"] = f.frequency;
    if (f.kind != FunctionSpec::Kind::exponential) j["phase"] = f.phase;
  }
  return j;
}

std::string param_text(const ParamValue& v) {
  if (const double* d = std::get_if<double>(&v)) return format_double(*d);
  if (const cplx* z = std::get_if<cplx>(&v))
    return format_double(z->real()) + (z->imag() < 0 ? "-" : "+") +
           format_double(std::abs(z->imag())) + "i";
  return param_json(v).dump();
}

Json entry_json(const EntryInfo& e) {
  Json j;
  j["id"] = e.id;
  j["dim"] = e.dim;
  j["has_g"] = e.has_g;
  j["notes"] = e.notes;
  j["description"] = e.description;
  j["coordinates"] = display_names(e);
  Json params = Json::array();
  for (const ParamSpec& p : e.params)
    params.push_back({{"name", p.name},
                      {"kind", to_string(p.kind)},
                      {"default", param_json(p.default_value)},
                      {"constraint", p.constraint}});
  j["params"] = params;
  Json box = Json::array();
  for (std::size_t i : e.display_order) box.push_back({e.sample_box[i].lo, e.sample_box[i].hi});
  j["sample_box"] = box;
  j["sample_margin"] = e.sample_margin;
  return j;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << text;
  if (!f) throw ConfigError("failed writing '" + path + "'");
}

int emit(const Report& report, const RunConfig& cfg, std::ostream& out) {
  const std::string text = serialize(report.to_json());
  out << text;
  if (cfg.output.report) write_file(*cfg.output.report, text);
  return report.all_pass() ? 0 : 1;
}

std::size_t argmax_deviation(const std::vector<double>& s) {
  std::size_t best = 0;
  double worst = -1.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double d = std::abs(s[i] - s[0]);
    if (d > worst || std::isnan(d)) {
      worst = d;
      best = i;
      if (std::isnan(d)) break;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_list(const Options& o, std::ostream& out) {
  const auto& entries = list_entries();
  if (o.json) {
    Json arr = Json::array();
    for (const EntryInfo& e : entries)
      arr.push_back({{"id", e.id},
                     {"dim", e.dim},
                     {"has_g", e.has_g},
                     {"notes", e.notes},
                     {"description", e.description}});
    out << serialize(arr);
    return 0;
  }
  out << std::left << std::setw(18) << "id" << std::setw(5) << "dim" << std::setw(5) << "G"
      << std::setw(29) << "notes"
      << "description\n";
  for (const EntryInfo& e : entries)
    out << std::left << std::setw(18) << e.id << std::setw(5) << e.dim << std::setw(5)
        << (e.has_g ? "yes" : "no") << std::setw(29) << e.notes << e.description << "\n";
  return 0;
}

int cmd_show(const RunConfig& cfg, const Options& o, std::ostream& out) {
  const EntryInfo& info = require_entry(cfg);
  InstantiateOptions options;
  options.run_gate = false;
  const Instance inst = instantiate(cfg.system, cfg.params, options);
  Json j = entry_json(info);
  Json resolved = Json::object();
  for (const auto& [name, value] : inst.params) resolved[name] = param_json(value);
  j["resolved_params"] = resolved;
  Json gs = Json::array();
  for (const GSolution& g : inst.g_solutions)
    gs.push_back({{"c", g.c},
                  {"c0", g.c0},
                  {"constraints", g.constraints},
                  {"globality", to_string(g.globality)},
                  {"codomain", to_string(g.g.codomain())}});
  j["g_solutions"] = gs;
  if (o.json) {
    out << serialize(j);
    return 0;
  }
  out << "id:           " << info.id << "\n"
      << "description:  " << info.description << "\n"
      << "dimension:    " << info.dim << "\n"
      << "notes:        " << info.notes << "\n";
  out << "coordinates: ";
  for (const std::string& n : display_names(info)) out << " " << n;
  out << "\nparameters:\n";
  for (const ParamSpec& p : info.params) {
    out << "  " << std::left << std::setw(10) << p.name << std::setw(10) << to_string(p.kind)
        << std::setw(24) << param_text(inst.params.at(p.name));
    if (!p.constraint.empty()) out << p.constraint;
    out << "\n";
  }
  out << "sample box:  ";
  for (std::size_t i : info.display_order)
    out << " [" << format_double(info.sample_box[i].lo) << ", "
        << format_double(info.sample_box[i].hi) << "]";
  out << "\nsample margin: " << format_double(info.sample_margin) << "\n";
  if (inst.g_solutions.empty()) out << "G solutions:  none\n";
  for (const GSolution& g : inst.g_solutions)
    out << "G solution:   c = " << format_double(g.c) << ", c0 = " << format_double(g.c0) << ", "
        << to_string(g.g.codomain()) << ", " << to_string(g.globality) << "; " << g.constraints
        << "\n";
  return 0;
}

int cmd_check_pde(const RunConfig& cfg, const Json& echo, std::ostream& out) {
  const EntryInfo& info = require_entry(cfg);
  const Instance inst = load(cfg, false);
  if (inst.g_solutions.empty()) throw ConstraintError("entry has no G solution");
  Report report("check-pde", echo);
  const double tol = cfg.checks.tol.value_or(1e-7);
  const SampleSpec spec = base_spec(cfg, info, inst, cfg.sampling.count);
  Json per = Json::array();
  for (std::size_t i = 0; i < inst.g_solutions.size(); ++i) {
    const GSolution& g = inst.g_solutions[i];
    const double c = cfg.extension.c.value_or(g.c);
    const double c0 = cfg.extension.c0.value_or(g.c0);
    const ResidualReport r = pde_residual(inst.system, g, c, c0, spec);
    const double shifted = c0 + 0.1 * std::max(std::abs(c0), std::abs(c));
    const ResidualReport neg = pde_residual(inst.system, g, c, shifted, spec);
    const std::string suffix =
        inst.g_solutions.size() > 1 ? "[" + std::to_string(i) + "]" : std::string();
    per.push_back({{"c", c},
                   {"c0", c0},
                   {"constraints", g.constraints},
                   {"globality", to_string(g.globality)},
                   {"codomain", to_string(g.g.codomain())},
                   {"points", r.points.size()},
                   {"max", r.max},
                   {"mean", r.mean},
                   {"skipped", r.skipped},
                   {"domain_failures", r.domain_failures},
                   {"negative_control", {{"c0", shifted}, {"max", neg.max}, {"mean", neg.mean}}}});
    report.add_gate("pde_residual" + suffix, r.max, tol, GateOp::le,
                    point_json(info, r.points[r.worst].x.span()));
    report.add_gate("negative_control" + suffix, neg.max, 1e-2, GateOp::ge,
                    point_json(info, neg.points[neg.worst].x.span()));
    report.add_skipped(r.skipped);
  }
  report.metrics()["system"] = cfg.system;
  report.metrics()["g_solutions"] = per;
  return emit(report, cfg, out);
}

int cmd_check_kn(const RunConfig& cfg, const Json& echo, std::ostream& out) {
  const EntryInfo& info = require_entry(cfg);
  const Instance inst = load(cfg, false);
  Report report("check-kn", echo);
  const double tol = cfg.checks.tol.value_or(1e-5);
  const SampleSpec spec = base_spec(cfg, info, inst, cfg.sampling.count);
  LocalField g;
  double c = 0.0, c0 = 0.0;
  if (cfg.system == "euler_top") {
    EulerKnParams p;
    p.i1 = param_real(inst.params, "I1");
    p.i2 = param_real(inst.params, "I2");
    p.i3 = param_real(inst.params, "I3");
    p.c = cfg.extension.c.value_or(0.0);
    p.c0 = cfg.extension.c0.value_or(-0.5);
    p.sign = cfg.checks.sign;
    p.form = cfg.checks.form == "literal" ? KnForm::literal : KnForm::corrected;
    g = euler_kn_g(p);
    c = p.c;
    c0 = p.c0;
    report.metrics()["form"] = cfg.checks.form;
  } else {
    const GSolution& gsol = first_g(inst);
    g = local_field(gsol.g);
    c = cfg.extension.c.value_or(gsol.c);
    c0 = cfg.extension.c0.value_or(gsol.c0);
  }
  const ResidualReport r = kn_residual(inst.system, g, c, c0, cfg.checks.sign, spec);
  Json& m = report.metrics();
  m["system"] = cfg.system;
  m["c"] = c;
  m["c0"] = c0;
  m["sign"] = cfg.checks.sign;
  m["points"] = r.points.size();
  m["domain_failures"] = r.domain_failures;
  m["max"] = r.max;
  m["mean"] = r.mean;
  Json at = r.points.empty() ? Json(nullptr) : point_json(info, r.points[r.worst].x.span());
  report.add_gate("kn_residual", r.max, tol, GateOp::le, at);
  report.add_skipped(r.skipped + r.domain_failures);
  return emit(report, cfg, out);
}

Json extension_metrics(const Extension& ext) {
  const ExtensionParams& req = ext.requested();
  const ExtensionParams& eff = ext.params();
  Json j = {{"c", eff.c},           {"c0", eff.c0},         {"C", eff.big_c},
            {"Omega", eff.omega},   {"u_offset", eff.u_offset},
            {"m", req.m},           {"n", req.n},           {"k", req.k()},
            {"effective_m", eff.m}, {"effective_n", eff.n}, {"doubled", ext.doubled()}};
  if (const auto kappa = eff.kappa()) j["kappa"] = *kappa;
  return j;
}

const std::vector<std::pair<std::string, std::string>> kSpotPairs = {
    {"H", "K_re"}, {"H", "K_im"}, {"H", "L"}};

int cmd_extend(const RunConfig& cfg, const Json& echo, std::ostream& out) {
  const EntryInfo& info = require_entry(cfg);
  const Instance inst = load(cfg, true);
  const Extension ext = build_extension(cfg, inst);
  const ExtendedState s = initial_state(cfg, info, inst, ext);
  const std::vector<double> flat = s.flatten();
  Report report("extend", echo);
  const double tol = cfg.checks.tol.value_or(1e-5);
  const cplx k = ext.characteristic(s);
  Json& m = report.metrics();
  m["system"] = cfg.system;
  m["extension"] = extension_metrics(ext);
  m["state"] = ext_state_json(info, flat);
  m["H"] = ext.hamiltonian(s);
  m["L"] = ext.base_hamiltonian(s);
  m["K_re"] = k.real();
  m["K_im"] = k.imag();
  const auto obs = extension_observables(ext);
  const PoissonStructure structure = ext.structure();
  Json brackets = Json::array();
  for (const auto& [a, b] : kSpotPairs) {
    const BracketResult r = fd_bracket(structure, obs.at(a), obs.at(b), flat, cfg.checks.h);
    const std::string name = "{" + a + "," + b + "}";
    brackets.push_back(
        {{"pair", name}, {"value", r.value}, {"scale", r.scale}, {"normalized", r.normalized}});
    report.add_gate("bracket" + name, r.normalized, tol, GateOp::le, ext_state_json(info, flat));
  }
  m["brackets"] = brackets;
  return emit(report, cfg, out);
}

int cmd_integrate(const RunConfig& cfg, const Json& echo, std::ostream& out) {
  const EntryInfo& info = require_entry(cfg);
  const std::string& flow_kind = cfg.integration.flow;
  const bool extended = flow_kind == "extended" || (flow_kind == "auto" && info.has_g);
  const Instance inst = load(cfg, extended);
  Report report("integrate", echo);
  const IntegrationSettings& settings = cfg.integration.integration;

  std::optional<Extension> ext;
  std::vector<double> y0;
  FlowFn flow;
  std::map<std::string, FlatFn> obs;
  std::vector<std::string> columns = {"t"};
  std::vector<std::size_t> state_index;
  std::vector<std::string> csv_obs;
  std::vector<std::string> gated;
  Json& m = report.metrics();
  m["system"] = cfg.system;
  if (extended) {
    ext = build_extension(cfg, inst);
    const ExtendedState s = initial_state(cfg, info, inst, *ext);
    y0 = s.flatten();
    flow = extension_flow(*ext);
    obs = extension_observables(*ext);
    columns.insert(columns.end(), {"u", "p_u"});
    state_index = {0, 1};
    for (std::size_t i : info.display_order) {
      columns.push_back(info.coord_names[i]);
      state_index.push_back(2 + i);
    }
    csv_obs = {"H", "L", "K_re", "K_im"};
    gated = {"H", "L", "K"};
    m["flow"] = "extended";
    m["extension"] = extension_metrics(*ext);
    m["initial_state"] = ext_state_json(info, y0);
  } else {
    const PhasePoint x = initial_base(cfg, info, inst);
    y0 = x.coords();
    flow = base_flow(inst.system);
    obs = base_observables(inst.system);
    for (std::size_t i : info.display_order) {
      columns.push_back(info.coord_names[i]);
      state_index.push_back(i);
    }
    csv_obs.push_back("L");
    for (const auto& [name, fn] : obs)
      if (name != "L") csv_obs.push_back(name);
    gated = {"L"};
    m["flow"] = "base";
    m["initial_state"] = point_json(info, y0);
  }
  columns.insert(columns.end(), csv_obs.begin(), csv_obs.end());
  m["method"] = to_string(settings.method);
  if (settings.method == Method::rk4)
    m["dt"] = settings.dt;
  else
    m["tol"] = settings.tol;
  m["t_final"] = settings.t_final;

  Trajectory traj;
  try {
    traj = integrate(flow, y0, settings);
  } catch (const IntegrationError& e) {
    m["integration_error"] = e.what();
    report.add_gate("integration_completed", e.last_good_time(), settings.t_final, GateOp::ge,
                    Json{{"t", e.last_good_time()}});
    return emit(report, cfg, out);
  }
  const TrajectoryReport tr = conservation_report(traj, obs);
  m["steps"] = tr.steps;
  m["rejected_steps"] = tr.rejected_steps;

  auto state_at = [&](std::size_t i) -> Json {
    const std::vector<double>& y = traj.states[i];
    return extended ? ext_state_json(info, y) : point_json(info, y);
  };
  Json drift = Json::object();
  for (const auto& [name, value] : tr.drift) drift[name] = value;
  if (extended) {
    const std::vector<double>& re = tr.series.at("K_re");
    const std::vector<double>& im = tr.series.at("K_im");
    std::vector<double> dev(re.size());
    double worst = 0.0;
    std::size_t worst_i = 0;
    for (std::size_t i = 0; i < re.size(); ++i) {
      dev[i] = std::hypot(re[i] - re[0], im[i] - im[0]);
      if (dev[i] > worst || std::isnan(dev[i])) {
        worst = dev[i];
        worst_i = i;
        if (std::isnan(dev[i])) break;
      }
    }
    const double k_drift = worst / std::max(std::hypot(re[0], im[0]), kDriftEps);
    drift["K"] = k_drift;
    report.add_gate("drift_K", k_drift, cfg.checks.drift_tol, GateOp::le,
                    Json{{"t", tr.times[worst_i]}, {"state", state_at(worst_i)}});
  }
  m["drift"] = drift;
  for (const std::string& name : gated) {
    if (name == "K") continue;
    const std::size_t i = argmax_deviation(tr.series.at(name));
    report.add_gate("drift_" + name, tr.drift.at(name), cfg.checks.drift_tol, GateOp::le,
                    Json{{"t", tr.times[i]}, {"state", state_at(i)}});
  }

  const std::string csv_path = cfg.output.csv.value_or("trajectory.csv");
  std::ostringstream csv;
  for (std::size_t c = 0; c < columns.size(); ++c) csv << (c ? "," : "") << columns[c];
  csv << "\n";
  std::size_t rows = 0;
  for (std::size_t i = 0; i < tr.times.size(); i += cfg.checks.csv_every, ++rows) {
    csv << format_double(tr.times[i]);
    const std::vector<double>& y = traj.states[i];
    for (std::size_t k : state_index) csv << "," << format_double(y[k]);
    for (const std::string& name : csv_obs) csv << "," << format_double(tr.series.at(name)[i]);
    csv << "\n";
  }
  write_file(csv_path, csv.str());
  m["csv"] = csv_path;
  m["rows"] = rows;
  return emit(report, cfg, out);
}

int cmd_bracket(const RunConfig& cfg, const Json& echo, std::ostream& out) {
  const EntryInfo& info = require_entry(cfg);
  const Instance inst = load(cfg, true);
  const Extension ext = build_extension(cfg, inst);
  const std::vector<ExtendedState> states = sample_states(cfg, info, inst, ext, cfg.checks.states);
  Report report("bracket", echo);
  const double tol = cfg.checks.tol.value_or(1e-5);
  const auto obs = extension_observables(ext);
  const PoissonStructure structure = ext.structure();
  Json& m = report.metrics();
  m["system"] = cfg.system;
  m["extension"] = extension_metrics(ext);
  m["states"] = states.size();
  Json pairs = Json::array();
  std::size_t failures = 0;
  for (const auto& [a, b] : kSpotPairs) {
    double worst = 0.0, sum = 0.0;
    std::size_t worst_i = 0, used = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      const std::vector<double> flat = states[i].flatten();
      BracketResult r;
      try {
        r = fd_bracket(structure, obs.at(a), obs.at(b), flat, cfg.checks.h);
      } catch (const Error&) {
        ++failures;
        continue;
      }
      ++used;
      sum += r.normalized;
      if (r.normalized > worst || std::isnan(r.normalized)) {
        worst = r.normalized;
        worst_i = i;
      }
    }
    const std::string name = "{" + a + "," + b + "}";
    const double mean = used ? sum / static_cast<double>(used) : std::nan("");
    if (!used) worst = std::nan("");
    pairs.push_back({{"pair", name}, {"states", used}, {"max", worst}, {"mean", mean}});
    report.add_gate("bracket" + name, worst, tol, GateOp::le,
                    used ? ext_state_json(info, states[worst_i].flatten()) : Json(nullptr));
  }
  m["brackets"] = pairs;
  m["evaluation_failures"] = failures;
  report.add_skipped(failures);
  return emit(report, cfg, out);
}

int cmd_rank(const RunConfig& cfg, const Json& echo, std::ostream& out) {
  const EntryInfo& info = require_entry(cfg);
  const Instance inst = load(cfg, info.has_g);
  Report report("rank", echo);
  std::map<std::string, FlatFn> obs;
  std::vector<std::vector<double>> states;
  std::vector<std::string> defaults;
  std::optional<Extension> ext;
  Json& m = report.metrics();
  m["system"] = cfg.system;
  if (info.has_g) {
    ext = build_extension(cfg, inst);
    for (const ExtendedState& s : sample_states(cfg, info, inst, *ext, cfg.checks.states))
      states.push_back(s.flatten());
    obs = extension_observables(*ext);
    defaults = {"H", "K_re"};
    for (const auto& [name, fn] : base_observables(inst.system))
      // exponent is a function of Q1
      if (name != "L" && name != "exponent") defaults.push_back(name);
    m["extension"] = extension_metrics(*ext);
  } else {
    for (const PhasePoint& x : sample_base(cfg, info, inst, cfg.checks.states))
      states.push_back(x.coords());
    obs = base_observables(inst.system);
    defaults = {"L"};
    for (const auto& [name, fn] : obs)
      if (name != "L") defaults.push_back(name);
  }
  const std::vector<std::string> names = cfg.checks.fields.value_or(defaults);
  if (names.empty()) throw ConfigError("checks.fields must name at least one observable");
  std::vector<FlatFn> fields;
  for (const std::string& name : names) {
    const auto it = obs.find(name);
    if (it == obs.end()) {
      std::string known;
      for (const auto& [k, fn] : obs) known += (known.empty() ? "" : ", ") + k;
      throw ConfigError("unknown field '" + name + "'; available: " + known);
    }
    fields.push_back(it->second);
  }
  const RankReport rr = independence_rank(fields, states, cfg.checks.threshold, cfg.checks.h);
  std::size_t worst_i = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rr.ranks.size(); ++i) {
    const auto& sv = rr.singular_values[i];
    const double ratio = sv.empty() || sv.front() == 0.0 ? 0.0 : sv.back() / sv.front();
    if (ratio < min_ratio) min_ratio = ratio;
    if (rr.ranks[i] < rr.ranks[worst_i]) worst_i = i;
  }
  m["fields"] = names;
  m["states"] = states.size();
  m["ranks"] = rr.ranks;
  m["min_rank"] = rr.min_rank;
  m["min_singular_ratio"] = min_ratio;
  Json at = nullptr;
  if (!states.empty())
    at = info.has_g ? ext_state_json(info, states[worst_i]) : point_json(info, states[worst_i]);
  report.add_gate("rank", static_cast<double>(rr.min_rank), static_cast<double>(names.size()),
                  GateOp::ge, at);
  return emit(report, cfg, out);
}

template <class T>
double gn_error(int n, T g, T xg, double lambda) {
  const ExtDerivValue<T> rec = gn_recursive<T>(n, {g, xg}, lambda);
  const ExtDerivValue<T> clo = gn_closed<T>(n, {g, xg}, lambda);
  // Same polynomial with every term made non-negative: the rounding scale.
  const ExtDerivValue<double> mag =
      gn_closed<double>(n, {std::abs(g), std::abs(xg)}, -std::abs(lambda));
  const double tiny = 1e-300;
  return std::max(std::abs(rec.value - clo.value) / std::max(mag.value, tiny),
                  std::abs(rec.xl - clo.xl) / std::max(mag.xl, tiny));
}

int cmd_gn_compare(const RunConfig& cfg, const Json& echo, std::ostream& out) {
  Report report("gn-compare", echo);
  const double tol = cfg.checks.tol.value_or(1e-10);
  const int n_max = cfg.checks.n_max;
  const std::size_t n_real = cfg.sampling.count;
  const std::size_t n_complex = std::max<std::size_t>(1, cfg.sampling.count / 4);
  UniformStream rng(cfg.sampling.seed);
  auto draw = [&rng] { return rng.next(-2.0, 2.0); };
  std::vector<double> by_n(static_cast<std::size_t>(n_max), 0.0);
  double worst = 0.0;
  Json worst_at = nullptr;
  auto record = [&](double err, int n, Json at) {
    by_n[static_cast<std::size_t>(n - 1)] = std::max(by_n[static_cast<std::size_t>(n - 1)], err);
    if (err > worst || std::isnan(err)) {
      worst = err;
      at["n"] = n;
      worst_at = std::move(at);
    }
  };
  for (std::size_t i = 0; i < n_real; ++i) {
    const double g = draw(), xg = draw(), lambda = draw();
    for (int n = 1; n <= n_max; ++n)
      record(gn_error<double>(n, g, xg, lambda), n,
             {{"kind", "real"}, {"G", g}, {"XG", xg}, {"Lambda", lambda}});
  }
  for (std::size_t i = 0; i < n_complex; ++i) {
    const cplx g(draw(), draw()), xg(draw(), draw());
    const double lambda = draw();
    for (int n = 1; n <= n_max; ++n)
      record(gn_error<cplx>(n, g, xg, lambda), n,
             {{"kind", "complex"},
              {"G", {{"re", g.real()}, {"im", g.imag()}}},
              {"XG", {{"re", xg.real()}, {"im", xg.imag()}}},
              {"Lambda", lambda}});
  }
  Json& m = report.metrics();
  m["n_max"] = n_max;
  m["real_samples"] = n_real;
  m["complex_samples"] = n_complex;
  m["max_rel_err"] = worst;
  m["max_rel_err_by_n"] = json_vector(by_n);
  report.add_gate("max_rel_err", worst, tol, GateOp::le, worst_at);
  return emit(report, cfg, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Extended Hamiltonians, their characteristic first integrals and checks",
               "extkit"};
  app.require_subcommand(1, 1);
  Options o;

  CLI::App* list = app.add_subcommand("list", "catalog table");
  list->add_flag("--json", o.json, "JSON output");
  CLI::App* show = app.add_subcommand("show", "details of one catalog entry");
  add_system_options(show, o);
  show->add_flag("--json", o.json, "JSON output");

  const std::vector<std::pair<std::string, std::string>> runs = {
      {"check-pde", "residual of the second-order equation for G"},
      {"check-kn", "residual of the first-order factorization"},
      {"extend", "H, K and bracket spot checks at one state"},
      {"integrate", "trajectory CSV and conservation report"},
      {"bracket", "{H, K} over sampled extended states"},
      {"rank", "functional independence of first integrals"},
      {"gn-compare", "recursive versus closed-form G_n"}};
  for (const auto& [name, help] : runs) add_run_options(app.add_subcommand(name, help), o);

  std::vector<std::string> storage = {"extkit"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& s : storage) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    if (command == "list") return cmd_list(o, out);
    const Json merged = assemble(o);
    const RunConfig cfg = parse_config(merged);
    if (command == "show") return cmd_show(cfg, o, out);
    if (command == "check-pde") return cmd_check_pde(cfg, merged, out);
    if (command == "check-kn") return cmd_check_kn(cfg, merged, out);
    if (command == "extend") return cmd_extend(cfg, merged, out);
    if (command == "integrate") return cmd_integrate(cfg, merged, out);
    if (command == "bracket") return cmd_bracket(cfg, merged, out);
    if (command == "rank") return cmd_rank(cfg, merged, out);
    return cmd_gn_compare(cfg, merged, out);
  } catch (const ConfigError& e) {
    err << "extkit: " << e.what() << "\n";
  } catch (const Error& e) {
    err << "extkit: " << e.what() << "\n";
  } catch (const Json::exception& e) {
    err << "extkit: invalid configuration: " << e.what() << "\n";
  }
  return 2;
}

}  // namespace extkit::cli
