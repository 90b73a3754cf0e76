#include "vacflow/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "vacflow/errors.hpp"

namespace vacflow {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

json exponent_to_json(double q) { return std::isinf(q) ? json("inf") : json(q); }

double exponent_from_json(const json& j, const std::string& where) {
  if (j.is_string() && j.get<std::string>() == "inf") return kInf;
  if (!j.is_number()) throw ConfigError(where + ": expected a number or \"inf\"");
  return j.get<double>();
}

void check_keys(const json& user, const json& known, const std::string& path) {
  if (!user.is_object()) throw ConfigError((path.empty() ? "config" : path) + ": expected an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string where = path.empty() ? it.key() : path + "." + it.key();
    if (!known.contains(it.key())) throw ConfigError("unknown key '" + where + "'");
    if (known[it.key()].is_object()) check_keys(it.value(), known[it.key()], where);
  }
}

void merge_into(json& base, const json& user) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    if (it.value().is_object() && base[it.key()].is_object()) {
      merge_into(base[it.key()], it.value());
    } else {
      base[it.key()] = it.value();
    }
  }
}

// Typed access with the dotted path in the error message.
template <typename T>
T get(const json& root, const std::string& path) {
  const json* node = &root;
  std::stringstream ss(path);
  std::string part;
  try {
    while (std::getline(ss, part, '.')) node = &node->at(part);
    if constexpr (std::is_floating_point_v<T>) {
      if (!node->is_number()) throw ConfigError(path + ": expected a number");
    } else if constexpr (std::is_integral_v<T>) {
      if (!node->is_number_integer()) throw ConfigError(path + ": expected an integer");
    }
    return node->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + ": wrong type");
  }
}

template <typename T>
T parse_enum(T (*parse)(const std::string&), const json& root, const std::string& path) {
  try {
    return parse(get<std::string>(root, path));
  } catch (const Error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace

std::string to_string(RunMode m) { return m == RunMode::kLinear ? "linear" : "nonlinear"; }

RunMode parse_run_mode(const std::string& s) {
  if (s == "nonlinear") return RunMode::kNonlinear;
  if (s == "linear") return RunMode::kLinear;
  throw ConfigError("unknown mode '" + s + "'");
}

void RunConfig::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (n < 8 || n % 2 != 0) throw ConfigError("grid.n must be an even integer >= 8");
  if (!positive(L)) throw ConfigError("grid.L must be positive");
  if (!positive(mu)) throw ConfigError("physics.mu must be positive");
  if (!positive(rho_bar)) throw ConfigError("physics.rho_bar must be positive");
  if (!(delta_floor >= 1e-8 && delta_floor <= 1e-2)) throw ConfigError("physics.delta_floor must lie in [1e-8, 1e-2]");
  if (time_order != 1 && time_order != 2) throw ConfigError("scheme.time_order must be 1 or 2");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("time.t_end must be non-negative");
  if (!positive(max_dt)) throw ConfigError("time.max_dt must be positive");
  if (snapshot_every < 1) throw ConfigError("time.snapshot_every must be at least 1");
  if (checkpoint_every < 1) throw ConfigError("time.checkpoint_every must be at least 1");
  if (output.empty()) throw ConfigError("output must name a directory");
  for (double e : sweep_epsilons)
    if (!std::isfinite(e)) throw ConfigError("sweep.epsilons must be finite");
  try {
    init.validate();
    diagnostics.validate();
    momentum_params().validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

MomentumParams RunConfig::momentum_params() const {
  MomentumParams p;
  p.mu = mu;
  p.rho_bar = rho_bar;
  p.delta_floor = delta_floor;
  p.advection = advection;
  p.viscous = viscous;
  p.time_order = time_order;
  p.cfl = cfl;
  p.transport.variant = transport;
  p.transport.cfl_limit = cfl;
  p.pressure = pressure;
  p.viscous_solver = viscous_solver;
  return p;
}

json config_to_json(const RunConfig& c) {
  const DensityProfile& d = c.init.density;
  const VelocityProfile& v = c.init.velocity;
  json lq = json::array(), kp = json::array();
  for (double q : c.diagnostics.lorentz_q) lq.push_back(exponent_to_json(q));
  for (const auto& k : c.diagnostics.kim_pairs) kp.push_back({k.p, exponent_to_json(k.q)});
  json j;
  j["schema_version"] = 1;
  j["grid"] = {{"n", c.n}, {"L", c.L}};
  j["physics"] = {{"mu", c.mu}, {"rho_bar", c.rho_bar}, {"delta_floor", c.delta_floor}};
  j["init"]["density"] = {{"type", to_string(d.kind)},
                          {"center", d.center},
                          {"radius", d.radius},
                          {"width", d.width < 0.0 ? json(nullptr) : json(d.width)},
                          {"levels", d.levels}};
  j["init"]["velocity"] = {{"type", to_string(v.kind)},
                           {"amplitude", v.amplitude},
                           {"slope", v.slope},
                           {"band", v.band},
                           {"vacuum_clearance", v.vacuum_clearance}};
  j["init"]["target_h12"] = c.init.target_h12 ? json(*c.init.target_h12) : json("unscaled");
  j["scheme"] = {{"transport", to_string(c.transport)},
                 {"advection", to_string(c.advection)},
                 {"viscous", to_string(c.viscous)},
                 {"time_order", c.time_order},
                 {"mode", to_string(c.mode)}};
  j["time"] = {{"t_end", c.t_end},
               {"cfl", c.cfl},
               {"max_dt", c.max_dt},
               {"snapshot_every", c.snapshot_every},
               {"checkpoint_every", c.checkpoint_every}};
  j["diagnostics"] = {{"lorentz_q", lq}, {"kim_pairs", kp}, {"bootstrap_thresholds", c.diagnostics.bootstrap_thresholds}};
  j["solver"] = {{"pressure_rtol", c.pressure.rtol},
                 {"pressure_max_iter", c.pressure.max_iterations},
                 {"viscous_rtol", c.viscous_solver.rtol},
                 {"viscous_max_iter", c.viscous_solver.max_iterations}};
  j["sweep"] = {{"epsilons", c.sweep_epsilons}};
  j["output"] = c.output;
  j["seed"] = c.seed;
  return j;
}

RunConfig config_from_json(const json& user) {
  const json defaults = config_to_json(RunConfig{});
  check_keys(user, defaults, "");
  json j = defaults;
  merge_into(j, user);
  if (get<int>(j, "schema_version") != 1) throw ConfigError("schema_version: only version 1 is supported");

  RunConfig c;
  c.n = get<int>(j, "grid.n");
  c.L = get<double>(j, "grid.L");
  c.mu = get<double>(j, "physics.mu");
  c.rho_bar = get<double>(j, "physics.rho_bar");
  c.delta_floor = get<double>(j, "physics.delta_floor");

  DensityProfile& d = c.init.density;
  d.kind = parse_enum(parse_density_kind, j, "init.density.type");
  d.rho_bar = c.rho_bar;
  d.center = get<std::array<double, 3>>(j, "init.density.center");
  d.radius = get<double>(j, "init.density.radius");
  const json& w = j["init"]["density"]["width"];
  d.width = w.is_null() ? -1.0 : get<double>(j, "init.density.width");
  if (!w.is_null() && d.width < 0.0) throw ConfigError("init.density.width must be non-negative or null");
  d.levels = get<std::array<double, 2>>(j, "init.density.levels");

  VelocityProfile& v = c.init.velocity;
  v.kind = parse_enum(parse_velocity_kind, j, "init.velocity.type");
  v.amplitude = get<double>(j, "init.velocity.amplitude");
  v.slope = get<double>(j, "init.velocity.slope");
  v.band = get<std::array<double, 2>>(j, "init.velocity.band");
  v.vacuum_clearance = get<double>(j, "init.velocity.vacuum_clearance");
  const json& target = j["init"]["target_h12"];
  if (target.is_string() && target.get<std::string>() == "unscaled") {
    c.init.target_h12.reset();
  } else {
    c.init.target_h12 = get<double>(j, "init.target_h12");
  }

  c.transport = parse_enum(parse_transport_variant, j, "scheme.transport");
  c.advection = parse_enum(parse_advection_form, j, "scheme.advection");
  c.viscous = parse_enum(parse_viscous_treatment, j, "scheme.viscous");
  c.time_order = get<int>(j, "scheme.time_order");
  c.mode = parse_enum(parse_run_mode, j, "scheme.mode");

  c.t_end = get<double>(j, "time.t_end");
  c.cfl = get<double>(j, "time.cfl");
  c.max_dt = get<double>(j, "time.max_dt");
  c.snapshot_every = get<long>(j, "time.snapshot_every");
  c.checkpoint_every = get<long>(j, "time.checkpoint_every");

  c.diagnostics.lorentz_q.clear();
  for (const auto& q : j["diagnostics"]["lorentz_q"]) c.diagnostics.lorentz_q.push_back(exponent_from_json(q, "diagnostics.lorentz_q"));
  c.diagnostics.kim_pairs.clear();
  for (const auto& k : j["diagnostics"]["kim_pairs"]) {
    if (!k.is_array() || k.size() != 2) throw ConfigError("diagnostics.kim_pairs: expected [p, q] pairs");
    c.diagnostics.kim_pairs.push_back({exponent_from_json(k[0], "diagnostics.kim_pairs"),
                                       exponent_from_json(k[1], "diagnostics.kim_pairs")});
  }
  c.diagnostics.bootstrap_thresholds = get<std::vector<double>>(j, "diagnostics.bootstrap_thresholds");

  c.pressure = {get<double>(j, "solver.pressure_rtol"), get<int>(j, "solver.pressure_max_iter")};
  c.viscous_solver = {get<double>(j, "solver.viscous_rtol"), get<int>(j, "solver.viscous_max_iter")};
  c.sweep_epsilons = get<std::vector<double>>(j, "sweep.epsilons");
  c.output = get<std::string>(j, "output");
  c.seed = get<std::uint64_t>(j, "seed");
  v.seed = c.seed;

  c.validate();
  return c;
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string path = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &j;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (parts[i].empty()) throw ConfigError("override '" + assignment + "' has an empty path segment");
    json& next = (*node)[parts[i]];
    if (next.is_null()) next = json::object();
    if (!next.is_object()) throw ConfigError("override '" + path + "': '" + parts[i] + "' is not an object");
    node = &next;
  }
  (*node)[parts.back()] = value;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j = json::parse(in, nullptr, false, true);
  if (j.is_discarded()) throw ConfigError("config '" + path + "' is not valid JSON");
  for (const auto& o : overrides) apply_override(j, o);
  return config_from_json(j);
}

}  // namespace vacflow
