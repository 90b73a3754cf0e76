#include "vacflow/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "vacflow/errors.hpp"
#include "vacflow/norms.hpp"
#include "vacflow/operators.hpp"

namespace vacflow {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string exponent_label(double q) {
  if (std::isinf(q)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", q);
  return buf;
}

std::string lorentz_column(double q) { return "lorentz_q" + exponent_label(q); }
std::string kim_column(const KimPair& k) { return "kim_p" + exponent_label(k.p) + "_q" + exponent_label(k.q); }

json config_without_output(const RunConfig& c) {
  json j = config_to_json(c);
  j.erase("output");
  return j;
}

// Invariants checked after every step. The first group must stay at zero on
// acceptance configs; the rest is reported.
struct Monitor {
  double mass0 = 0.0;
  double rho_max0 = 0.0;
  double energy0 = 0.0;
  double momentum_scale = 0.0;
  std::array<double, 3> momentum0{0.0, 0.0, 0.0};

  double max_principle_upper = 0;
  double max_principle_lower = 0;
  double mass_drift = 0;
  double divergence = 0;
  double a_decrease = 0;
  double interp = 0;

  double energy_increase = 0;
  double momentum_drift_max = 0.0;
  double last_energy = 0.0;
  double last_grad4 = 0.0;
  double last_dt = 0.0;
  double last_pressure_iterations = 0;
  double last_viscous_iterations = 0;

  std::vector<std::pair<std::string, double*>> fields() {
    return {{"mass0", &mass0},
            {"rho_max0", &rho_max0},
            {"energy0", &energy0},
            {"momentum_scale", &momentum_scale},
            {"momentum0_x", &momentum0[0]},
            {"momentum0_y", &momentum0[1]},
            {"momentum0_z", &momentum0[2]},
            {"violations_max_principle_upper", &max_principle_upper},
            {"violations_max_principle_lower", &max_principle_lower},
            {"violations_mass_drift", &mass_drift},
            {"violations_divergence", &divergence},
            {"violations_A_decrease", &a_decrease},
            {"violations_interp_ratio", &interp},
            {"energy_increase_steps", &energy_increase},
            {"momentum_drift_max", &momentum_drift_max},
            {"last_energy", &last_energy},
            {"last_grad4", &last_grad4},
            {"last_dt", &last_dt},
            {"last_pressure_iterations", &last_pressure_iterations},
            {"last_viscous_iterations", &last_viscous_iterations}};
  }

  void start(const SimState& s) {
    mass0 = s.rho.integral();
    rho_max0 = s.rho.max();
    energy0 = kinetic_energy(s.rho, s.u);
    momentum0 = momentum(s.rho, s.u);
    momentum_scale = hadamard(s.rho, s.u.magnitude()).integral();
    last_energy = energy0;
    last_grad4 = s.grad4_integral;
  }

  void check(const SimState& s, const RunningIntegrals& integrals) {
    if (s.rho.max() - rho_max0 > 1e-12) ++max_principle_upper;
    if (s.rho.min() < -1e-12) ++max_principle_lower;
    if (std::abs(s.rho.integral() - mass0) > 1e-12 * std::max(std::abs(mass0), 1e-300)) ++mass_drift;
    const double g = grad_norm(s.u);
    const ScalarField d = div(s.u);
    if (g > 0.0 && std::sqrt(d.dot(d)) > 1e-10 * g) ++divergence;
    if (s.grad4_integral < last_grad4) ++a_decrease;
    const double lhs = std::pow(s.grad4_integral, 0.25);
    if (lhs > 0.0 && lhs > (1.0 + 1e-12) * std::sqrt(integrals.max_grad) * std::pow(s.dissipation_integral, 0.25))
      ++interp;
    const double e = kinetic_energy(s.rho, s.u);
    if (e > last_energy * (1.0 + 1e-12)) ++energy_increase;
    const auto m = momentum(s.rho, s.u);
    for (int a = 0; a < 3; ++a) momentum_drift_max = std::max(momentum_drift_max, std::abs(m[a] - momentum0[a]));
    last_energy = e;
    last_grad4 = s.grad4_integral;
  }

  json violations() const {
    return {{"max_principle_upper", static_cast<long>(max_principle_upper)},
            {"max_principle_lower", static_cast<long>(max_principle_lower)},
            {"mass_drift", static_cast<long>(mass_drift)},
            {"divergence", static_cast<long>(divergence)},
            {"A_decrease", static_cast<long>(a_decrease)},
            {"interp_ratio", static_cast<long>(interp)}};
  }
};

std::vector<std::pair<std::string, double>> pack_scalars(Monitor& m, const RunningIntegrals& integrals) {
  std::vector<std::pair<std::string, double>> out{{"max_grad", integrals.max_grad}};
  for (std::size_t j = 0; j < integrals.kim.size(); ++j) out.emplace_back("kim_" + std::to_string(j), integrals.kim[j]);
  for (auto& [k, p] : m.fields()) out.emplace_back(k, *p);
  return out;
}

void unpack_scalars(const Checkpoint& c, Monitor& m, RunningIntegrals& integrals) {
  integrals.max_grad = c.scalar("max_grad");
  for (std::size_t j = 0; j < integrals.kim.size(); ++j) integrals.kim[j] = c.scalar("kim_" + std::to_string(j));
  for (auto& [k, p] : m.fields()) *p = c.scalar(k);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

}  // namespace

std::string checkpoint_name(long step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "ckpt_%08ld.bin", step);
  return buf;
}

std::string csv_header(const DiagnosticsConfig& cfg) {
  std::string h =
      "step,t,dt,energy,grad_norm,h12_norm,A,dissipation,rho_min,rho_max,mass,momentum_x,momentum_y,momentum_z,"
      "gn_ratio,t_grad2";
  for (double q : cfg.lorentz_q) h += "," + lorentz_column(q);
  for (const auto& k : cfg.kim_pairs) h += "," + kim_column(k);
  h += ",interp_ratio,divergence,pressure_iterations,viscous_iterations";
  return h;
}

std::string csv_row(const DiagnosticsRecord& r, int pressure_iterations, int viscous_iterations) {
  std::string s = std::to_string(r.step);
  for (double v : {r.t, r.dt, r.energy, r.grad_norm, r.h12_norm, r.A, r.dissipation, r.rho_min, r.rho_max, r.mass,
                   r.momentum[0], r.momentum[1], r.momentum[2], r.gn_ratio, r.t_grad2}) {
    s += "," + num(v);
  }
  for (const auto& [q, v] : r.lorentz) s += "," + num(v);
  for (double v : r.kim) s += "," + num(v);
  s += "," + num(r.interp_ratio) + "," + num(r.divergence);
  s += "," + std::to_string(pressure_iterations) + "," + std::to_string(viscous_iterations);
  return s;
}

std::vector<DiagnosticsRecord> read_csv(const std::string& path, const DiagnosticsConfig& cfg) {
  const auto lines = read_lines(path);
  std::size_t i = 0;
  while (i < lines.size() && !lines[i].empty() && lines[i][0] == '#') ++i;
  if (i >= lines.size() || lines[i] != csv_header(cfg)) throw FormatError(path + ": header does not match the config");
  std::map<std::string, std::size_t> col;
  {
    std::stringstream ss(lines[i]);
    std::string name;
    for (std::size_t c = 0; std::getline(ss, name, ','); ++c) col[name] = c;
  }
  std::vector<DiagnosticsRecord> out;
  for (++i; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::vector<double> v;
    std::stringstream ss(lines[i]);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::strtod(cell.c_str(), nullptr));
    if (v.size() != col.size()) throw FormatError(path + ": row " + std::to_string(i + 1) + " has the wrong width");
    DiagnosticsRecord r;
    r.step = static_cast<long>(v[col["step"]]);
    r.t = v[col["t"]];
    r.dt = v[col["dt"]];
    r.energy = v[col["energy"]];
    r.grad_norm = v[col["grad_norm"]];
    r.h12_norm = v[col["h12_norm"]];
    r.A = v[col["A"]];
    r.dissipation = v[col["dissipation"]];
    r.rho_min = v[col["rho_min"]];
    r.rho_max = v[col["rho_max"]];
    r.mass = v[col["mass"]];
    r.momentum = {v[col["momentum_x"]], v[col["momentum_y"]], v[col["momentum_z"]]};
    r.gn_ratio = v[col["gn_ratio"]];
    r.t_grad2 = v[col["t_grad2"]];
    for (double q : cfg.lorentz_q) r.lorentz.emplace_back(q, v[col[lorentz_column(q)]]);
    for (const auto& k : cfg.kim_pairs) r.kim.push_back(v[col[kim_column(k)]]);
    r.interp_ratio = v[col["interp_ratio"]];
    r.divergence = v[col["divergence"]];
    out.push_back(std::move(r));
  }
  return out;
}

json record_to_json(const DiagnosticsRecord& r) {
  json lorentz = json::object(), kim = json::array();
  for (const auto& [q, v] : r.lorentz) lorentz[exponent_label(q)] = v;
  for (double v : r.kim) kim.push_back(v);
  return {{"step", r.step},          {"t", r.t},
          {"dt", r.dt},              {"energy", r.energy},
          {"grad_norm", r.grad_norm}, {"h12_norm", r.h12_norm},
          {"A", r.A},                {"dissipation", r.dissipation},
          {"rho_min", r.rho_min},    {"rho_max", r.rho_max},
          {"mass", r.mass},          {"momentum", r.momentum},
          {"gn_ratio", r.gn_ratio},  {"t_grad2", r.t_grad2},
          {"lorentz", lorentz},      {"kim", kim},
          {"interp_ratio", r.interp_ratio}, {"divergence", r.divergence}};
}

RunConfig checkpoint_config(const Checkpoint& c) {
  if (!c.meta.contains("config")) throw FormatError("checkpoint carries no config");
  json j = c.meta["config"];
  j["output"] = ".";
  return config_from_json(j);
}

RunResult run(const RunConfig& cfg, const RunOptions& opt) {
  cfg.validate();
  const auto wall_start = std::chrono::steady_clock::now();
  RunResult result;
  const fs::path out = opt.out_dir.empty() ? fs::path(cfg.output) : fs::path(opt.out_dir);
  fs::create_directories(out);
  result.out_dir = out.string();
  const fs::path csv_path = out / "diagnostics.csv";

  const TorusGrid g(cfg.n, cfg.L);
  const MomentumParams params = cfg.momentum_params();
  const DiagnosticsConfig& dc = cfg.diagnostics;
  SimState s(g);
  RunningIntegrals integrals(dc);
  Monitor mon;
  json events = json::array(), warnings = json::array(), init_info = json::object();
  std::vector<DiagnosticsRecord>& records = result.records;

  std::ofstream csv;
  if (!opt.resume.empty()) {
    Checkpoint c = read_checkpoint(opt.resume);
    if (c.state.grid().n() != cfg.n || c.state.grid().length() != cfg.L)
      throw ConfigError("checkpoint grid does not match the config");
    s = c.state;
    unpack_scalars(c, mon, integrals);
    events = c.meta.value("events", json::array());
    warnings = c.meta.value("warnings", json::array());
    init_info = c.meta.value("init", json::object());

    // Keep the rows up to the checkpoint verbatim and continue after them.
    const auto lines = read_lines(csv_path.string());
    std::vector<std::string> kept;
    for (const auto& line : lines) {
      if (line.empty()) continue;
      if (line[0] == '#' || line.rfind("step,", 0) == 0 || std::stol(line.substr(0, line.find(','))) <= s.step)
        kept.push_back(line);
    }
    csv.open(csv_path, std::ios::trunc);
    for (const auto& line : kept) csv << line << '\n';
    csv.flush();
    for (auto& r : read_csv(csv_path.string(), dc)) records.push_back(std::move(r));
  } else {
    InitialData d = [&] {
      try {
        return build_initial(cfg.init, g);
      } catch (const SpecError& e) {
        throw ConfigError(e.what());
      }
    }();
    for (const auto& w : d.warnings) warnings.push_back(w);
    const auto compat = compatibility_residual(d.rho, d.u, cfg.mu, cfg.delta_floor);
    init_info = {{"h12_norm", hs_norm(d.u, 0.5)},
                 {"energy", kinetic_energy(d.rho, d.u)},
                 {"momentum_residual", d.momentum_residual},
                 {"compatibility_weighted", compat.first},
                 {"compatibility_vacuum", compat.second}};
    s = SimState(std::move(d.rho), std::move(d.u));
    mon.start(s);
    csv.open(csv_path, std::ios::trunc);
    csv << kCsvSchemaLine << '\n' << csv_header(dc) << '\n';
    records.push_back(record(s, dc, integrals, 0.0));
    csv << csv_row(records.back()) << '\n';
    csv.flush();
  }
  if (!csv) throw FormatError("cannot write '" + csv_path.string() + "'");

  auto save = [&](const SimState& state) {
    Checkpoint c(g);
    c.state = state;
    c.mu = cfg.mu;
    c.scalars = pack_scalars(mon, integrals);
    c.meta = {{"config", config_without_output(cfg)}, {"events", events}, {"warnings", warnings}, {"init", init_info}};
    write_checkpoint((out / checkpoint_name(state.step)).string(), c);
  };
  if (opt.resume.empty()) save(s);

  const VectorField zero(g);
  const double tol = 1e-12 * std::max(1.0, cfg.t_end);
  const long start_step = s.step;
  long last_saved = s.step;
  std::vector<bool> crossed(dc.bootstrap_thresholds.size());
  for (std::size_t j = 0; j < crossed.size(); ++j) crossed[j] = std::pow(s.grad4_integral, 0.25) > dc.bootstrap_thresholds[j];

  auto finish_summary = [&](const std::string& status) {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    json s_json;
    s_json["status"] = status;
    s_json["steps"] = s.step;
    s_json["t_final"] = s.t;
    s_json["final"] = records.empty() ? json(nullptr) : record_to_json(records.back());
    s_json["A_final"] = std::pow(s.grad4_integral, 0.25);
    double m_hat = 0.0;
    for (const auto& r : records) m_hat = std::max(m_hat, r.t_grad2);
    s_json["M_hat"] = m_hat;
    s_json["expo_rate"] = nullptr;
    s_json["decay_fit_points"] = 0;
    try {
      const DecayFit fit = decay_fit(records);
      s_json["expo_rate"] = number_or_null(fit.expo_rate);
      s_json["decay_fit_points"] = fit.fitted_points;
    } catch (const ParameterError& e) {
      s_json["decay_fit_note"] = e.what();
    }
    s_json["E0"] = mon.energy0;
    s_json["C_ratio"] = mon.energy0 > 0.0 ? json(m_hat / (2.0 * mon.energy0)) : json(nullptr);
    s_json["poincare_rate"] = 2.0 * cfg.mu * std::pow(2.0 * std::numbers::pi / cfg.L, 2) / cfg.rho_bar;
    json kim = json::array();
    for (std::size_t j = 0; j < dc.kim_pairs.size(); ++j) {
      kim.push_back({{"p", dc.kim_pairs[j].p},
                     {"q", std::isinf(dc.kim_pairs[j].q) ? json("inf") : json(dc.kim_pairs[j].q)},
                     {"value", integrals.kim[j]}});
    }
    s_json["kim_integrals"] = kim;
    s_json["invariant_violations"] = mon.violations();
    long total = 0;
    for (const auto& v : mon.violations()) total += v.get<long>();
    s_json["violations_total"] = total;
    s_json["monitors"] = {{"energy_increase_steps", static_cast<long>(mon.energy_increase)},
                          {"momentum_drift_max", mon.momentum_drift_max},
                          {"momentum_scale", mon.momentum_scale}};
    s_json["events"] = events;
    s_json["warnings"] = warnings;
    s_json["init"] = init_info;
    s_json["wall_clock_seconds"] = wall;
    s_json["steps_per_second"] = wall > 0.0 ? (s.step - start_step) / wall : 0.0;
    return s_json;
  };

  while (cfg.t_end - s.t > tol) {
    if (opt.stop_at_step >= 0 && s.step >= opt.stop_at_step) {
      if (last_saved != s.step) save(s);
      result.status = "interrupted";
      return result;
    }
    const double remaining = cfg.t_end - s.t;
    const VectorField& advecting = cfg.mode == RunMode::kLinear ? zero : s.u;
    double dt = std::min({cfg.max_dt, momentum_dt_limit(s, params, advecting), remaining});
    StepReport report;
    SimState next(g);
    bool done = false;
    try {
      for (int attempt = 0; !done; ++attempt) {
        try {
          next = cfg.mode == RunMode::kLinear ? linear_step(s, dt, params, zero, &report)
                                              : momentum_step(s, dt, params, &report);
          done = true;
        } catch (const CflViolation& e) {
          if (attempt >= 20) throw;
          dt = std::min(0.5 * dt, 0.9 * e.admissible_dt());
        }
      }
      if (!next.rho.all_finite() || !next.u.all_finite())
        throw SolverError("non-finite state after step " + std::to_string(s.step + 1), {});
    } catch (const Error& e) {
      if (last_saved != s.step) save(s);
      result.exit_code = 3;
      result.status = "solver_error";
      result.message = e.what();
      json summary = finish_summary(result.status);
      summary["error"] = e.what();
      summary["last_checkpoint"] = checkpoint_name(s.step);
      write_json(out / "summary.json", summary);
      result.summary = summary;
      return result;
    }
    if (remaining - dt <= tol) next.t = cfg.t_end;

    integrals.advance(s, dt, dc);
    s = std::move(next);
    mon.check(s, integrals);
    mon.last_dt = dt;
    mon.last_pressure_iterations = report.pressure_iterations;
    mon.last_viscous_iterations = report.viscous_iterations;

    const double A = std::pow(s.grad4_integral, 0.25);
    for (std::size_t j = 0; j < crossed.size(); ++j) {
      if (!crossed[j] && A > dc.bootstrap_thresholds[j]) {
        crossed[j] = true;
        events.push_back({{"type", "bootstrap_threshold"}, {"threshold", dc.bootstrap_thresholds[j]},
                          {"step", s.step}, {"t", s.t}, {"A", A}});
      }
    }

    const bool last = cfg.t_end - s.t <= tol;
    if (s.step % cfg.snapshot_every == 0 || last) {
      records.push_back(record(s, dc, integrals, dt));
      csv << csv_row(records.back(), report.pressure_iterations, report.viscous_iterations) << '\n';
      csv.flush();
    }
    if (s.step % cfg.checkpoint_every == 0 || last) {
      save(s);
      last_saved = s.step;
    }
    if (opt.log && s.step % 100 == 0) {
      *opt.log << "step " << s.step << " t " << s.t << " dt " << dt << " E " << mon.last_energy << " A " << A
               << '\n';
    }
  }
  if (last_saved != s.step) save(s);

  result.status = "ok";
  result.summary = finish_summary(result.status);
  write_json(out / "summary.json", result.summary);
  return result;
}

json sweep(const RunConfig& config, const std::vector<double>& epsilons, const std::string& out_dir,
           std::ostream* log) {
  config.validate();
  fs::create_directories(out_dir);
  std::map<double, std::string> dirs;
  const SweepResult res = epsilon_sweep(epsilons, [&](double eps) {
    RunConfig c = config;
    c.init.target_h12 = eps;
    char buf[64];
    std::snprintf(buf, sizeof buf, "eps_%.6g", eps);
    const std::string dir = (fs::path(out_dir) / buf).string();
    dirs[eps] = dir;
    if (log) *log << "sweep: epsilon " << eps << " -> " << dir << '\n';
    RunOptions o;
    o.out_dir = dir;
    o.log = log;
    const RunResult r = run(c, o);
    if (r.exit_code != 0) throw Error(r.message);
    SweepEntry e;
    e.sup_A = r.summary["A_final"].get<double>();
    e.M_hat = r.summary["M_hat"].get<double>();
    e.expo_rate = r.summary["expo_rate"].is_number() ? r.summary["expo_rate"].get<double>() : kNaN;
    return e;
  });
  json entries = json::array();
  for (const auto& e : res.entries) {
    json j = {{"epsilon", e.epsilon}, {"completed", e.completed}, {"dir", dirs.count(e.epsilon) ? dirs[e.epsilon] : ""}};
    if (e.completed) {
      j["sup_A"] = e.sup_A;
      j["M_hat"] = e.M_hat;
      j["expo_rate"] = number_or_null(e.expo_rate);
    } else {
      j["error"] = e.error;
    }
    entries.push_back(j);
  }
  json out = {{"entries", entries},
              {"slope", number_or_null(res.slope)},
              {"intercept", number_or_null(res.intercept)},
              {"fitted", res.fitted}};
  write_json(fs::path(out_dir) / "sweep.json", out);
  return out;
}

json diag(const std::vector<std::string>& paths) {
  if (paths.empty()) throw ConfigError("diag needs at least one checkpoint");
  json out;
  json items = json::array();
  std::vector<std::pair<double, double>> series;
  double A_acc = 0.0, t_last = -1.0;
  for (const auto& p : paths) {
    const Checkpoint c = read_checkpoint(p);
    const RunConfig cfg = checkpoint_config(c);
    RunningIntegrals integrals(cfg.diagnostics);
    integrals.max_grad = c.scalar("max_grad");
    for (std::size_t j = 0; j < integrals.kim.size(); ++j) integrals.kim[j] = c.scalar("kim_" + std::to_string(j));
    const DiagnosticsRecord r = record(c.state, cfg.diagnostics, integrals, c.scalar("last_dt"));
    items.push_back({{"checkpoint", p}, {"record", record_to_json(r)}});
    series.emplace_back(r.t, r.grad_norm);
    if (r.t > t_last) {
      t_last = r.t;
      A_acc = r.A;
    }
  }
  out["checkpoints"] = items;
  if (series.size() > 1) {
    std::sort(series.begin(), series.end());
    std::vector<double> t, gn;
    for (const auto& [a, b] : series) {
      t.push_back(a);
      gn.push_back(b);
    }
    out["A_quadrature"] = quadrature_A(t, gn);
    out["A_accumulator"] = A_acc;
    out["quadrature_from_t"] = t.front();
  }
  return out;
}

}  // namespace vacflow
