#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "test_support.hpp"
#include "vacflow/errors.hpp"
#include "vacflow/harness.hpp"

using namespace vacflow;
using namespace vacflow::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "vacflow_test_harness" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig small_config() {
  json j = {{"grid", {{"n", 16}, {"L", 1.0}}},
            {"physics", {{"mu", 0.05}}},
            {"init",
             {{"density", {{"type", "two-phase"}}},
              {"velocity", {{"type", "random-solenoidal"}, {"band", {1.0, 2.0}}}},
              {"target_h12", 0.05}}},
            {"time", {{"t_end", 0.08}, {"max_dt", 0.01}, {"snapshot_every", 1}, {"checkpoint_every", 3}}},
            {"seed", 5}};
  return config_from_json(j);
}

}  // namespace

TEST_CASE("config: defaults, round trip and overrides") {
  const RunConfig d = config_from_json(json::object());
  CHECK(d.n == 32);
  CHECK(d.diagnostics.lorentz_q.size() == 3);
  CHECK(std::isinf(d.diagnostics.kim_pairs[2].q));
  CHECK(config_to_json(config_from_json(config_to_json(d))) == config_to_json(d));

  json j = json::object();
  apply_override(j, "physics.mu=0.2");
  apply_override(j, "init.density.type=vacuum-bubble");
  apply_override(j, "init.target_h12=0.1");
  apply_override(j, "diagnostics.lorentz_q=[4,\"inf\"]");
  apply_override(j, "diagnostics.kim_pairs=[[8,4],[2,\"inf\"]]");
  const RunConfig c = config_from_json(j);
  CHECK(c.mu == 0.2);
  CHECK(c.init.density.kind == DensityKind::kVacuumBubble);
  CHECK(*c.init.target_h12 == 0.1);
  CHECK(c.diagnostics.kim_pairs.size() == 2);
  CHECK(c.init.velocity.seed == c.seed);
}

TEST_CASE("config: validation errors") {
  auto bad = [](const std::string& o) {
    json j = json::object();
    apply_override(j, o);
    return j;
  };
  CHECK_THROWS_AS(config_from_json(bad("grid.nn=32")), ConfigError);
  CHECK_THROWS_AS(config_from_json(bad("grid.n=\"big\"")), ConfigError);
  CHECK_THROWS_AS(config_from_json(bad("grid.n=31")), ConfigError);
  CHECK_THROWS_AS(config_from_json(bad("physics.mu=0")), ConfigError);
  CHECK_THROWS_AS(config_from_json(bad("physics.delta_floor=0.5")), ConfigError);
  CHECK_THROWS_AS(config_from_json(bad("time.snapshot_every=0")), ConfigError);
  CHECK_THROWS_AS(config_from_json(bad("scheme.time_order=3")), ConfigError);
  CHECK_THROWS_AS(config_from_json(bad("scheme.transport=weno")), ConfigError);
  CHECK_THROWS_AS(config_from_json(bad("diagnostics.kim_pairs=[[4,4]]")), ConfigError);
  CHECK_THROWS_AS(config_from_json(bad("init.target_h12=-1")), ConfigError);
  json j = json::object();
  CHECK_THROWS_AS(apply_override(j, "novalue"), ConfigError);
}

TEST_CASE("checkpoint round trip is bit exact") {
  const fs::path dir = scratch("roundtrip");
  std::mt19937_64 rng(9);
  TorusGrid g(8, 1.3);
  Checkpoint c(g);
  c.state.rho = random_field(g, rng);
  c.state.u = random_vector(g, rng);
  c.state.p = random_field(g, rng);
  c.state.t = 0.1 + 1e-17;
  c.state.step = 17;
  c.state.grad4_integral = std::nextafter(2.0, 3.0);
  c.mu = 0.07;
  c.scalars = {{"a", -0.0}, {"b", 1e-310}};
  c.meta = {{"note", "x"}};
  const std::string path = (dir / "c.bin").string();
  write_checkpoint(path, c);
  const Checkpoint r = read_checkpoint(path);
  CHECK(r.state.rho == c.state.rho);
  CHECK(r.state.u == c.state.u);
  CHECK(r.state.p == c.state.p);
  CHECK(r.state.t == c.state.t);
  CHECK(r.state.step == 17);
  CHECK(r.state.grad4_integral == c.state.grad4_integral);
  CHECK(std::signbit(r.scalar("a")));
  CHECK(r.scalar("b") == 1e-310);
  CHECK(r.meta == c.meta);
  write_checkpoint((dir / "d.bin").string(), r);
  CHECK(slurp(dir / "d.bin") == slurp(path));
}

TEST_CASE("corrupt checkpoints name the first inconsistent offset") {
  const fs::path dir = scratch("corrupt");
  TorusGrid g(8, 1.0);
  Checkpoint c(g);
  const std::string path = (dir / "c.bin").string();
  write_checkpoint(path, c);
  const std::string good = slurp(path);
  const std::size_t payload_start = good.size() - 8 * (5 * 512 + 4);

  auto expect_offset = [&](const std::string& bytes, std::size_t offset) {
    std::ofstream(path, std::ios::binary | std::ios::trunc) << bytes;
    try {
      read_checkpoint(path);
      FAIL("no error");
    } catch (const FormatError& e) {
      const std::string msg = e.what();
      CHECK_MESSAGE(msg.find("byte offset " + std::to_string(offset)) != std::string::npos, msg);
    }
  };
  // Truncated payload: the first missing byte.
  expect_offset(good.substr(0, good.size() - 8), good.size() - 8);
  // Extra payload byte.
  expect_offset(good + "x", good.size());
  // Bad magic.
  std::string m = good;
  m[3] = 'X';
  expect_offset(m, 3);
  // A field offset that disagrees with the running layout.
  std::string h = good;
  const auto at = h.find("\"offset\":4096");
  REQUIRE(at != std::string::npos);
  h.replace(at, 13, "\"offset\":4104");
  expect_offset(h, payload_start + 4096);
}

TEST_CASE("csv rows parse back exactly") {
  const fs::path dir = scratch("csv");
  DiagnosticsConfig cfg;
  DiagnosticsRecord r;
  r.step = 3;
  r.t = 0.1;
  r.energy = 1.0 / 3.0;
  r.momentum = {1e-300, -2.5, std::nextafter(1.0, 2.0)};
  for (double q : cfg.lorentz_q) r.lorentz.emplace_back(q, std::sqrt(q + 1.0));
  r.kim = {1.0 / 7.0, 2.0, 3.0};
  r.interp_ratio = 0.9;
  std::ofstream(dir / "d.csv") << kCsvSchemaLine << '\n' << csv_header(cfg) << '\n' << csv_row(r) << '\n';
  const auto back = read_csv((dir / "d.csv").string(), cfg);
  REQUIRE(back.size() == 1);
  CHECK(csv_row(back[0]) == csv_row(r));
  CHECK(back[0].momentum[2] == r.momentum[2]);
}

TEST_CASE("zero velocity run records zeros") {
  const fs::path dir = scratch("zero");
  RunConfig c = small_config();
  c.init.density.kind = DensityKind::kConstant;
  c.init.velocity.kind = VelocityKind::kTaylorGreen;
  c.init.velocity.amplitude = 0.0;
  c.init.target_h12.reset();
  RunOptions o;
  o.out_dir = dir.string();
  const RunResult r = run(c, o);
  CHECK(r.exit_code == 0);
  CHECK(r.records.size() == 9);
  for (const auto& rec : r.records) {
    CHECK(rec.energy == 0.0);
    CHECK(rec.grad_norm == 0.0);
    CHECK(rec.A == 0.0);
    CHECK(rec.interp_ratio == 0.0);
    for (const auto& [q, v] : rec.lorentz) CHECK(v == 0.0);
    for (double k : rec.kim) CHECK(k == 0.0);
  }
  CHECK(r.summary["violations_total"] == 0);
  CHECK(r.summary["expo_rate"].is_null());
  const json d = diag({(dir / checkpoint_name(8)).string()});
  CHECK(d["checkpoints"][0]["record"]["energy"] == 0.0);
}

TEST_CASE("run artifacts, diag agreement and determinism") {
  const fs::path a = scratch("run_a"), b = scratch("run_b");
  const RunConfig c = small_config();
  RunOptions o;
  o.out_dir = a.string();
  const RunResult r = run(c, o);
  REQUIRE(r.exit_code == 0);
  CHECK(r.summary["violations_total"] == 0);
  CHECK(fs::exists(a / "summary.json"));
  for (long s : {0L, 3L, 6L, 8L}) CHECK(fs::exists(a / checkpoint_name(s)));

  // diag from a checkpoint reproduces the in-run row.
  const json d = diag({(a / checkpoint_name(6)).string()});
  const DiagnosticsRecord& in_run = r.records[6];
  const json& rec = d["checkpoints"][0]["record"];
  CHECK(rec["step"] == 6);
  for (const char* k : {"energy", "grad_norm", "h12_norm", "A", "dissipation", "gn_ratio", "interp_ratio", "dt"}) {
    const json ref = record_to_json(in_run)[k];
    CHECK(std::abs(rec[k].get<double>() - ref.get<double>()) <= 1e-12 * std::abs(ref.get<double>()));
  }

  o.out_dir = b.string();
  run(c, o);
  CHECK(slurp(a / "diagnostics.csv") == slurp(b / "diagnostics.csv"));
  CHECK(slurp(a / checkpoint_name(8)) == slurp(b / checkpoint_name(8)));
}

TEST_CASE("resume reproduces the uninterrupted diagnostics byte for byte") {
  const fs::path a = scratch("resume_a"), b = scratch("resume_b");
  const RunConfig c = small_config();
  RunOptions o;
  o.out_dir = a.string();
  run(c, o);

  o.out_dir = b.string();
  o.stop_at_step = 5;  // rows up to 5 exist, last checkpoint is 3
  CHECK(run(c, o).status == "interrupted");
  o.stop_at_step = -1;
  o.resume = (b / checkpoint_name(3)).string();
  const RunResult r = run(c, o);
  CHECK(r.status == "ok");
  CHECK(slurp(a / "diagnostics.csv") == slurp(b / "diagnostics.csv"));
  CHECK(slurp(a / checkpoint_name(8)) == slurp(b / checkpoint_name(8)));
  const json sa = json::parse(slurp(a / "summary.json")), sb = json::parse(slurp(b / "summary.json"));
  for (const char* k : {"A_final", "M_hat", "invariant_violations", "events", "kim_integrals"}) CHECK(sa[k] == sb[k]);
}

TEST_CASE("solver failure exits 3 and keeps the last good checkpoint") {
  const fs::path dir = scratch("fail");
  RunConfig c = small_config();
  c.pressure = {1e-15, 1};
  RunOptions o;
  o.out_dir = dir.string();
  const RunResult r = run(c, o);
  CHECK(r.exit_code == 3);
  CHECK(r.status == "solver_error");
  CHECK(fs::exists(dir / checkpoint_name(0)));
  const json s = json::parse(slurp(dir / "summary.json"));
  CHECK(s["last_checkpoint"] == checkpoint_name(0));
  CHECK(read_checkpoint((dir / checkpoint_name(0)).string()).state.step == 0);
}

TEST_CASE("sweep: degenerate, failure injection and slope") {
  const fs::path dir = scratch("sweep"), single = scratch("single");
  RunConfig c = small_config();
  c.init.density.kind = DensityKind::kConstant;
  const json s = sweep(c, {-1.0, 0.01}, dir.string());
  REQUIRE(s["entries"].size() == 2);
  CHECK(s["entries"][0]["completed"] == false);
  CHECK(s["entries"][1]["completed"] == true);
  CHECK(s["slope"].is_null());
  CHECK(fs::exists(dir / "sweep.json"));

  // The single entry leaves the same artifacts as a plain run.
  RunConfig plain = c;
  plain.init.target_h12 = 0.01;
  RunOptions o;
  o.out_dir = single.string();
  run(plain, o);
  const fs::path e = s["entries"][1]["dir"].get<std::string>();
  CHECK(slurp(e / "diagnostics.csv") == slurp(single / "diagnostics.csv"));
  CHECK(slurp(e / checkpoint_name(8)) == slurp(single / checkpoint_name(8)));

  // Small data: sup A is linear in epsilon.
  const json two = sweep(c, {0.005, 0.01}, (dir / "two").string());
  CHECK(two["fitted"] == 2);
  CHECK(two["slope"].get<double>() == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("A from a checkpoint series matches the accumulator") {
  const fs::path dir = scratch("series");
  RunConfig c = small_config();
  c.max_dt = 1e-4;
  c.t_end = 0.01;
  c.checkpoint_every = 1;
  RunOptions o;
  o.out_dir = dir.string();
  const RunResult r = run(c, o);
  std::vector<std::string> paths;
  for (const auto& rec : r.records) paths.push_back((dir / checkpoint_name(rec.step)).string());
  const json d = diag(paths);
  const double quad = d["A_quadrature"], acc = d["A_accumulator"];
  CHECK(std::abs(quad - acc) / acc < 1e-3);
  CHECK(acc == r.records.back().A);
}
