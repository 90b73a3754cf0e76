// Command-line front end: run, sweep, diag, init-spec.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "vacflow/errors.hpp"
#include "vacflow/harness.hpp"

using namespace vacflow;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitFormat = 4;

RunConfig resolve_config(const std::string& path, const std::vector<std::string>& overrides,
                         const std::string& resume) {
  if (!path.empty()) return load_config(path, overrides);
  if (resume.empty()) throw ConfigError("--config is required");
  nlohmann::json j = config_to_json(checkpoint_config(read_checkpoint(resume)));
  for (const auto& o : overrides) apply_override(j, o);
  return config_from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vacflow: variable-density incompressible flow on the periodic box"};
  app.require_subcommand(1);

  std::string config_path, out_dir, resume;
  std::vector<std::string> overrides, checkpoints;
  std::vector<double> epsilons;
  bool quiet = false;

  auto* run_cmd = app.add_subcommand("run", "Run one simulation");
  run_cmd->add_option("--config", config_path, "Config JSON");
  run_cmd->add_option("--out", out_dir, "Output directory (default: config output, or the checkpoint's directory)");
  run_cmd->add_option("--override", overrides, "Dotted key=value override")->take_all();
  run_cmd->add_option("--resume", resume, "Checkpoint to resume from")->check(CLI::ExistingFile);
  run_cmd->add_flag("--quiet", quiet, "No progress output");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run the epsilon sweep");
  sweep_cmd->add_option("--config", config_path, "Config JSON")->required();
  sweep_cmd->add_option("--out", out_dir, "Output directory (default: config output)");
  sweep_cmd->add_option("--override", overrides, "Dotted key=value override")->take_all();
  sweep_cmd->add_option("--eps", epsilons, "Epsilon values (default: sweep.epsilons)");
  sweep_cmd->add_flag("--quiet", quiet, "No progress output");

  auto* diag_cmd = app.add_subcommand("diag", "Recompute diagnostics from checkpoints");
  diag_cmd->add_option("checkpoints", checkpoints, "Checkpoint files")->required()->check(CLI::ExistingFile);

  auto* spec_cmd = app.add_subcommand("init-spec", "Print a validated example config");
  spec_cmd->add_option("--config", config_path, "Start from this config instead of the defaults");
  spec_cmd->add_option("--override", overrides, "Dotted key=value override")->take_all();
  spec_cmd->add_option("--out", out_dir, "Write to this file instead of stdout");

  CLI11_PARSE(app, argc, argv);
  std::ostream* log = quiet ? nullptr : &std::cerr;

  try {
    if (*run_cmd) {
      const RunConfig cfg = resolve_config(config_path, overrides, resume);
      RunOptions opt;
      opt.out_dir = out_dir;
      if (opt.out_dir.empty() && !resume.empty()) opt.out_dir = std::filesystem::path(resume).parent_path().string();
      opt.resume = resume;
      opt.log = log;
      const RunResult r = run(cfg, opt);
      std::cout << r.summary.dump(2) << '\n';
      if (r.exit_code != 0) std::cerr << "solver error: " << r.message << '\n';
      return r.exit_code;
    }
    if (*sweep_cmd) {
      const RunConfig cfg = load_config(config_path, overrides);
      const auto eps = epsilons.empty() ? cfg.sweep_epsilons : epsilons;
      const auto res = sweep(cfg, eps, out_dir.empty() ? cfg.output : out_dir, log);
      std::cout << res.dump(2) << '\n';
      return 0;
    }
    if (*diag_cmd) {
      std::cout << diag(checkpoints).dump(2) << '\n';
      return 0;
    }
    if (*spec_cmd) {
      nlohmann::json j = config_to_json(RunConfig{});
      for (const auto& o : overrides) apply_override(j, o);
      j = config_to_json(config_path.empty() ? config_from_json(j) : load_config(config_path, overrides));
      if (out_dir.empty()) {
        std::cout << j.dump(2) << '\n';
      } else {
        std::ofstream(out_dir) << j.dump(2) << '\n';
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
