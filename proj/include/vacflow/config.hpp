#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "vacflow/diagnostics.hpp"
#include "vacflow/initdata.hpp"
#include "vacflow/momentum.hpp"

namespace vacflow {

enum class RunMode { kNonlinear, kLinear };

std::string to_string(RunMode m);
RunMode parse_run_mode(const std::string& s);

struct RunConfig {
  int n = 32;
  double L = 1.0;

  double mu = 0.05;
  double rho_bar = 1.0;
  double delta_floor = 1e-6;

  InitSpec init;

  TransportVariant transport = TransportVariant::kMuscl2Minmod;
  AdvectionForm advection = AdvectionForm::kSkewSymmetric;
  ViscousTreatment viscous = ViscousTreatment::kImplicitSpectral;
  int time_order = 1;
  /// kLinear advances the linearised system about the zero state.
  RunMode mode = RunMode::kNonlinear;

  double t_end = 1.0;
  /// Bounds both the momentum and the transport Courant numbers.
  double cfl = 0.5;
  double max_dt = 1e-2;
  long snapshot_every = 1;
  long checkpoint_every = 100;

  DiagnosticsConfig diagnostics;
  SolverControls pressure{1e-12, 500};
  SolverControls viscous_solver{1e-12, 500};

  std::vector<double> sweep_epsilons{0.0125, 0.025, 0.05, 0.1};

  std::string output = "run";
  std::uint64_t seed = 1;

  /// Throws ConfigError.
  void validate() const;
  MomentumParams momentum_params() const;
};

/// Parses and validates; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);

/// Applies "a.b.c=value" to a JSON document; value is parsed as JSON and
/// taken as a string when it does not parse.
void apply_override(nlohmann::json& j, const std::string& assignment);

/// Reads a config file, applies the overrides in order, parses.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

}  // namespace vacflow
