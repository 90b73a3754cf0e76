#pragma once

#include <array>
#include <string>
#include <vector>

#include "vacflow/field.hpp"
#include "vacflow/transport.hpp"

namespace vacflow {

enum class AdvectionForm { kConvective, kSkewSymmetric };
enum class ViscousTreatment { kImplicitSpectral, kExplicit };

std::string to_string(AdvectionForm f);
std::string to_string(ViscousTreatment v);
AdvectionForm parse_advection_form(const std::string& s);
ViscousTreatment parse_viscous_treatment(const std::string& s);

struct SolverControls {
  double rtol = 1e-12;
  int max_iterations = 500;
};

struct MomentumParams {
  double mu = 0.1;
  /// Reference density, the sup norm of the initial density.
  double rho_bar = 1.0;
  /// Density floor as a fraction of rho_bar; used only where 1/rho appears.
  double delta_floor = 1e-6;
  AdvectionForm advection = AdvectionForm::kSkewSymmetric;
  ViscousTreatment viscous = ViscousTreatment::kImplicitSpectral;
  /// 1: first-order splitting; 2: midpoint advection with Crank-Nicolson viscosity.
  int time_order = 1;
  /// dt * max|u| / dx bound for the momentum step.
  double cfl = 0.5;
  TransportScheme transport;
  SolverControls pressure;
  SolverControls viscous_solver;

  void validate() const;
  double floor_density() const { return delta_floor * rho_bar; }
};

/// Solver state. P is the pressure in zero-mean gauge; the two accumulators
/// are left-Riemann sums of ||grad u||^2 and ||grad u||^4 over past steps.
struct SimState {
  explicit SimState(const TorusGrid& g) : rho(g), u(g), p(g) {}
  SimState(ScalarField rho0, VectorField u0);

  double t = 0.0;
  long step = 0;
  ScalarField rho;
  VectorField u;
  ScalarField p;
  double dissipation_integral = 0.0;
  double grad4_integral = 0.0;

  const TorusGrid& grid() const { return rho.grid(); }
};

/// Helmholtz-Weyl split v = solenoidal + grad(potential), div(solenoidal) = 0.
struct HelmholtzSplit {
  VectorField solenoidal;
  ScalarField potential;
};

HelmholtzSplit leray_project(const VectorField& v);

struct PressureSolveReport {
  int iterations = 0;
  std::vector<double> residuals;
};

/// Solves div((1/max(rho, delta_floor*rho_bar)) grad P) = div r for zero-mean
/// P by PCG preconditioned with the constant-coefficient spectral inverse
/// Laplacian. Throws SolverError after controls.max_iterations.
ScalarField pressure_solve(const ScalarField& rho, const VectorField& r, double delta_floor,
                           double rho_bar, const SolverControls& controls = {},
                           PressureSolveReport* report = nullptr);

/// The discrete operator div((1/max(rho, floor)) grad P) used by pressure_solve.
ScalarField pressure_operator(const ScalarField& rho, const ScalarField& p, double floor_density);

struct StepReport {
  int pressure_iterations = 0;
  int viscous_iterations = 0;
  /// ||grad part removed by the final Leray clean-up|| / ||u||.
  double cleanup_fraction = 0.0;
};

/// Largest dt allowed by the momentum CFL (and the explicit viscous bound).
double momentum_dt_limit(const SimState& s, const MomentumParams& p, const VectorField& advecting);

/// One step of the variable-density projection scheme. Throws CflViolation
/// when dt exceeds the admissible step and SolverError on solver failure.
SimState momentum_step(const SimState& s, double dt, const MomentumParams& p,
                       StepReport* report = nullptr);

/// Same discrete scheme with a prescribed transport velocity: advances
///   rho dw/dt - mu lap w + (rho u.grad) w + grad P = 0,  div w = 0,
/// with rho advected by u_frozen. Linear in (w, P).
SimState linear_step(const SimState& s, double dt, const MomentumParams& p,
                     const VectorField& u_frozen, StepReport* report = nullptr);

/// Kinetic energy 1/2 int rho |u|^2.
double kinetic_energy(const ScalarField& rho, const VectorField& u);
/// ||grad u||_{L2} computed spectrally.
double grad_norm(const VectorField& u);
/// int rho u dx.
std::array<double, 3> momentum(const ScalarField& rho, const VectorField& u);

}  // namespace vacflow
