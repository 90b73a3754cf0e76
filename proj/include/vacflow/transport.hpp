#pragma once

#include <array>
#include <string>
#include <vector>

#include "vacflow/field.hpp"

namespace vacflow {

enum class TransportVariant { kUpwind1, kMuscl2Minmod };

std::string to_string(TransportVariant v);
TransportVariant parse_transport_variant(const std::string& s);

struct TransportScheme {
  TransportVariant variant = TransportVariant::kMuscl2Minmod;
  double cfl_limit = 0.5;

  /// Throws ParameterError unless 0 < cfl_limit <= 1 (upwind1) or <= 0.5 (muscl2).
  void validate() const;
};

/// Normal velocities on cell faces. Component a at flat index i is the
/// velocity through the face between cell i and cell i + e_a.
struct FaceVelocity {
  explicit FaceVelocity(const TorusGrid& g)
      : grid(g), normal{std::vector<double>(g.cells()), std::vector<double>(g.cells()),
                        std::vector<double>(g.cells())} {}
  TorusGrid grid;
  std::array<std::vector<double>, 3> normal;
};

/// Midpoint interpolation of the nodal velocity to faces, followed by a
/// constant-coefficient discrete projection so the finite-volume divergence
/// of the face field vanishes to roundoff.
FaceVelocity face_velocity(const VectorField& u);

/// Finite-volume divergence sum_a (U_a[i] - U_a[i - e_a]) / dx.
ScalarField face_divergence(const FaceVelocity& U);

/// Courant number dt * max_i sum_a max(|U_a[i - e_a]|, |U_a[i]|) / dx.
/// Bounding the sum over axes is what makes the unsplit update a convex
/// combination of neighbouring values.
double courant_number(const FaceVelocity& U, double dt);
double admissible_dt(const FaceVelocity& U, const TransportScheme& scheme);

/// minmod with ties at equal magnitude resolved to the first argument.
double minmod(double a, double b);

/// One conservative step of d(rho)/dt + div(rho u) = 0. upwind1 uses forward
/// Euler; muscl2-minmod uses Heun (SSP-RK2) with the face field frozen.
/// Throws CflViolation carrying the admissible dt.
ScalarField advect_density(const ScalarField& rho, const FaceVelocity& U, double dt,
                           const TransportScheme& scheme);
ScalarField advect_density(const ScalarField& rho, const VectorField& u, double dt,
                           const TransportScheme& scheme);

}  // namespace vacflow
