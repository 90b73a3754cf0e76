#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vacflow/field.hpp"

namespace vacflow {

enum class DensityKind { kConstant, kVacuumBubble, kTwoPhase };
enum class VelocityKind { kTaylorGreen, kRandomSolenoidal };

std::string to_string(DensityKind k);
std::string to_string(VelocityKind k);
DensityKind parse_density_kind(const std::string& s);
VelocityKind parse_velocity_kind(const std::string& s);

struct DensityProfile {
  DensityKind kind = DensityKind::kConstant;
  /// Constant value, or the largest level of the other profiles.
  double rho_bar = 1.0;
  /// Vacuum bubble: rho = 0 for r < radius, rho_bar for r > radius + width.
  /// Center is given in units of L.
  std::array<double, 3> center{0.5, 0.5, 0.5};
  double radius = 0.15;
  /// Interface width in units of L; a negative value selects 4*dx, zero a
  /// sharp step. Radius is in units of L as well.
  double width = -1.0;
  /// Two-phase slab: levels[0] for |x - L/2| < L/4, levels[1] outside.
  std::array<double, 2> levels{0.5, 1.0};
};

struct VelocityProfile {
  VelocityKind kind = VelocityKind::kTaylorGreen;
  /// Taylor-Green peak amplitude; RMS speed of the random field.
  double amplitude = 1.0;
  std::uint64_t seed = 1;
  /// Random field: spectral amplitude |k|^slope on integer shells band[0] <= |m| <= band[1].
  double slope = -1.0;
  std::array<double, 2> band{1.0, 3.0};
  /// When positive (vacuum bubble only), the velocity is the curl of a
  /// potential cut off smoothly between the bubble radius and radius +
  /// clearance (units of L), so u0 nearly vanishes on the vacuum set.
  double vacuum_clearance = 0.0;
};

struct InitSpec {
  DensityProfile density;
  VelocityProfile velocity;
  /// Desired ||u0||_{H^{1/2}}; empty means unscaled.
  std::optional<double> target_h12;

  void validate() const;
};

struct InitialData {
  ScalarField rho;
  VectorField u;
  /// |int rho u| after the momentum correction.
  double momentum_residual = 0.0;
  /// Non-fatal remarks, e.g. a sharp interface.
  std::vector<std::string> warnings;
};

InitialData build_initial(const InitSpec& spec, const TorusGrid& grid);

/// (||g0 / sqrt(max(rho0, delta*rho_bar))||, ||g0 on {rho0 = 0}||) with
/// g0 = mu lap u0 - grad P0 and P0 the gradient potential of mu lap u0.
/// rho_bar is max rho0.
std::pair<double, double> compatibility_residual(const ScalarField& rho0, const VectorField& u0,
                                                 double mu, double delta_floor);

}  // namespace vacflow
