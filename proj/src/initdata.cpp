#include "vacflow/initdata.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "vacflow/errors.hpp"
#include "vacflow/momentum.hpp"
#include "vacflow/norms.hpp"
#include "vacflow/operators.hpp"
#include "vacflow/spectral.hpp"

namespace vacflow {

std::string to_string(DensityKind k) {
  switch (k) {
    case DensityKind::kConstant: return "constant";
    case DensityKind::kVacuumBubble: return "vacuum-bubble";
    case DensityKind::kTwoPhase: return "two-phase";
  }
  return "?";
}

std::string to_string(VelocityKind k) {
  return k == VelocityKind::kTaylorGreen ? "taylor-green" : "random-solenoidal";
}

DensityKind parse_density_kind(const std::string& s) {
  if (s == "constant") return DensityKind::kConstant;
  if (s == "vacuum-bubble") return DensityKind::kVacuumBubble;
  if (s == "two-phase") return DensityKind::kTwoPhase;
  throw SpecError("unknown density profile '" + s + "'");
}

VelocityKind parse_velocity_kind(const std::string& s) {
  if (s == "taylor-green") return VelocityKind::kTaylorGreen;
  if (s == "random-solenoidal") return VelocityKind::kRandomSolenoidal;
  throw SpecError("unknown velocity profile '" + s + "'");
}

void InitSpec::validate() const {
  const auto& d = density;
  if (!(d.rho_bar > 0.0) || !std::isfinite(d.rho_bar)) throw SpecError("init: rho_bar must be positive");
  if (d.kind == DensityKind::kVacuumBubble) {
    if (!(d.radius > 0.0 && d.radius < 0.5)) throw SpecError("init: bubble radius must lie in (0, 0.5) L");
  }
  if (d.kind == DensityKind::kTwoPhase) {
    for (double l : d.levels)
      if (!(l >= 0.0 && l <= d.rho_bar)) throw SpecError("init: two-phase levels must lie in [0, rho_bar]");
    if (d.levels[0] == 0.0 && d.levels[1] == 0.0) throw SpecError("init: density vanishes everywhere");
  }
  const auto& v = velocity;
  if (!std::isfinite(v.amplitude)) throw SpecError("init: amplitude must be finite");
  if (v.kind == VelocityKind::kRandomSolenoidal) {
    if (!(v.band[0] >= 0.0 && v.band[1] >= v.band[0]) || !std::isfinite(v.slope)) {
      throw SpecError("init: random-solenoidal band must satisfy 0 <= min <= max");
    }
  }
  if (v.vacuum_clearance < 0.0) throw SpecError("init: vacuum_clearance must be non-negative");
  if (v.vacuum_clearance > 0.0) {
    if (d.kind != DensityKind::kVacuumBubble) throw SpecError("init: vacuum_clearance needs a vacuum bubble");
    if (d.radius + v.vacuum_clearance >= 0.5) throw SpecError("init: bubble plus clearance exceeds half the box");
  }
  if (target_h12 && !(*target_h12 >= 0.0 && std::isfinite(*target_h12))) {
    throw SpecError("init: target_h12 must be a non-negative number");
  }
}

namespace {

double smoothstep5(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * s * (10 - 15 * s + 6 * s * s);
}

// Analytic transition, about 1e-5 at s = 0 and 1 - 1e-5 at s = 1. An
// exactly vanishing bump leaves larger spectral residuals on the grid.
double smooth_cutoff(double s) { return 0.5 * (1.0 + std::erf(6.0 * (s - 0.5))); }

double rms(const VectorField& v) { return std::sqrt(v.dot(v) / v.grid().volume()); }

// Minimum-image distance on the torus.
double periodic_distance(const TorusGrid& g, const std::array<double, 3>& c, double x, double y, double z) {
  const double L = g.length();
  const double p[3] = {x, y, z};
  double r2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    double d = std::remainder(p[a] - c[a] * L, L);
    r2 += d * d;
  }
  return std::sqrt(r2);
}

ScalarField build_density(const DensityProfile& d, const TorusGrid& g, std::vector<std::string>& warnings) {
  const double L = g.length();
  const double width = d.width < 0.0 ? 4.0 * g.dx() : d.width * L;
  if (d.kind != DensityKind::kConstant && width < 2.0 * g.dx()) {
    warnings.push_back("interface width " + std::to_string(width) + " is below two cells (sharp interface)");
  }
  auto step = [&](double s) {
    if (width == 0.0) return s >= 0.0 ? 1.0 : 0.0;
    return smoothstep5(s / width);
  };
  switch (d.kind) {
    case DensityKind::kConstant:
      return ScalarField(g, d.rho_bar);
    case DensityKind::kVacuumBubble:
      return ScalarField::sample(g, [&](double x, double y, double z) {
        return d.rho_bar * step(periodic_distance(g, d.center, x, y, z) - d.radius * L);
      });
    case DensityKind::kTwoPhase:
      return ScalarField::sample(g, [&](double x, double, double) {
        const double s = step(std::abs(std::remainder(x - 0.5 * L, L)) - 0.25 * L);
        return d.levels[0] + (d.levels[1] - d.levels[0]) * s;
      });
  }
  return ScalarField(g);
}

// Random complex amplitudes on the integer modes of the band, drawn in a
// fixed order over the mode box so the field does not depend on n; spectral
// weight |k|^power, optionally projected mode by mode onto divergence-free
// vectors.
std::array<Spectrum, 3> random_spectrum(const VelocityProfile& v, const TorusGrid& g, double power,
                                        bool project) {
  std::mt19937_64 rng(v.seed);
  std::normal_distribution<double> normal;
  std::array<Spectrum, 3> sp{Spectrum(g), Spectrum(g), Spectrum(g)};
  const int n = g.n();
  const int box = static_cast<int>(std::ceil(v.band[1]));
  if (box >= n / 2) throw SpecError("init: random-solenoidal band reaches the Nyquist mode");
  const double w = 2 * std::numbers::pi / g.length();
  auto wrap = [n](int m) { return m < 0 ? m + n : m; };
  for (int mz = -box; mz <= box; ++mz)
    for (int my = -box; my <= box; ++my)
      for (int mx = -box; mx <= box; ++mx) {
        Complex c[3];
        for (auto& ca : c) ca = Complex(normal(rng), normal(rng));
        // One representative of each conjugate pair.
        const bool upper = mz > 0 || (mz == 0 && (my > 0 || (my == 0 && mx > 0)));
        const double shell = std::sqrt(double(mx * mx + my * my + mz * mz));
        if (!upper || shell < v.band[0] || shell > v.band[1]) continue;
        const double k[3] = {w * mx, w * my, w * mz};
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if (project) {
          const Complex kc = k[0] * c[0] + k[1] * c[1] + k[2] * c[2];
          for (int a = 0; a < 3; ++a) c[a] -= k[a] * kc / k2;
        }
        const double scale = std::pow(std::sqrt(k2), power);
        for (int a = 0; a < 3; ++a) c[a] *= scale;
        const std::size_t h = n / 2 + 1;
        auto at = [&](int x, int y, int z) { return (std::size_t(wrap(z)) * n + wrap(y)) * h + x; };
        for (int a = 0; a < 3; ++a) {
          if (mx > 0) {
            sp[a][at(mx, my, mz)] = c[a];
          } else if (mx < 0) {
            sp[a][at(-mx, -my, -mz)] = std::conj(c[a]);
          } else {
            sp[a][at(0, my, mz)] = c[a];
            sp[a][at(0, -my, -mz)] = std::conj(c[a]);
          }
        }
      }
  return sp;
}

VectorField curl_of(std::array<Spectrum, 3> A) {
  std::array<Spectrum, 3> out{spectral::derivative(A[2], 1), spectral::derivative(A[0], 2),
                              spectral::derivative(A[1], 0)};
  out[0] += (spectral::derivative(A[1], 2) *= -1.0);
  out[1] += (spectral::derivative(A[2], 0) *= -1.0);
  out[2] += (spectral::derivative(A[0], 1) *= -1.0);
  return inverse(std::move(out));
}

VectorField build_velocity(const InitSpec& spec, const TorusGrid& g) {
  const VelocityProfile& v = spec.velocity;
  const double L = g.length();
  const double k = 2 * std::numbers::pi / L;
  const bool masked = v.vacuum_clearance > 0.0;

  if (!masked) {
    if (v.kind == VelocityKind::kTaylorGreen) {
      return VectorField::sample(g, [&](double x, double y, double) {
        return std::array<double, 3>{v.amplitude * std::sin(k * x) * std::cos(k * y),
                                     -v.amplitude * std::cos(k * x) * std::sin(k * y), 0.0};
      });
    }
    VectorField u = inverse(random_spectrum(v, g, v.slope, true));
    const double m = rms(u);
    if (m > 0.0) u *= v.amplitude / m;
    return u;
  }

  // Vector potential, cut off around the bubble, then curl.
  VectorField A(g);
  if (v.kind == VelocityKind::kTaylorGreen) {
    A[2] = ScalarField::sample(g, [&](double x, double y, double) {
      return v.amplitude / k * std::sin(k * x) * std::sin(k * y);
    });
  } else {
    A = inverse(random_spectrum(v, g, v.slope - 1.0, false));
    const double a = rms(curl_of(forward(A)));
    if (a > 0.0) A *= v.amplitude / a;
  }
  const auto& d = spec.density;
  const double r0 = d.radius * L, r1 = r0 + v.vacuum_clearance * L;
  const ScalarField chi = ScalarField::sample(g, [&](double x, double y, double z) {
    return smooth_cutoff((periodic_distance(g, d.center, x, y, z) - r0) / (r1 - r0));
  });
  for (int a = 0; a < 3; ++a) A[a] = hadamard(chi, A[a]);
  return curl_of(forward(A));
}

}  // namespace

InitialData build_initial(const InitSpec& spec, const TorusGrid& grid) {
  spec.validate();
  InitialData out{ScalarField(grid), VectorField(grid), 0.0, {}};
  out.rho = build_density(spec.density, grid, out.warnings);
  VectorField u = build_velocity(spec, grid);

  const double mass = out.rho.integral();
  for (int pass = 0; pass < 2; ++pass) {
    const auto m = momentum(out.rho, u);
    for (int a = 0; a < 3; ++a) {
      const double c = m[a] / mass;
      for (std::size_t i = 0; i < u[a].size(); ++i) u[a][i] -= c;
    }
    u = leray_project(u).solenoidal;
  }

  if (spec.target_h12) {
    const double h = hs_norm(u, 0.5);
    if (h == 0.0) {
      if (*spec.target_h12 > 0.0) throw SpecError("init: target_h12 > 0 is unreachable for a zero velocity");
    } else {
      u *= *spec.target_h12 / h;
    }
  }

  const auto m = momentum(out.rho, u);
  out.momentum_residual = std::sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]);
  const double unorm = std::sqrt(u.dot(u));
  if (out.momentum_residual > 1e-10 * spec.density.rho_bar * std::max(unorm, 1e-300) && unorm > 0.0) {
    throw Error("init: weighted momentum residual " + std::to_string(out.momentum_residual) +
                " above tolerance");
  }
  out.u = std::move(u);
  return out;
}

std::pair<double, double> compatibility_residual(const ScalarField& rho0, const VectorField& u0,
                                                 double mu, double delta_floor) {
  require_same_grid(rho0.grid(), u0.grid(), "compatibility_residual");
  const VectorField g0 = leray_project(mu * laplacian(u0)).solenoidal;
  const double floor_density = delta_floor * std::max(rho0.max(), 1.0e-300);
  double weighted = 0.0, vacuum = 0.0;
  for (std::size_t i = 0; i < rho0.size(); ++i) {
    const double s = g0[0][i] * g0[0][i] + g0[1][i] * g0[1][i] + g0[2][i] * g0[2][i];
    weighted += s / std::max(rho0[i], floor_density);
    if (rho0[i] <= 0.0) vacuum += s;
  }
  const double dv = rho0.grid().cell_volume();
  return {std::sqrt(weighted * dv), std::sqrt(vacuum * dv)};
}

}  // namespace vacflow
