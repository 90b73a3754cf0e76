#include "vacflow/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vacflow/errors.hpp"
#include "vacflow/spectral.hpp"

namespace vacflow {

std::string to_string(TransportVariant v) {
  return v == TransportVariant::kUpwind1 ? "upwind1" : "muscl2-minmod";
}

TransportVariant parse_transport_variant(const std::string& s) {
  if (s == "upwind1") return TransportVariant::kUpwind1;
  if (s == "muscl2-minmod") return TransportVariant::kMuscl2Minmod;
  throw ParameterError("unknown transport variant '" + s + "'");
}

void TransportScheme::validate() const {
  const double cap = variant == TransportVariant::kUpwind1 ? 1.0 : 0.5;
  if (!(cfl_limit > 0.0 && cfl_limit <= cap)) {
    throw ParameterError("transport: CFL limit for " + to_string(variant) + " must lie in (0, " +
                         std::to_string(cap) + "]");
  }
}

FaceVelocity face_velocity(const VectorField& u) {
  const TorusGrid& g = u.grid();
  const double dx = g.dx();
  const double dtheta = 2.0 * std::numbers::pi / g.n();
  auto sp = forward(u);

  // Stencil symbols: e^{i theta} is the shift i -> i+1.
  auto shift = [&](int idx) { return std::polar(1.0, dtheta * idx); };
  const Spectrum& ref = sp[0];
  ref.for_each_mode([&](std::size_t i, int ix, int iy, int iz) {
    const int idx[3] = {ix, iy, iz};
    Complex face[3], gradient[3];
    Complex divergence = 0.0;
    double lap = 0.0;
    for (int a = 0; a < 3; ++a) {
      const Complex e = shift(idx[a]);
      face[a] = 0.5 * (1.0 + e) * sp[a][i];
      gradient[a] = (e - 1.0) / dx;
      divergence += (1.0 - std::conj(e)) / dx * face[a];
      const double s = std::sin(0.5 * dtheta * idx[a]);
      lap -= 4.0 * s * s / (dx * dx);
    }
    const Complex phi = lap == 0.0 ? Complex(0.0) : divergence / lap;
    for (int a = 0; a < 3; ++a) sp[a][i] = face[a] - gradient[a] * phi;
  });

  FaceVelocity U(g);
  for (int a = 0; a < 3; ++a) {
    ScalarField f = inverse(std::move(sp[a]));
    U.normal[a].assign(f.values().begin(), f.values().end());
  }
  return U;
}

namespace {

// Visits every cell with its periodic neighbours along one axis:
// f(i, down, up) with flat indices.
template <class F>
void for_each_along(const TorusGrid& g, int axis, F&& f) {
  const int n = g.n();
  const std::size_t stride = axis == 0 ? 1 : (axis == 1 ? std::size_t(n) : std::size_t(n) * n);
  const std::size_t wrap = stride * (n - 1);
  std::size_t i = 0;
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix, ++i) {
        const int c = axis == 0 ? ix : (axis == 1 ? iy : iz);
        const std::size_t down = c == 0 ? i + wrap : i - stride;
        const std::size_t up = c == n - 1 ? i - wrap : i + stride;
        f(i, down, up);
      }
}

// Forward-Euler flux-difference update.
void euler_stage(const std::vector<double>& rho, const FaceVelocity& U, double lambda,
                 bool reconstruct, std::vector<double>& out) {
  const TorusGrid& g = U.grid;
  const std::size_t cells = g.cells();
  std::vector<double> slope(cells, 0.0), flux(cells);
  out = rho;
  for (int a = 0; a < 3; ++a) {
    if (reconstruct) {
      for_each_along(g, a, [&](std::size_t i, std::size_t down, std::size_t up) {
        slope[i] = minmod(rho[i] - rho[down], rho[up] - rho[i]);
      });
    }
    const auto& vel = U.normal[a];
    for_each_along(g, a, [&](std::size_t i, std::size_t, std::size_t up) {
      const double v = vel[i];
      flux[i] = v >= 0.0 ? v * (rho[i] + 0.5 * slope[i]) : v * (rho[up] - 0.5 * slope[up]);
    });
    for_each_along(g, a, [&](std::size_t i, std::size_t down, std::size_t) {
      out[i] -= lambda * (flux[i] - flux[down]);
    });
  }
}

}  // namespace

ScalarField face_divergence(const FaceVelocity& U) {
  const TorusGrid& g = U.grid;
  ScalarField d(g);
  for (int a = 0; a < 3; ++a) {
    for_each_along(g, a, [&](std::size_t i, std::size_t down, std::size_t) {
      d[i] += U.normal[a][i] - U.normal[a][down];
    });
  }
  return (1.0 / g.dx()) * std::move(d);
}

double courant_number(const FaceVelocity& U, double dt) {
  const TorusGrid& g = U.grid;
  std::vector<double> sum(g.cells(), 0.0);
  for (int a = 0; a < 3; ++a) {
    for_each_along(g, a, [&](std::size_t i, std::size_t down, std::size_t) {
      sum[i] += std::max(std::abs(U.normal[a][i]), std::abs(U.normal[a][down]));
    });
  }
  return dt * *std::max_element(sum.begin(), sum.end()) / g.dx();
}

double admissible_dt(const FaceVelocity& U, const TransportScheme& scheme) {
  const double c = courant_number(U, 1.0);
  return c == 0.0 ? std::numeric_limits<double>::infinity() : scheme.cfl_limit / c;
}

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(b) < std::abs(a) ? b : a;
}

ScalarField advect_density(const ScalarField& rho, const FaceVelocity& U, double dt,
                           const TransportScheme& scheme) {
  require_same_grid(rho.grid(), U.grid, "advect_density");
  scheme.validate();
  if (!(dt > 0.0)) throw ParameterError("advect_density: dt must be positive");
  if (rho.min() < -1e-12) throw ParameterError("advect_density: density must be non-negative");
  const double courant = courant_number(U, dt);
  if (courant > scheme.cfl_limit * (1.0 + 1e-12)) {
    throw CflViolation("advect_density: Courant number " + std::to_string(courant) +
                           " exceeds limit " + std::to_string(scheme.cfl_limit),
                       admissible_dt(U, scheme));
  }
  const double lambda = dt / rho.grid().dx();
  const std::vector<double> start(rho.values().begin(), rho.values().end());
  std::vector<double> stage;
  if (scheme.variant == TransportVariant::kUpwind1) {
    euler_stage(start, U, lambda, false, stage);
    return ScalarField(rho.grid(), std::move(stage));
  }
  std::vector<double> second;
  euler_stage(start, U, lambda, true, stage);
  euler_stage(stage, U, lambda, true, second);
  for (std::size_t i = 0; i < second.size(); ++i) second[i] = 0.5 * (start[i] + second[i]);
  return ScalarField(rho.grid(), std::move(second));
}

ScalarField advect_density(const ScalarField& rho, const VectorField& u, double dt,
                           const TransportScheme& scheme) {
  return advect_density(rho, face_velocity(u), dt, scheme);
}

}  // namespace vacflow
