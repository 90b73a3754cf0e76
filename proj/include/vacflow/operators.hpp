#pragma once

#include <array>

#include "vacflow/field.hpp"
#include "vacflow/spectral.hpp"

namespace vacflow {

// Spectral differential operators. First derivatives multiply by i*k with
// the Nyquist wavenumber zeroed; the Laplacian uses the full -|k|^2, so
// div(grad f) == laplacian(f) holds for fields without Nyquist content.

ScalarField derivative(const ScalarField& f, int axis);
VectorField grad(const ScalarField& f);
ScalarField div(const VectorField& v);
ScalarField laplacian(const ScalarField& f);
VectorField laplacian(const VectorField& v);

/// Projects onto the 2/3-rule band.
ScalarField dealias(const ScalarField& f);
VectorField dealias(const VectorField& v);

// Spectrum-level kernels shared by the solvers.
namespace spectral {

/// s <- i*k_axis*s (derivative wavenumber).
void differentiate(Spectrum& s, int axis);
Spectrum derivative(const Spectrum& s, int axis);
/// s <- -|k|^2 s
void laplacian(Spectrum& s);
/// sum_a i*k_a*v_a
Spectrum divergence(const std::array<Spectrum, 3>& v);
std::array<Spectrum, 3> gradient(const Spectrum& s);

/// |Omega| * sum_k w(k) |c_k|^2 over the full spectrum with a radial weight
/// evaluated at |k| (true wavenumbers, zero mode skipped when skip_zero).
template <class W>
double weighted_energy(const Spectrum& s, W&& weight, bool skip_zero) {
  const TorusGrid& g = s.grid();
  double sum = 0.0;
  s.for_each_mode([&](std::size_t i, int ix, int iy, int iz) {
    if (skip_zero && ix == 0 && iy == 0 && iz == 0) return;
    const double kx = g.wavenumber(ix), ky = g.wavenumber(iy), kz = g.wavenumber(iz);
    const double k2 = kx * kx + ky * ky + kz * kz;
    sum += s.weight(ix) * weight(k2) * std::norm(s[i]);
  });
  return sum * g.volume();
}

}  // namespace spectral

}  // namespace vacflow
