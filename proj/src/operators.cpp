#include "vacflow/operators.hpp"

namespace vacflow {

namespace spectral {

void differentiate(Spectrum& s, int axis) {
  const TorusGrid& g = s.grid();
  s.for_each_mode([&](std::size_t i, int ix, int iy, int iz) {
    const int idx = axis == 0 ? ix : (axis == 1 ? iy : iz);
    const double k = g.derivative_wavenumber(idx);
    s[i] = Complex(-k * s[i].imag(), k * s[i].real());
  });
}

Spectrum derivative(const Spectrum& s, int axis) {
  Spectrum out = s;
  differentiate(out, axis);
  return out;
}

void laplacian(Spectrum& s) {
  const TorusGrid& g = s.grid();
  s.for_each_mode([&](std::size_t i, int ix, int iy, int iz) {
    const double kx = g.wavenumber(ix), ky = g.wavenumber(iy), kz = g.wavenumber(iz);
    s[i] *= -(kx * kx + ky * ky + kz * kz);
  });
}

Spectrum divergence(const std::array<Spectrum, 3>& v) {
  const TorusGrid& g = v[0].grid();
  Spectrum out(g);
  out.for_each_mode([&](std::size_t i, int ix, int iy, int iz) {
    const Complex d = g.derivative_wavenumber(ix) * v[0][i] +
                      g.derivative_wavenumber(iy) * v[1][i] +
                      g.derivative_wavenumber(iz) * v[2][i];
    out[i] = Complex(-d.imag(), d.real());
  });
  return out;
}

std::array<Spectrum, 3> gradient(const Spectrum& s) {
  return {derivative(s, 0), derivative(s, 1), derivative(s, 2)};
}

}  // namespace spectral

ScalarField derivative(const ScalarField& f, int axis) {
  Spectrum s = forward(f);
  spectral::differentiate(s, axis);
  return inverse(std::move(s));
}

VectorField grad(const ScalarField& f) {
  const Spectrum s = forward(f);
  return inverse(spectral::gradient(s));
}

ScalarField div(const VectorField& v) { return inverse(spectral::divergence(forward(v))); }

ScalarField laplacian(const ScalarField& f) {
  Spectrum s = forward(f);
  spectral::laplacian(s);
  return inverse(std::move(s));
}

VectorField laplacian(const VectorField& v) {
  return VectorField(laplacian(v[0]), laplacian(v[1]), laplacian(v[2]));
}

ScalarField dealias(const ScalarField& f) {
  Spectrum s = forward(f);
  s.dealias();
  return inverse(std::move(s));
}

VectorField dealias(const VectorField& v) {
  return VectorField(dealias(v[0]), dealias(v[1]), dealias(v[2]));
}

}  // namespace vacflow
