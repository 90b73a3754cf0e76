#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "vacflow/errors.hpp"
#include "vacflow/norms.hpp"
#include "vacflow/operators.hpp"
#include "vacflow/spectral.hpp"

using namespace vacflow;
using std::numbers::pi;

namespace {

ScalarField random_field(const TorusGrid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  ScalarField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = d(rng);
  return f;
}

// Random trig polynomial with modes |m| <= band on every axis.
ScalarField band_limited(const TorusGrid& g, int band, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  std::vector<std::tuple<int, int, int, double, double>> modes;
  for (int mz = -band; mz <= band; ++mz)
    for (int my = -band; my <= band; ++my)
      for (int mx = 0; mx <= band; ++mx) modes.emplace_back(mx, my, mz, d(rng), d(rng));
  const double w = 2 * pi / g.length();
  return ScalarField::sample(g, [&](double x, double y, double z) {
    double s = 0.0;
    for (auto [mx, my, mz, a, b] : modes) {
      const double ph = w * (mx * x + my * y + mz * z);
      s += a * std::cos(ph) + b * std::sin(ph);
    }
    return s;
  });
}

double rel_l2(const ScalarField& a, const ScalarField& b) {
  ScalarField d = a - b;
  return std::sqrt(d.dot(d) / std::max(b.dot(b), 1e-300));
}

// Direct O(n^6) DFT with the library normalisation.
std::vector<std::complex<double>> direct_dft(const ScalarField& f) {
  const TorusGrid& g = f.grid();
  const int n = g.n();
  std::vector<std::complex<double>> out(g.cells());
  for (int kz = 0; kz < n; ++kz)
    for (int ky = 0; ky < n; ++ky)
      for (int kx = 0; kx < n; ++kx) {
        std::complex<double> s = 0.0;
        for (int iz = 0; iz < n; ++iz)
          for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix) {
              const double ph = -2 * pi * double(kx * ix + ky * iy + kz * iz) / n;
              s += f.at(ix, iy, iz) * std::polar(1.0, ph);
            }
        out[g.index(kx, ky, kz)] = s / double(g.cells());
      }
  return out;
}

// Brute-force weak-L^q norm: every attained level, count by full scan.
double weak_oracle(const ScalarField& f, double q) {
  const double cell = f.grid().cell_volume();
  double best = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a = std::abs(f[i]);
    if (a == 0.0) continue;
    std::size_t count = 0;
    for (std::size_t j = 0; j < f.size(); ++j) count += std::abs(f[j]) >= a;
    best = std::max(best, a * std::pow(cell * double(count), 1.0 / q));
  }
  return best;
}

}  // namespace

TEST_CASE("grid invariants") {
  CHECK_THROWS_AS(TorusGrid(6, 1.0), ParameterError);
  CHECK_THROWS_AS(TorusGrid(9, 1.0), ParameterError);
  CHECK_THROWS_AS(TorusGrid(8, 0.0), ParameterError);
  TorusGrid g(16, 3.0);
  CHECK(g.dx() * g.n() == 3.0);
  CHECK(g.mode(8) == 8);
  CHECK(g.mode(9) == -7);
  CHECK(g.derivative_wavenumber(8) == 0.0);
}

TEST_CASE("fft of zero field is zero") {
  TorusGrid g(8, 1.0);
  SpectralField s = fft_forward(ScalarField(g));
  for (auto c : s.component(0)) CHECK(c == std::complex<double>(0.0));
}

TEST_CASE("single cosine has two coefficients of one half") {
  TorusGrid g(16, 2.5);
  auto f = ScalarField::sample(g, [&](double x, double, double) {
    return std::cos(2 * pi * x / g.length());
  });
  SpectralField s = fft_forward(f);
  for (int iz = 0; iz < 16; ++iz)
    for (int iy = 0; iy < 16; ++iy)
      for (int ix = 0; ix < 16; ++ix) {
        const auto c = s.coeff(0, ix, iy, iz);
        const bool hit = iy == 0 && iz == 0 && (ix == 1 || ix == 15);
        CHECK(std::abs(c - (hit ? 0.5 : 0.0)) < 1e-15);
      }
}

TEST_CASE("forward transform matches direct DFT on n=8 and round-trips") {
  TorusGrid g(8, 1.7);
  std::mt19937_64 rng(11);
  ScalarField f = random_field(g, rng);
  const auto oracle = direct_dft(f);
  const SpectralField s = fft_forward(f);
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    err = std::max(err, std::abs(oracle[i] - s.component(0)[i]));
    scale = std::max(scale, std::abs(oracle[i]));
  }
  CHECK(err / scale < 1e-12);
  CHECK(s.hermitian_defect() < 1e-14);
  CHECK(rel_l2(fft_inverse_scalar(s), f) < 1e-12);

  VectorField v(random_field(g, rng), random_field(g, rng), random_field(g, rng));
  VectorField back = fft_inverse_vector(fft_forward(v));
  for (int a = 0; a < 3; ++a) CHECK(rel_l2(back[a], v[a]) < 1e-12);
}

TEST_CASE("inverse rejects non-Hermitian spectra") {
  TorusGrid g(8, 1.0);
  SpectralField s(g, 1);
  s.coeff(0, 1, 0, 0) = {1.0, 0.0};
  CHECK_THROWS_AS(fft_inverse_scalar(s), SymmetryViolation);
  s.coeff(0, 7, 0, 0) = {1.0, 0.0};
  CHECK_NOTHROW(fft_inverse_scalar(s));
  SpectralField v(g, 3);
  CHECK_THROWS_AS(fft_inverse_scalar(v), GridMismatch);
}

TEST_CASE("Parseval holds on random fields") {
  std::mt19937_64 rng(3);
  for (int n : {8, 16}) {
    TorusGrid g(n, 0.9);
    for (int trial = 0; trial < 5; ++trial) {
      ScalarField f = random_field(g, rng);
      const double phys = f.dot(f);
      const double spec = spectral::weighted_energy(forward(f), [](double) { return 1.0; }, false);
      CHECK(std::abs(phys - spec) / phys < 1e-12);
    }
  }
}

TEST_CASE("derivatives of resolved modes are exact") {
  TorusGrid g(16, 3.0);
  const double w = 2 * pi / g.length();
  auto c = ScalarField(g, 4.2);
  CHECK(grad(c).max_abs() < 1e-14);

  auto f = ScalarField::sample(g, [&](double x, double, double) { return std::sin(w * x); });
  auto exact = ScalarField::sample(g, [&](double x, double, double) { return w * std::cos(w * x); });
  CHECK((derivative(f, 0) - exact).max_abs() < 1e-12 * w);
  CHECK(derivative(f, 1).max_abs() < 1e-14);

  for (int m = 1; m < 8; ++m) {
    auto h = ScalarField::sample(g, [&](double, double, double z) { return std::cos(m * w * z); });
    auto dh = ScalarField::sample(g, [&](double, double, double z) { return -m * w * std::sin(m * w * z); });
    CHECK((derivative(h, 2) - dh).max_abs() < 1e-12 * m * w);
    auto lap = ScalarField::sample(g, [&](double, double, double z) {
      return -(m * w) * (m * w) * std::cos(m * w * z);
    });
    CHECK((laplacian(h) - lap).max_abs() < 1e-12 * (m * w) * (m * w));
  }
}

TEST_CASE("div of grad equals laplacian on band-limited fields") {
  std::mt19937_64 rng(5);
  TorusGrid g(16, 2.0);
  for (int trial = 0; trial < 3; ++trial) {
    ScalarField f = band_limited(g, 5, rng);
    CHECK(rel_l2(div(grad(f)), laplacian(f)) < 1e-12);
  }
}

TEST_CASE("dealias removes modes outside the two-thirds band") {
  TorusGrid g(12, 2 * pi);
  auto keep = ScalarField::sample(g, [](double x, double y, double) { return std::cos(3 * x) * std::sin(3 * y); });
  auto drop = ScalarField::sample(g, [](double x, double, double) { return std::cos(4 * x); });
  CHECK((dealias(keep) - keep).max_abs() < 1e-14);
  CHECK(dealias(drop).max_abs() < 1e-14);
}

TEST_CASE("hs_norm closed forms") {
  TorusGrid g(16, 2 * pi);
  CHECK(hs_norm(ScalarField(g), 0.5) == 0.0);
  const double a = 0.7;
  auto v = ScalarField::sample(g, [&](double x, double, double) { return a * std::cos(x); });
  const double expected = std::sqrt(std::pow(2 * pi, 3) * a * a / 2);
  for (double s : {-2.0, -0.5, 0.0, 0.5, 1.0, 3.0}) {
    CHECK(std::abs(hs_norm(v, s) - expected) / expected < 1e-12);
  }
  CHECK_THROWS_AS(hs_norm(v, 3.5), ParameterError);
}

TEST_CASE("hs_norm with s=0 is the L2 norm of the zero-mean part") {
  std::mt19937_64 rng(9);
  TorusGrid g(8, 1.3);
  for (int t = 0; t < 10; ++t) {
    ScalarField f = random_field(g, rng);
    ScalarField centred = f;
    const double m = f.mean();
    for (std::size_t i = 0; i < f.size(); ++i) centred[i] -= m;
    const double l2 = std::sqrt(centred.dot(centred));
    CHECK(std::abs(hs_norm(f, 0.0) - l2) / l2 < 1e-12);
  }
}

TEST_CASE("H^1/2 norm is invariant under u -> lambda u(lambda x)") {
  std::mt19937_64 rng(21);
  const double L = 2.4;
  TorusGrid g(16, L);
  VectorField u(band_limited(g, 4, rng), band_limited(g, 4, rng), band_limited(g, 4, rng));
  const double base = hs_norm(u, 0.5);
  for (int lambda : {2, 4}) {
    // u_lambda lives on the torus of period L/lambda; its samples at
    // x' = i*L/(lambda*n) are lambda*u(x_i).
    TorusGrid gl(16, L / lambda);
    VectorField ul(gl);
    for (int a = 0; a < 3; ++a)
      for (std::size_t i = 0; i < gl.cells(); ++i) ul[a][i] = lambda * u[a][i];
    CHECK(std::abs(hs_norm(ul, 0.5) - base) / base < 1e-12);
    // Any other s picks up a factor lambda^{2s-1}.
    CHECK(hs_norm(ul, 1.0) / hs_norm(u, 1.0) == doctest::Approx(std::sqrt(double(lambda))));
  }
}

TEST_CASE("weak Lorentz norm closed forms") {
  TorusGrid g(8, 2.0);  // cell measure 1/64, total 8
  CHECK(weak_lorentz_norm(ScalarField(g), 3.0) == 0.0);
  const double c = 1.5, q = 3.0;
  CHECK(weak_lorentz_norm(ScalarField(g, -c), q) ==
        doctest::Approx(c * std::pow(g.volume(), 1 / q)).epsilon(1e-14));

  ScalarField two(g, 1.0);
  for (int i = 0; i < 64; ++i) two[i] = -3.0;  // measure 1
  CHECK(weak_lorentz_norm(two, 2.0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(weak_lorentz_norm(two, 2.0) == weak_oracle(two, 2.0));
  CHECK_THROWS_AS(weak_lorentz_norm(two, 1.0), ParameterError);
}

TEST_CASE("weak Lorentz norm matches threshold enumeration and Chebyshev") {
  std::mt19937_64 rng(77);
  TorusGrid g(8, 1.0);
  std::uniform_real_distribution<double> qd(1.1, 8.0);
  std::uniform_int_distribution<int> levels(1, 6);
  for (int t = 0; t < 1000; ++t) {
    ScalarField f = random_field(g, rng);
    if (t % 3 == 0) {  // quantised values exercise ties
      const int k = levels(rng);
      for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::round(f[i] * k) / k;
    }
    const double q = qd(rng);
    const double weak = weak_lorentz_norm(f, q);
    CHECK(weak <= lp_norm(f, q) * (1 + 1e-14));
    if (t < 50) CHECK(weak == weak_oracle(f, q));
  }
}

TEST_CASE("lp_norm basics") {
  TorusGrid g(8, 2.0);
  ScalarField f(g, 2.0);
  CHECK(lp_norm(f, 2.0) == doctest::Approx(2.0 * std::sqrt(8.0)));
  CHECK(lp_norm(f, kInfinity) == 2.0);
  VectorField v(ScalarField(g, 3.0), ScalarField(g, 4.0), ScalarField(g));
  CHECK(lp_norm(v, 1.0) == doctest::Approx(5.0 * 8.0));
}
