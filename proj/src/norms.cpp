#include "vacflow/norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "vacflow/errors.hpp"
#include "vacflow/operators.hpp"

namespace vacflow {

namespace {

void check_s(double s) {
  if (!(s >= -2.0 && s <= 3.0)) throw ParameterError("hs_norm: s must lie in [-2, 3]");
}

double hs_squared(const ScalarField& v, double s) {
  return spectral::weighted_energy(
      forward(v), [s](double k2) { return s == 0.0 ? 1.0 : std::pow(k2, s); }, true);
}

double lp_of(std::span<const double> mags, double cell, double p) {
  if (!(p >= 1.0)) throw ParameterError("lp_norm: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double a : mags) m = std::max(m, std::abs(a));
    return m;
  }
  double sum = 0.0;
  for (double a : mags) sum += std::pow(std::abs(a), p);
  return std::pow(sum * cell, 1.0 / p);
}

}  // namespace

double hs_norm(const ScalarField& v, double s) {
  check_s(s);
  return std::sqrt(hs_squared(v, s));
}

double hs_norm(const VectorField& v, double s) {
  check_s(s);
  return std::sqrt(hs_squared(v[0], s) + hs_squared(v[1], s) + hs_squared(v[2], s));
}

double lp_norm(const ScalarField& f, double p) {
  return lp_of(f.values(), f.grid().cell_volume(), p);
}

double lp_norm(const VectorField& f, double p) {
  const ScalarField m = f.magnitude();
  return lp_of(m.values(), f.grid().cell_volume(), p);
}

double weak_lorentz_norm(std::vector<double> magnitudes, double cell_measure, double q) {
  if (!(q > 1.0)) throw ParameterError("weak_lorentz_norm: q must exceed 1");
  for (double& a : magnitudes) a = std::abs(a);
  std::sort(magnitudes.begin(), magnitudes.end(), std::greater<>());
  const bool infinite_q = std::isinf(q);
  double best = 0.0;
  std::size_t i = 0;
  while (i < magnitudes.size()) {
    const double level = magnitudes[i];
    if (level == 0.0) break;
    std::size_t j = i;
    while (j < magnitudes.size() && magnitudes[j] == level) ++j;
    const double measure = cell_measure * static_cast<double>(j);
    const double value = infinite_q ? level : level * std::pow(measure, 1.0 / q);
    best = std::max(best, value);
    i = j;
  }
  return best;
}

double weak_lorentz_norm(const ScalarField& f, double q) {
  return weak_lorentz_norm(std::vector<double>(f.values().begin(), f.values().end()),
                           f.grid().cell_volume(), q);
}

double weak_lorentz_norm(const VectorField& f, double q) {
  const ScalarField m = f.magnitude();
  return weak_lorentz_norm(std::vector<double>(m.values().begin(), m.values().end()),
                           f.grid().cell_volume(), q);
}

}  // namespace vacflow
