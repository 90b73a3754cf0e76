#include "vacflow/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vacflow/errors.hpp"

namespace vacflow {

TorusGrid::TorusGrid(int n, double length) : n_(n), length_(length) {
  if (n < 8 || n % 2 != 0) {
    throw ParameterError("grid: n must be even and >= 8, got " + std::to_string(n));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw ParameterError("grid: period L must be positive and finite");
  }
}

void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* where) {
  if (!(a == b)) {
    throw GridMismatch(std::string(where) + ": fields live on different grids");
  }
}

ScalarField::ScalarField(const TorusGrid& grid, double value)
    : grid_(grid), values_(grid.cells(), value) {}

ScalarField::ScalarField(const TorusGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.cells()) {
    throw GridMismatch("ScalarField: value count does not match grid");
  }
}

ScalarField ScalarField::sample(const TorusGrid& grid,
                                const std::function<double(double, double, double)>& f) {
  ScalarField out(grid);
  const int n = grid.n();
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix)
        out.at(ix, iy, iz) = f(grid.coord(ix), grid.coord(iy), grid.coord(iz));
  return out;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_, "operator+=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_, "operator-=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double a) {
  for (double& v : values_) v *= a;
  return *this;
}

ScalarField& ScalarField::axpy(double a, const ScalarField& x) {
  require_same_grid(grid_, x.grid_, "axpy");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * x.values_[i];
  return *this;
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField::integral() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * grid_.cell_volume();
}

double ScalarField::mean() const { return integral() / grid_.volume(); }

double ScalarField::dot(const ScalarField& o) const {
  require_same_grid(grid_, o.grid_, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * o.values_[i];
  return s * grid_.cell_volume();
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "hadamard");
  ScalarField out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

VectorField::VectorField(const TorusGrid& grid)
    : c_{ScalarField(grid), ScalarField(grid), ScalarField(grid)} {}

VectorField::VectorField(ScalarField x, ScalarField y, ScalarField z)
    : c_{std::move(x), std::move(y), std::move(z)} {
  require_same_grid(c_[0].grid(), c_[1].grid(), "VectorField");
  require_same_grid(c_[0].grid(), c_[2].grid(), "VectorField");
}

VectorField VectorField::sample(
    const TorusGrid& grid,
    const std::function<std::array<double, 3>(double, double, double)>& f) {
  VectorField out(grid);
  const int n = grid.n();
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        auto v = f(grid.coord(ix), grid.coord(iy), grid.coord(iz));
        std::size_t i = grid.index(ix, iy, iz);
        for (int a = 0; a < 3; ++a) out.c_[a][i] = v[a];
      }
  return out;
}

VectorField& VectorField::operator+=(const VectorField& o) {
  for (int a = 0; a < 3; ++a) c_[a] += o.c_[a];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
  for (int a = 0; a < 3; ++a) c_[a] -= o.c_[a];
  return *this;
}

VectorField& VectorField::operator*=(double s) {
  for (auto& c : c_) c *= s;
  return *this;
}

VectorField& VectorField::axpy(double s, const VectorField& x) {
  for (int a = 0; a < 3; ++a) c_[a].axpy(s, x.c_[a]);
  return *this;
}

ScalarField VectorField::magnitude() const {
  ScalarField out(grid());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::sqrt(c_[0][i] * c_[0][i] + c_[1][i] * c_[1][i] + c_[2][i] * c_[2][i]);
  }
  return out;
}

double VectorField::max_abs() const {
  return std::max({c_[0].max_abs(), c_[1].max_abs(), c_[2].max_abs()});
}

double VectorField::dot(const VectorField& o) const {
  return c_[0].dot(o.c_[0]) + c_[1].dot(o.c_[1]) + c_[2].dot(o.c_[2]);
}

bool VectorField::all_finite() const {
  return c_[0].all_finite() && c_[1].all_finite() && c_[2].all_finite();
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }

VectorField scale(const ScalarField& s, const VectorField& v) {
  return VectorField(hadamard(s, v[0]), hadamard(s, v[1]), hadamard(s, v[2]));
}

}  // namespace vacflow
