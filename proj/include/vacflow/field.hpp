#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "vacflow/grid.hpp"

namespace vacflow {

/// Real nodal samples on a TorusGrid, x index fastest.
class ScalarField {
 public:
  explicit ScalarField(const TorusGrid& grid, double value = 0.0);
  ScalarField(const TorusGrid& grid, std::vector<double> values);

  /// Samples f(x, y, z) at the grid nodes.
  static ScalarField sample(const TorusGrid& grid,
                            const std::function<double(double, double, double)>& f);

  const TorusGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& at(int ix, int iy, int iz) { return values_[grid_.index(ix, iy, iz)]; }
  double at(int ix, int iy, int iz) const { return values_[grid_.index(ix, iy, iz)]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double a);
  /// this += a * x
  ScalarField& axpy(double a, const ScalarField& x);

  double min() const;
  double max() const;
  double max_abs() const;
  /// Sum of values times the cell volume.
  double integral() const;
  double mean() const;
  /// Grid inner product sum(f*g)*dx^3.
  double dot(const ScalarField& o) const;
  bool all_finite() const;

  bool operator==(const ScalarField& o) const {
    return grid_ == o.grid_ && values_ == o.values_;
  }

 private:
  TorusGrid grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
/// Pointwise product.
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

/// Three collocated components on one grid.
class VectorField {
 public:
  explicit VectorField(const TorusGrid& grid);
  VectorField(ScalarField x, ScalarField y, ScalarField z);

  static VectorField sample(const TorusGrid& grid,
                            const std::function<std::array<double, 3>(double, double, double)>& f);

  const TorusGrid& grid() const { return c_[0].grid(); }
  ScalarField& operator[](int a) { return c_[a]; }
  const ScalarField& operator[](int a) const { return c_[a]; }

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(double a);
  VectorField& axpy(double a, const VectorField& x);

  /// Pointwise Euclidean magnitude.
  ScalarField magnitude() const;
  /// Largest |u_a| over all components and nodes.
  double max_abs() const;
  double dot(const VectorField& o) const;
  bool all_finite() const;

  bool operator==(const VectorField& o) const {
    return c_[0] == o.c_[0] && c_[1] == o.c_[1] && c_[2] == o.c_[2];
  }

 private:
  std::array<ScalarField, 3> c_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);
/// Scalar times vector, pointwise.
VectorField scale(const ScalarField& s, const VectorField& v);

void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* where);

}  // namespace vacflow
