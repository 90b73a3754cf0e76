#pragma once

#include <cstddef>
#include <numbers>

namespace vacflow {

/// Periodic cube [0, L)^3 sampled at n points per axis.
///
/// Node i sits at x = i*dx. Mode index i maps to the signed wavenumber
/// (2*pi/L)*m with m in {-n/2+1, ..., n/2}; the Nyquist index n/2 is kept
/// positive.
class TorusGrid {
 public:
  TorusGrid(int n, double length);

  int n() const { return n_; }
  double length() const { return length_; }
  double dx() const { return length_ / n_; }
  double volume() const { return length_ * length_ * length_; }
  double cell_volume() const { double h = dx(); return h * h * h; }
  std::size_t cells() const {
    return static_cast<std::size_t>(n_) * n_ * n_;
  }
  /// Number of complex coefficients in the half spectrum (x axis halved).
  std::size_t half_modes() const {
    return static_cast<std::size_t>(n_) * n_ * (n_ / 2 + 1);
  }

  std::size_t index(int ix, int iy, int iz) const {
    return (static_cast<std::size_t>(iz) * n_ + iy) * n_ + ix;
  }
  int wrap(int i) const { return ((i % n_) + n_) % n_; }

  double coord(int i) const { return i * dx(); }

  /// Signed mode number of FFT index i.
  int mode(int i) const { return i <= n_ / 2 ? i : i - n_; }
  double wavenumber(int i) const {
    return 2.0 * std::numbers::pi / length_ * mode(i);
  }
  /// Wavenumber used by first-derivative multipliers: zero at Nyquist so
  /// odd derivatives of real fields stay real.
  double derivative_wavenumber(int i) const {
    return i == n_ / 2 ? 0.0 : wavenumber(i);
  }
  /// 2/3-rule retention test for a single axis.
  bool retained(int i) const {
    int m = mode(i);
    return 3 * (m < 0 ? -m : m) < n_;
  }

  bool operator==(const TorusGrid& o) const {
    return n_ == o.n_ && length_ == o.length_;
  }

 private:
  int n_;
  double length_;
};

}  // namespace vacflow
