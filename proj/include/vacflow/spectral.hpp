#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <new>
#include <vector>

#include "vacflow/field.hpp"

namespace vacflow {

using Complex = std::complex<double>;

/// Allocator returning FFTW-aligned storage.
template <class T>
struct FftwAllocator {
  using value_type = T;
  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) {}
  T* allocate(std::size_t n);
  void deallocate(T* p, std::size_t) noexcept;
  template <class U>
  bool operator==(const FftwAllocator<U>&) const { return true; }
};

void* fftw_aligned_alloc(std::size_t bytes);
void fftw_aligned_free(void* p) noexcept;

template <class T>
T* FftwAllocator<T>::allocate(std::size_t n) {
  return static_cast<T*>(fftw_aligned_alloc(n * sizeof(T)));
}
template <class T>
void FftwAllocator<T>::deallocate(T* p, std::size_t) noexcept {
  fftw_aligned_free(p);
}

using ComplexBuffer = std::vector<Complex, FftwAllocator<Complex>>;

/// Half spectrum of a real field: x modes 0..n/2 only, normalised so that
/// f(x) = sum_k c_k exp(i k.x). Index = (iz*n + iy)*(n/2+1) + ix.
class Spectrum {
 public:
  explicit Spectrum(const TorusGrid& grid);

  const TorusGrid& grid() const { return grid_; }
  std::size_t size() const { return coeffs_.size(); }
  int nxh() const { return grid_.n() / 2 + 1; }

  Complex& operator[](std::size_t i) { return coeffs_[i]; }
  const Complex& operator[](std::size_t i) const { return coeffs_[i]; }
  Complex* data() { return coeffs_.data(); }
  const Complex* data() const { return coeffs_.data(); }

  /// Calls f(index, ix, iy, iz) for every stored mode, x fastest.
  template <class F>
  void for_each_mode(F&& f) const {
    const int n = grid_.n(), h = nxh();
    std::size_t idx = 0;
    for (int iz = 0; iz < n; ++iz)
      for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < h; ++ix, ++idx) f(idx, ix, iy, iz);
  }

  /// Multiplicity of a stored x index in the full spectrum (1 or 2).
  double weight(int ix) const { return (ix == 0 || ix == grid_.n() / 2) ? 1.0 : 2.0; }

  /// Zeroes every mode outside the 2/3-rule band.
  void dealias();

  Spectrum& operator+=(const Spectrum& o);
  Spectrum& operator*=(double a);

 private:
  TorusGrid grid_;
  ComplexBuffer coeffs_;
};

/// Normalised forward transform of a real field.
Spectrum forward(const ScalarField& f);
std::array<Spectrum, 3> forward(const VectorField& v);
/// Inverse transform; the spectrum is consumed.
ScalarField inverse(Spectrum s);
VectorField inverse(std::array<Spectrum, 3> s);

/// Full complex spectrum of one or three real components, index
/// (iz*n + iy)*n + ix per component, same normalisation as Spectrum.
class SpectralField {
 public:
  SpectralField(const TorusGrid& grid, int components);

  const TorusGrid& grid() const { return grid_; }
  int components() const { return components_; }
  Complex& coeff(int c, int ix, int iy, int iz);
  const Complex& coeff(int c, int ix, int iy, int iz) const;
  std::vector<Complex>& component(int c) { return coeffs_[c]; }
  const std::vector<Complex>& component(int c) const { return coeffs_[c]; }

  /// max |c(k) - conj(c(-k))| relative to max |c|; 0 for the zero spectrum.
  double hermitian_defect() const;

 private:
  TorusGrid grid_;
  int components_;
  std::vector<std::vector<Complex>> coeffs_;
};

SpectralField fft_forward(const ScalarField& f);
SpectralField fft_forward(const VectorField& v);
/// Throws SymmetryViolation when the relative Hermitian defect exceeds 1e-12.
ScalarField fft_inverse_scalar(const SpectralField& s);
VectorField fft_inverse_vector(const SpectralField& s);

inline constexpr double kHermitianTolerance = 1e-12;

}  // namespace vacflow
