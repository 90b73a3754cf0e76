#include "vacflow/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <string>

#include "vacflow/errors.hpp"

namespace vacflow {

void* fftw_aligned_alloc(std::size_t bytes) {
  void* p = fftw_malloc(bytes == 0 ? 1 : bytes);
  if (p == nullptr) throw std::bad_alloc();
  return p;
}

void fftw_aligned_free(void* p) noexcept { fftw_free(p); }

namespace {

// One r2c/c2r plan pair per grid size. Plans are made with FFTW_ESTIMATE so
// repeated runs pick identical codelets; execution is single threaded.
struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  int real_alignment = 0;
  int complex_alignment = 0;
};

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  const PlanPair& get(int n) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    const std::size_t cells = static_cast<std::size_t>(n) * n * n;
    const std::size_t half = static_cast<std::size_t>(n) * n * (n / 2 + 1);
    double* real = fftw_alloc_real(cells);
    fftw_complex* cplx = fftw_alloc_complex(half);
    PlanPair p;
    p.r2c = fftw_plan_dft_r2c_3d(n, n, n, real, cplx, FFTW_ESTIMATE);
    p.c2r = fftw_plan_dft_c2r_3d(n, n, n, cplx, real, FFTW_ESTIMATE);
    p.real_alignment = fftw_alignment_of(real);
    p.complex_alignment = fftw_alignment_of(reinterpret_cast<double*>(cplx));
    fftw_free(real);
    fftw_free(cplx);
    return plans_.emplace(n, p).first->second;
  }

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.r2c);
      fftw_destroy_plan(p.c2r);
    }
  }
  std::mutex mutex_;
  std::map<int, PlanPair> plans_;
};

}  // namespace

Spectrum::Spectrum(const TorusGrid& grid) : grid_(grid), coeffs_(grid.half_modes()) {}

void Spectrum::dealias() {
  for_each_mode([&](std::size_t i, int ix, int iy, int iz) {
    if (!grid_.retained(ix) || !grid_.retained(iy) || !grid_.retained(iz)) coeffs_[i] = 0.0;
  });
}

Spectrum& Spectrum::operator+=(const Spectrum& o) {
  require_same_grid(grid_, o.grid_, "Spectrum::operator+=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

Spectrum& Spectrum::operator*=(double a) {
  for (auto& c : coeffs_) c *= a;
  return *this;
}

Spectrum forward(const ScalarField& f) {
  const TorusGrid& g = f.grid();
  const PlanPair& plan = PlanCache::instance().get(g.n());
  Spectrum out(g);
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  const double* src = f.values().data();
  if (fftw_alignment_of(const_cast<double*>(src)) == plan.real_alignment) {
    fftw_execute_dft_r2c(plan.r2c, const_cast<double*>(src), dst);
  } else {
    std::vector<double, FftwAllocator<double>> tmp(src, src + f.size());
    fftw_execute_dft_r2c(plan.r2c, tmp.data(), dst);
  }
  const double norm = 1.0 / static_cast<double>(g.cells());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= norm;
  return out;
}

std::array<Spectrum, 3> forward(const VectorField& v) {
  return {forward(v[0]), forward(v[1]), forward(v[2])};
}

ScalarField inverse(Spectrum s) {
  const TorusGrid g = s.grid();
  const PlanPair& plan = PlanCache::instance().get(g.n());
  ScalarField out(g);
  auto* src = reinterpret_cast<fftw_complex*>(s.data());
  double* dst = out.values().data();
  if (fftw_alignment_of(dst) == plan.real_alignment) {
    fftw_execute_dft_c2r(plan.c2r, src, dst);
  } else {
    std::vector<double, FftwAllocator<double>> tmp(out.size());
    fftw_execute_dft_c2r(plan.c2r, src, tmp.data());
    std::copy(tmp.begin(), tmp.end(), dst);
  }
  return out;
}

VectorField inverse(std::array<Spectrum, 3> s) {
  return VectorField(inverse(std::move(s[0])), inverse(std::move(s[1])),
                     inverse(std::move(s[2])));
}

SpectralField::SpectralField(const TorusGrid& grid, int components)
    : grid_(grid), components_(components) {
  if (components != 1 && components != 3) {
    throw ParameterError("SpectralField: component count must be 1 or 3");
  }
  coeffs_.assign(components, std::vector<Complex>(grid.cells()));
}

Complex& SpectralField::coeff(int c, int ix, int iy, int iz) {
  return coeffs_[c][grid_.index(ix, iy, iz)];
}

const Complex& SpectralField::coeff(int c, int ix, int iy, int iz) const {
  return coeffs_[c][grid_.index(ix, iy, iz)];
}

double SpectralField::hermitian_defect() const {
  const int n = grid_.n();
  double scale = 0.0, defect = 0.0;
  for (int c = 0; c < components_; ++c) {
    for (int iz = 0; iz < n; ++iz)
      for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
          const Complex a = coeff(c, ix, iy, iz);
          const Complex b = coeff(c, (n - ix) % n, (n - iy) % n, (n - iz) % n);
          scale = std::max(scale, std::abs(a));
          defect = std::max(defect, std::abs(a - std::conj(b)));
        }
  }
  return scale == 0.0 ? 0.0 : defect / scale;
}

namespace {

void expand(const Spectrum& half, std::vector<Complex>& full) {
  const TorusGrid& g = half.grid();
  const int n = g.n(), h = half.nxh();
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        if (ix < h) {
          full[g.index(ix, iy, iz)] = half[(static_cast<std::size_t>(iz) * n + iy) * h + ix];
        } else {
          const int jx = n - ix, jy = (n - iy) % n, jz = (n - iz) % n;
          full[g.index(ix, iy, iz)] =
              std::conj(half[(static_cast<std::size_t>(jz) * n + jy) * h + jx]);
        }
      }
}

Spectrum contract(const TorusGrid& g, const std::vector<Complex>& full) {
  Spectrum half(g);
  half.for_each_mode([&](std::size_t i, int ix, int iy, int iz) {
    half[i] = full[g.index(ix, iy, iz)];
  });
  return half;
}

void check_hermitian(const SpectralField& s) {
  const double d = s.hermitian_defect();
  if (d > kHermitianTolerance) {
    throw SymmetryViolation("fft_inverse: spectrum is not Hermitian (relative defect " +
                                std::to_string(d) + ")",
                            d);
  }
}

}  // namespace

SpectralField fft_forward(const ScalarField& f) {
  SpectralField out(f.grid(), 1);
  expand(forward(f), out.component(0));
  return out;
}

SpectralField fft_forward(const VectorField& v) {
  SpectralField out(v.grid(), 3);
  for (int a = 0; a < 3; ++a) expand(forward(v[a]), out.component(a));
  return out;
}

ScalarField fft_inverse_scalar(const SpectralField& s) {
  if (s.components() != 1) throw GridMismatch("fft_inverse_scalar: expected one component");
  check_hermitian(s);
  return inverse(contract(s.grid(), s.component(0)));
}

VectorField fft_inverse_vector(const SpectralField& s) {
  if (s.components() != 3) throw GridMismatch("fft_inverse_vector: expected three components");
  check_hermitian(s);
  return VectorField(inverse(contract(s.grid(), s.component(0))),
                     inverse(contract(s.grid(), s.component(1))),
                     inverse(contract(s.grid(), s.component(2))));
}

}  // namespace vacflow
