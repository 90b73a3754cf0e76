#pragma once

// Preconditioned conjugate gradients on spectral vectors. Vectors are lists
// of half spectra; the inner product is the grid L2 product via Parseval.

#include <cmath>
#include <string>
#include <vector>

#include "vacflow/errors.hpp"
#include "vacflow/spectral.hpp"

namespace vacflow::detail {

using SpecVec = std::vector<Spectrum>;

inline double inner(const SpecVec& a, const SpecVec& b) {
  double sum = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const Spectrum& x = a[c];
    const Spectrum& y = b[c];
    const int h = x.nxh();
    const int n = x.grid().n();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const int ix = static_cast<int>(i % h);
      const double w = (ix == 0 || ix == n / 2) ? 1.0 : 2.0;
      sum += w * (x[i].real() * y[i].real() + x[i].imag() * y[i].imag());
    }
  }
  return sum * a[0].grid().volume();
}

inline void axpy(double alpha, const SpecVec& x, SpecVec& y) {
  for (std::size_t c = 0; c < x.size(); ++c)
    for (std::size_t i = 0; i < x[c].size(); ++i) y[c][i] += alpha * x[c][i];
}

// y = x + beta * y
inline void xpby(const SpecVec& x, double beta, SpecVec& y) {
  for (std::size_t c = 0; c < x.size(); ++c)
    for (std::size_t i = 0; i < x[c].size(); ++i) y[c][i] = x[c][i] + beta * y[c][i];
}

inline bool is_zero(const SpecVec& v) {
  for (const auto& s : v)
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i] != Complex(0.0)) return false;
  return true;
}

struct PcgOutcome {
  int iterations = 0;
  std::vector<double> residuals;  // relative residual per iteration
};

/// Solves A x = b for SPD A starting from x. Converged when
/// ||b - A x|| <= rtol * ||b||. Throws SolverError with the residual history.
template <class Apply, class Precondition>
PcgOutcome pcg(Apply&& apply, Precondition&& precondition, const SpecVec& b, SpecVec& x,
               double rtol, int max_iterations, const char* name) {
  PcgOutcome out;
  const double bnorm = std::sqrt(inner(b, b));
  if (bnorm == 0.0) {
    for (auto& s : x) s *= 0.0;
    return out;
  }
  SpecVec r = b;
  if (!is_zero(x)) axpy(-1.0, apply(x), r);
  double rnorm = std::sqrt(inner(r, r));
  out.residuals.push_back(rnorm / bnorm);
  if (rnorm <= rtol * bnorm) return out;
  SpecVec z = precondition(r);
  SpecVec p = z;
  double rz = inner(r, z);
  for (int k = 1; k <= max_iterations; ++k) {
    const SpecVec Ap = apply(p);
    const double pAp = inner(p, Ap);
    if (!(pAp > 0.0)) break;
    const double alpha = rz / pAp;
    axpy(alpha, p, x);
    axpy(-alpha, Ap, r);
    rnorm = std::sqrt(inner(r, r));
    out.iterations = k;
    out.residuals.push_back(rnorm / bnorm);
    if (rnorm <= rtol * bnorm) return out;
    z = precondition(r);
    const double rz_next = inner(r, z);
    xpby(z, rz_next / rz, p);
    rz = rz_next;
  }
  throw SolverError(std::string(name) + ": no convergence after " +
                        std::to_string(out.iterations) + " iterations (relative residual " +
                        std::to_string(out.residuals.back()) + ")",
                    out.residuals);
}

}  // namespace vacflow::detail
