#pragma once

#include <limits>
#include <vector>

#include "vacflow/field.hpp"

namespace vacflow {

/// Homogeneous Sobolev norm on the torus,
///   ||v||^2 = |Omega| * sum_{k != 0} |k|^{2s} |v_k|^2,
/// with v_k the normalised DFT coefficients. s = 0 gives the L2 norm of the
/// zero-mean part. Requires s in [-2, 3].
double hs_norm(const ScalarField& v, double s);
double hs_norm(const VectorField& v, double s);

/// (sum |f|^p dx^3)^{1/p}; p = infinity gives the max norm. Vector fields
/// use the pointwise Euclidean magnitude.
double lp_norm(const ScalarField& f, double p);
double lp_norm(const VectorField& f, double p);

/// Weak Lebesgue norm sup_t t * |{|f| > t}|^{1/q}. The supremum over levels
/// is attained just below an attained value a, where the measure is
/// dx^3 * #{|f| >= a}. Requires q > 1.
double weak_lorentz_norm(const ScalarField& f, double q);
double weak_lorentz_norm(const VectorField& f, double q);

/// Same as above on raw magnitudes with a given cell measure.
double weak_lorentz_norm(std::vector<double> magnitudes, double cell_measure, double q);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace vacflow
