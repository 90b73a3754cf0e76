#include "vacflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "vacflow/errors.hpp"
#include "vacflow/norms.hpp"
#include "vacflow/operators.hpp"
#include "vacflow/spectral.hpp"

namespace vacflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double hessian_norm(const VectorField& u) {
  double sum = 0.0;
  for (int a = 0; a < 3; ++a) {
    sum += spectral::weighted_energy(forward(u[a]), [](double k2) { return k2 * k2; }, true);
  }
  return std::sqrt(sum);
}

// (int |grad u|^6)^{1/6} with the pointwise Frobenius norm.
double grad_l6(const VectorField& u) {
  const TorusGrid& g = u.grid();
  std::vector<double> frob(g.cells(), 0.0);
  for (int a = 0; a < 3; ++a) {
    const Spectrum s = forward(u[a]);
    for (int b = 0; b < 3; ++b) {
      const ScalarField d = inverse(spectral::derivative(s, b));
      for (std::size_t i = 0; i < d.size(); ++i) frob[i] += d[i] * d[i];
    }
  }
  double sum = 0.0;
  for (double f : frob) sum += f * f * f;
  return std::pow(sum * g.cell_volume(), 1.0 / 6.0);
}

}  // namespace

void check_serrin_pair(double p, double q) {
  if (!(q > 3.0)) throw ParameterError("kim pair: q must exceed 3");
  if (!(p >= 2.0)) throw ParameterError("kim pair: p must be at least 2");
  const double line = 2.0 / p + (std::isinf(q) ? 0.0 : 3.0 / q);
  if (std::abs(line - 1.0) > 1e-12) {
    throw ParameterError("kim pair (" + std::to_string(p) + ", " + std::to_string(q) +
                         ") is off the line 2/p + 3/q = 1");
  }
}

void DiagnosticsConfig::validate() const {
  for (double q : lorentz_q)
    if (!(q > 1.0)) throw ParameterError("diagnostics: Lorentz exponents must exceed 1");
  for (const auto& k : kim_pairs) {
    check_serrin_pair(k.p, k.q);
    if (std::find(lorentz_q.begin(), lorentz_q.end(), k.q) == lorentz_q.end()) {
      throw ParameterError("diagnostics: kim pair q must be among the Lorentz exponents");
    }
  }
  for (double b : bootstrap_thresholds)
    if (!(b > 0.0)) throw ParameterError("diagnostics: bootstrap thresholds must be positive");
}

void RunningIntegrals::advance(const SimState& before, double dt, const DiagnosticsConfig& cfg) {
  max_grad = std::max(max_grad, grad_norm(before.u));
  kim.resize(cfg.kim_pairs.size(), 0.0);
  for (std::size_t j = 0; j < cfg.kim_pairs.size(); ++j) {
    const auto& k = cfg.kim_pairs[j];
    kim[j] += std::pow(weak_lorentz_norm(before.u, k.q), k.p) * dt;
  }
}

DiagnosticsRecord record(const SimState& s, const DiagnosticsConfig& cfg, const RunningIntegrals& integrals,
                         double dt) {
  DiagnosticsRecord r;
  r.step = s.step;
  r.t = s.t;
  r.dt = dt;
  r.energy = kinetic_energy(s.rho, s.u);
  r.grad_norm = grad_norm(s.u);
  r.h12_norm = hs_norm(s.u, 0.5);
  r.A = std::pow(s.grad4_integral, 0.25);
  r.dissipation = s.dissipation_integral;
  r.rho_min = s.rho.min();
  r.rho_max = s.rho.max();
  r.mass = s.rho.integral();
  r.momentum = momentum(s.rho, s.u);
  r.gn_ratio = r.grad_norm > 0.0 ? gn_ratio(s.u) : 0.0;
  r.t_grad2 = s.t * r.grad_norm * r.grad_norm;
  for (double q : cfg.lorentz_q) r.lorentz.emplace_back(q, weak_lorentz_norm(s.u, q));
  r.kim = integrals.kim;
  r.kim.resize(cfg.kim_pairs.size(), 0.0);
  const double lhs = std::pow(s.grad4_integral, 0.25);
  const double rhs = std::sqrt(integrals.max_grad) * std::pow(s.dissipation_integral, 0.25);
  r.interp_ratio = lhs > 0.0 ? lhs / rhs : 0.0;
  const ScalarField d = div(s.u);
  r.divergence = r.grad_norm > 0.0 ? std::sqrt(d.dot(d)) / r.grad_norm : 0.0;
  return r;
}

double interp_inequality_check(const std::vector<double>& a, const std::vector<double>& ds) {
  if (a.empty() || a.size() != ds.size()) throw ParameterError("interp_inequality_check: bad series");
  double s4 = 0.0, s2 = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] >= 0.0) || !(ds[i] >= 0.0)) throw ParameterError("interp_inequality_check: negative entry");
    s4 += std::pow(a[i], 4) * ds[i];
    s2 += a[i] * a[i] * ds[i];
    mx = std::max(mx, a[i]);
  }
  const double lhs = std::pow(s4, 0.25);
  return lhs > 0.0 ? lhs / (std::sqrt(mx) * std::pow(s2, 0.25)) : 0.0;
}

double interp_inequality_check(const std::vector<double>& a, double ds) {
  return interp_inequality_check(a, std::vector<double>(a.size(), ds));
}

double gn_ratio(const VectorField& u) {
  const double h = hessian_norm(u);
  if (h == 0.0) throw ParameterError("gn_ratio: undefined for a velocity without gradient");
  return grad_l6(u) / h;
}

double kim_integral(const std::vector<DiagnosticsRecord>& records, double p, double q) {
  check_serrin_pair(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    const auto& l = records[i].lorentz;
    auto it = std::find_if(l.begin(), l.end(), [&](const auto& e) { return e.first == q; });
    if (it == l.end()) throw ParameterError("kim_integral: q not among the recorded exponents");
    const double h = records[i + 1].t - records[i].t;
    if (h < 0.0) throw ParameterError("kim_integral: records are not time-ordered");
    sum += std::pow(it->second, p) * h;
  }
  return sum;
}

std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return {kNaN, kNaN};
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) return {kNaN, kNaN};
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

DecayFit decay_fit(const std::vector<DiagnosticsRecord>& records) {
  long positive_t = 0;
  for (const auto& r : records) positive_t += r.t > 0.0;
  if (positive_t < 20) throw ParameterError("decay_fit: needs at least 20 records with t > 0");
  DecayFit fit;
  for (const auto& r : records) fit.M_hat = std::max(fit.M_hat, r.t * r.grad_norm * r.grad_norm);

  // Positive-energy prefix.
  std::size_t end = 0;
  while (end < records.size() && records[end].energy > 0.0) ++end;
  if (end < 2) {
    fit.expo_rate = kNaN;
    return fit;
  }
  const double t_half = 0.5 * (records.front().t + records[end - 1].t);
  std::vector<double> t, logE;
  for (std::size_t i = 0; i < end; ++i) {
    if (records[i].t >= t_half) {
      t.push_back(records[i].t);
      logE.push_back(std::log(records[i].energy));
    }
  }
  fit.fitted_points = static_cast<int>(t.size());
  fit.expo_rate = -fit_line(t, logE).first;
  return fit;
}

double quadrature_A(const std::vector<double>& t, const std::vector<double>& grad) {
  if (t.size() != grad.size()) throw ParameterError("quadrature_A: size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    sum += 0.5 * (std::pow(grad[i], 4) + std::pow(grad[i + 1], 4)) * (t[i + 1] - t[i]);
  }
  return std::pow(sum, 0.25);
}

SweepResult epsilon_sweep(std::vector<double> epsilons, const std::function<SweepEntry(double)>& run) {
  std::sort(epsilons.begin(), epsilons.end(), [](double a, double b) {
    if (std::isnan(a)) return false;
    if (std::isnan(b)) return true;
    return a < b;
  });
  SweepResult out;
  std::vector<double> x, y;
  for (double eps : epsilons) {
    SweepEntry e;
    try {
      if (!(eps >= 0.0) || !std::isfinite(eps)) throw ParameterError("epsilon must be finite and non-negative");
      e = run(eps);
      e.completed = true;
    } catch (const std::exception& ex) {
      e = SweepEntry{};
      e.completed = false;
      e.error = ex.what();
    }
    e.epsilon = eps;
    if (e.completed && eps > 0.0 && e.sup_A > 0.0) {
      x.push_back(std::log(eps));
      y.push_back(std::log(e.sup_A));
    }
    out.entries.push_back(std::move(e));
  }
  out.fitted = static_cast<int>(x.size());
  std::tie(out.slope, out.intercept) = fit_line(x, y);
  return out;
}

}  // namespace vacflow
