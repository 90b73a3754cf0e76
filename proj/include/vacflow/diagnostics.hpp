#pragma once

#include <array>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "vacflow/momentum.hpp"

namespace vacflow {

struct KimPair {
  double p;
  double q;
};

struct DiagnosticsConfig {
  /// Exponents q of the weak Lorentz norms recorded per snapshot.
  std::vector<double> lorentz_q{4.0, 6.0, std::numeric_limits<double>::infinity()};
  /// (p, q) pairs on the line 2/p + 3/q = 1 for the time integrals.
  std::vector<KimPair> kim_pairs{{8.0, 4.0}, {4.0, 6.0}, {2.0, std::numeric_limits<double>::infinity()}};
  /// Monitor lines for A(t); crossing one raises an event, never an abort.
  std::vector<double> bootstrap_thresholds{2.0, 1.0};

  void validate() const;
};

/// Throws ParameterError unless 2/p + 3/q = 1 and 3 < q <= infinity.
void check_serrin_pair(double p, double q);

/// Left-Riemann integrals that are not part of SimState: the running max of
/// ||grad u|| over the quadrature nodes and the weak-norm time integrals.
struct RunningIntegrals {
  double max_grad = 0.0;
  std::vector<double> kim;

  explicit RunningIntegrals(const DiagnosticsConfig& cfg) : kim(cfg.kim_pairs.size(), 0.0) {}
  RunningIntegrals() = default;

  /// Adds the contribution of the step [t, t + dt] taken from `before`.
  void advance(const SimState& before, double dt, const DiagnosticsConfig& cfg);
};

struct DiagnosticsRecord {
  long step = 0;
  double t = 0.0;
  double dt = 0.0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double h12_norm = 0.0;
  double A = 0.0;
  double dissipation = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
  double mass = 0.0;
  std::array<double, 3> momentum{0.0, 0.0, 0.0};
  /// 0 for a zero velocity, where the ratio is undefined.
  double gn_ratio = 0.0;
  double t_grad2 = 0.0;
  std::vector<std::pair<double, double>> lorentz;  // (q, ||u||_{L^{q,inf}})
  std::vector<double> kim;                         // aligned with cfg.kim_pairs
  /// (sum a^4 ds)^{1/4} / (max a^{1/2} (sum a^2 ds)^{1/4}) from the accumulators.
  double interp_ratio = 0.0;
  /// ||div u|| / ||grad u||.
  double divergence = 0.0;
};

DiagnosticsRecord record(const SimState& s, const DiagnosticsConfig& cfg, const RunningIntegrals& integrals,
                         double dt = 0.0);

/// LHS/RHS of (sum a_i^4 ds_i)^{1/4} <= (max a_i)^{1/2} (sum a_i^2 ds_i)^{1/4};
/// 0 when the left side vanishes.
double interp_inequality_check(const std::vector<double>& a, const std::vector<double>& ds);
double interp_inequality_check(const std::vector<double>& a, double ds);

/// ||grad u||_{L6} / ||grad^2 u||_{L2}; ParameterError for u = 0.
double gn_ratio(const VectorField& u);

/// Left-Riemann integral of ||u||_{L^{q,inf}}^p over the record times. q must
/// be among the recorded Lorentz exponents.
double kim_integral(const std::vector<DiagnosticsRecord>& records, double p, double q);

struct DecayFit {
  /// sup t ||grad u||^2 over the records.
  double M_hat = 0.0;
  /// -d log E / dt, least squares over the second half of the run.
  double expo_rate = 0.0;
  /// Records used by the fit.
  int fitted_points = 0;
};

DecayFit decay_fit(const std::vector<DiagnosticsRecord>& records);

/// Trapezoidal A(T) = (int ||grad u||^4 dt)^{1/4} from sampled values.
double quadrature_A(const std::vector<double>& t, const std::vector<double>& grad);

struct SweepEntry {
  double epsilon = 0.0;
  bool completed = false;
  double sup_A = 0.0;
  double M_hat = 0.0;
  double expo_rate = 0.0;
  std::string error;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  /// log sup A = slope * log eps + intercept over completed entries with
  /// eps > 0 and sup A > 0; NaN when fewer than two qualify.
  double slope = 0.0;
  double intercept = 0.0;
  int fitted = 0;
};

/// Runs `run(eps)` for every epsilon (sorted ascending); a throwing run is
/// recorded as a failed entry and the sweep continues.
SweepResult epsilon_sweep(std::vector<double> epsilons, const std::function<SweepEntry(double)>& run);

/// Least-squares line through (x, y); returns (slope, intercept).
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace vacflow
