#include "vacflow/momentum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "krylov.hpp"
#include "vacflow/errors.hpp"
#include "vacflow/operators.hpp"
#include "vacflow/spectral.hpp"

namespace vacflow {

using detail::SpecVec;

std::string to_string(AdvectionForm f) {
  return f == AdvectionForm::kConvective ? "convective" : "skew-symmetric";
}

std::string to_string(ViscousTreatment v) {
  return v == ViscousTreatment::kImplicitSpectral ? "implicit-spectral" : "explicit";
}

AdvectionForm parse_advection_form(const std::string& s) {
  if (s == "convective") return AdvectionForm::kConvective;
  if (s == "skew-symmetric") return AdvectionForm::kSkewSymmetric;
  throw ParameterError("unknown advection form '" + s + "'");
}

ViscousTreatment parse_viscous_treatment(const std::string& s) {
  if (s == "implicit-spectral") return ViscousTreatment::kImplicitSpectral;
  if (s == "explicit") return ViscousTreatment::kExplicit;
  throw ParameterError("unknown viscous treatment '" + s + "'");
}

void MomentumParams::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ParameterError("momentum: mu must be positive");
  if (!(rho_bar > 0.0)) throw ParameterError("momentum: rho_bar must be positive");
  if (!(delta_floor > 0.0 && delta_floor <= 1e-2)) {
    throw ParameterError("momentum: delta_floor must lie in (0, 1e-2]");
  }
  if (time_order != 1 && time_order != 2) throw ParameterError("momentum: time_order must be 1 or 2");
  if (!(cfl > 0.0 && cfl <= 0.5)) throw ParameterError("momentum: cfl must lie in (0, 0.5]");
  if (!(pressure.rtol > 0.0) || pressure.max_iterations < 1 || !(viscous_solver.rtol > 0.0) ||
      viscous_solver.max_iterations < 1) {
    throw ParameterError("momentum: solver controls must be positive");
  }
  transport.validate();
}

SimState::SimState(ScalarField rho0, VectorField u0)
    : rho(std::move(rho0)), u(std::move(u0)), p(rho.grid()) {
  require_same_grid(rho.grid(), u.grid(), "SimState");
}

namespace {

SpecVec to_spec(const VectorField& v) {
  auto a = forward(v);
  return {std::move(a[0]), std::move(a[1]), std::move(a[2])};
}

VectorField to_field(SpecVec s) {
  return VectorField(inverse(std::move(s[0])), inverse(std::move(s[1])), inverse(std::move(s[2])));
}

Spectrum times(const ScalarField& coef, const Spectrum& x) {
  ScalarField f = inverse(x);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= coef[i];
  return forward(f);
}

ScalarField floored(const ScalarField& rho, double floor_density) {
  ScalarField out(rho.grid());
  for (std::size_t i = 0; i < rho.size(); ++i) out[i] = std::max(rho[i], floor_density);
  return out;
}

ScalarField reciprocal(const ScalarField& f) {
  ScalarField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = 1.0 / f[i];
  return out;
}

bool uniform(const ScalarField& f) { return f.min() == f.max(); }

double k2_at(const TorusGrid& g, int ix, int iy, int iz) {
  const double kx = g.wavenumber(ix), ky = g.wavenumber(iy), kz = g.wavenumber(iz);
  return kx * kx + ky * ky + kz * kz;
}

double kd2_at(const TorusGrid& g, int ix, int iy, int iz) {
  const double kx = g.derivative_wavenumber(ix), ky = g.derivative_wavenumber(iy),
               kz = g.derivative_wavenumber(iz);
  return kx * kx + ky * ky + kz * kz;
}

void pin_mean(Spectrum& s) { s[0] = 0.0; }

// Spectral form of -div(beta grad p); symmetric positive semidefinite.
Spectrum neg_pressure_operator(const ScalarField& beta, const Spectrum& p) {
  auto g = spectral::gradient(p);
  std::array<Spectrum, 3> flux{times(beta, g[0]), times(beta, g[1]), times(beta, g[2])};
  Spectrum d = spectral::divergence(flux);
  d *= -1.0;
  return d;
}

Spectrum solve_pressure_spectral(const ScalarField& beta, const Spectrum& div_r,
                                 const SolverControls& controls, PressureSolveReport* report) {
  const TorusGrid& g = beta.grid();
  if (uniform(beta)) {
    // Constant coefficient: the preconditioner is the exact inverse.
    const double b = beta[0];
    Spectrum p(g);
    p.for_each_mode([&](std::size_t i, int ix, int iy, int iz) {
      const double k2 = kd2_at(g, ix, iy, iz);
      p[i] = k2 == 0.0 ? Complex(0.0) : -div_r[i] / (b * k2);
    });
    if (report) *report = {};
    return p;
  }
  SpecVec rhs{div_r};
  rhs[0] *= -1.0;
  SpecVec x{Spectrum(g)};
  auto apply = [&](const SpecVec& v) { return SpecVec{neg_pressure_operator(beta, v[0])}; };
  auto precondition = [&](const SpecVec& r) {
    SpecVec z = r;
    z[0].for_each_mode([&](std::size_t i, int ix, int iy, int iz) {
      const double k2 = kd2_at(g, ix, iy, iz);
      z[0][i] = k2 == 0.0 ? Complex(0.0) : r[0][i] / k2;
    });
    return z;
  };
  auto outcome = detail::pcg(apply, precondition, rhs, x, controls.rtol, controls.max_iterations,
                             "pressure_solve");
  if (report) *report = {outcome.iterations, std::move(outcome.residuals)};
  pin_mean(x[0]);
  return std::move(x[0]);
}

// Nonlinear flux div(m (x) w) with m = rho*a, in the requested form,
// dealiased. The forms differ only by discrete product-rule terms; each has
// zero spatial mean exactly.
std::array<Spectrum, 3> advection_term(const ScalarField& rho, const VectorField& a,
                                       const VectorField& w, AdvectionForm form) {
  const TorusGrid& g = rho.grid();
  const VectorField m = scale(rho, a);
  const ScalarField div_m = div(m);
  std::array<Spectrum, 3> out{Spectrum(g), Spectrum(g), Spectrum(g)};
  const auto w_hat = forward(w);
  for (int i = 0; i < 3; ++i) {
    // (m . grad) w_i + w_i div m
    ScalarField conv(g);
    for (int j = 0; j < 3; ++j) {
      const ScalarField dw = inverse(spectral::derivative(w_hat[i], j));
      for (std::size_t c = 0; c < conv.size(); ++c) conv[c] += m[j][c] * dw[c];
    }
    if (form == AdvectionForm::kConvective) {
      for (std::size_t c = 0; c < conv.size(); ++c) conv[c] += w[i][c] * div_m[c];
      out[i] = forward(conv);
    } else {
      // 1/2 (m . grad) w_i + 1/2 div(m w_i) + 1/2 w_i div m
      for (std::size_t c = 0; c < conv.size(); ++c) conv[c] = 0.5 * (conv[c] + w[i][c] * div_m[c]);
      std::array<Spectrum, 3> flux{Spectrum(g), Spectrum(g), Spectrum(g)};
      for (int j = 0; j < 3; ++j) flux[j] = forward(hadamard(m[j], w[i]));
      Spectrum d = spectral::divergence(flux);
      d *= 0.5;
      out[i] = forward(conv);
      out[i] += d;
    }
    out[i].dealias();
  }
  return out;
}

struct Stage {
  ScalarField rho;
  VectorField u;
  ScalarField p;
};

double max_speed(const VectorField& v) { return v.max_abs(); }

// One first- or second-order stage: rho_new from transport, then the
// momentum predictor with advection N and a theta-weighted viscous term,
// then the variable-density projection.
Stage advance_stage(const ScalarField& rho_n, const VectorField& w_n, const ScalarField& p_guess,
                    const ScalarField& rho_adv, const VectorField& a_adv, const VectorField& w_adv,
                    const VectorField* w_visc_explicit, double dt, double theta,
                    const MomentumParams& prm, StepReport& rep) {
  const TorusGrid& g = rho_n.grid();
  const double floor_density = prm.floor_density();

  ScalarField rho_new = advect_density(rho_n, face_velocity(a_adv), dt, prm.transport);
  const ScalarField rho_reg = floored(rho_new, floor_density);
  const auto N = advection_term(rho_adv, a_adv, w_adv, prm.advection);

  // rhs = rho_n w_n + (rho_reg - rho_new) w_n + (1-theta) dt mu lap(w_visc) - dt N - dt grad p
  VectorField base(g);
  for (int a = 0; a < 3; ++a)
    for (std::size_t c = 0; c < base[a].size(); ++c)
      base[a][c] = rho_n[c] * w_n[a][c] + (rho_reg[c] - rho_new[c]) * w_n[a][c];
  SpecVec rhs = to_spec(base);
  const auto wv_hat = forward(w_visc_explicit ? *w_visc_explicit : w_n);
  const Spectrum p_hat = forward(p_guess);
  const bool explicit_visc = w_visc_explicit || prm.viscous == ViscousTreatment::kExplicit;
  const double explicit_weight = explicit_visc ? 1.0 : 1.0 - theta;
  for (int a = 0; a < 3; ++a) {
    const Spectrum dp = spectral::derivative(p_hat, a);
    rhs[a].for_each_mode([&](std::size_t i, int ix, int iy, int iz) {
      const double k2 = k2_at(g, ix, iy, iz);
      rhs[a][i] += -explicit_weight * dt * prm.mu * k2 * wv_hat[a][i] - dt * N[a][i] - dt * dp[i];
    });
  }

  SpecVec u_star;
  if (explicit_visc) {
    const ScalarField inv = reciprocal(rho_reg);
    u_star = rhs;
    for (int a = 0; a < 3; ++a) u_star[a] = times(inv, rhs[a]);
  } else {
    const double coef = theta * dt * prm.mu;
    const double rho_c = rho_reg.mean();
    if (uniform(rho_reg)) {
      u_star = rhs;
      const double r0 = rho_reg[0];
      for (int a = 0; a < 3; ++a)
        u_star[a].for_each_mode([&](std::size_t i, int ix, int iy, int iz) {
          u_star[a][i] = rhs[a][i] / (r0 + coef * k2_at(g, ix, iy, iz));
        });
    } else {
      auto apply = [&](const SpecVec& v) {
        SpecVec out(3, Spectrum(g));
        for (int a = 0; a < 3; ++a) {
          out[a] = times(rho_reg, v[a]);
          out[a].for_each_mode([&](std::size_t i, int ix, int iy, int iz) {
            out[a][i] += coef * k2_at(g, ix, iy, iz) * v[a][i];
          });
        }
        return out;
      };
      auto precondition = [&](const SpecVec& r) {
        SpecVec z = r;
        for (int a = 0; a < 3; ++a)
          z[a].for_each_mode([&](std::size_t i, int ix, int iy, int iz) {
            z[a][i] = r[a][i] / (rho_c + coef * k2_at(g, ix, iy, iz));
          });
        return z;
      };
      u_star = to_spec(w_n);
      auto outcome = detail::pcg(apply, precondition, rhs, u_star, prm.viscous_solver.rtol,
                                 prm.viscous_solver.max_iterations, "viscous_solve");
      rep.viscous_iterations += outcome.iterations;
    }
  }

  // Projection: div(beta grad phi) = div(u*) / dt, u = u* - dt beta grad phi.
  const ScalarField beta = reciprocal(rho_reg);
  Spectrum div_r = spectral::divergence({u_star[0], u_star[1], u_star[2]});
  div_r *= 1.0 / dt;
  PressureSolveReport prep;
  Spectrum phi = solve_pressure_spectral(beta, div_r, prm.pressure, &prep);
  rep.pressure_iterations += prep.iterations;
  VectorField u = to_field(u_star);
  {
    const auto gphi = spectral::gradient(phi);
    for (int a = 0; a < 3; ++a) {
      const ScalarField gp = inverse(gphi[a]);
      for (std::size_t c = 0; c < gp.size(); ++c) u[a][c] -= dt * beta[c] * gp[c];
    }
  }
  HelmholtzSplit clean = leray_project(u);
  const double unorm = std::sqrt(u.dot(u));
  const VectorField removed = u - clean.solenoidal;
  rep.cleanup_fraction = std::max(rep.cleanup_fraction,
                                  unorm > 0.0 ? std::sqrt(removed.dot(removed)) / unorm : 0.0);

  Spectrum p_new = p_hat;
  p_new += phi;
  pin_mean(p_new);
  return {std::move(rho_new), std::move(clean.solenoidal), inverse(std::move(p_new))};
}

SimState step_impl(const SimState& s, double dt, const MomentumParams& prm,
                   const VectorField* frozen, StepReport* report) {
  prm.validate();
  if (!(dt > 0.0)) throw ParameterError("momentum_step: dt must be positive");
  const VectorField& a_n = frozen ? *frozen : s.u;
  if (frozen) require_same_grid(frozen->grid(), s.grid(), "linear_step");
  const double limit = momentum_dt_limit(s, prm, a_n);
  if (dt > limit * (1.0 + 1e-12)) {
    throw CflViolation("momentum_step: dt " + std::to_string(dt) + " exceeds admissible " +
                           std::to_string(limit),
                       limit);
  }
  StepReport rep;
  Stage next = [&] {
    if (prm.time_order == 1) {
      return advance_stage(s.rho, s.u, s.p, s.rho, a_n, s.u, nullptr, dt, 1.0, prm, rep);
    }
    Stage half = advance_stage(s.rho, s.u, s.p, s.rho, a_n, s.u, nullptr, 0.5 * dt, 1.0, prm, rep);
    const VectorField& a_mid = frozen ? *frozen : half.u;
    const bool explicit_visc = prm.viscous == ViscousTreatment::kExplicit;
    return advance_stage(s.rho, s.u, half.p, half.rho, a_mid, half.u,
                         explicit_visc ? &half.u : nullptr, dt, 0.5, prm, rep);
  }();

  SimState out(s.grid());
  out.t = s.t + dt;
  out.step = s.step + 1;
  const double gn2 = std::pow(grad_norm(s.u), 2);
  out.dissipation_integral = s.dissipation_integral + gn2 * dt;
  out.grad4_integral = s.grad4_integral + gn2 * gn2 * dt;
  out.rho = std::move(next.rho);
  out.u = std::move(next.u);
  out.p = std::move(next.p);
  if (report) *report = rep;
  return out;
}

}  // namespace

HelmholtzSplit leray_project(const VectorField& v) {
  const TorusGrid& g = v.grid();
  auto vh = forward(v);
  Spectrum phi(g);
  phi.for_each_mode([&](std::size_t i, int ix, int iy, int iz) {
    const double k[3] = {g.derivative_wavenumber(ix), g.derivative_wavenumber(iy),
                         g.derivative_wavenumber(iz)};
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if (k2 == 0.0) return;
    const Complex kv = k[0] * vh[0][i] + k[1] * vh[1][i] + k[2] * vh[2][i];
    for (int a = 0; a < 3; ++a) vh[a][i] -= k[a] * kv / k2;
    phi[i] = Complex(0.0, -1.0) * kv / k2;
  });
  return {inverse(std::move(vh)), inverse(std::move(phi))};
}

ScalarField pressure_operator(const ScalarField& rho, const ScalarField& p, double floor_density) {
  require_same_grid(rho.grid(), p.grid(), "pressure_operator");
  Spectrum out = neg_pressure_operator(reciprocal(floored(rho, floor_density)), forward(p));
  out *= -1.0;
  return inverse(std::move(out));
}

ScalarField pressure_solve(const ScalarField& rho, const VectorField& r, double delta_floor,
                           double rho_bar, const SolverControls& controls,
                           PressureSolveReport* report) {
  require_same_grid(rho.grid(), r.grid(), "pressure_solve");
  if (!(rho_bar > 0.0)) throw ParameterError("pressure_solve: rho_bar must be positive");
  if (!(delta_floor > 0.0)) throw ParameterError("pressure_solve: delta_floor must be positive");
  const ScalarField beta = reciprocal(floored(rho, delta_floor * rho_bar));
  const Spectrum div_r = spectral::divergence(forward(r));
  return inverse(solve_pressure_spectral(beta, div_r, controls, report));
}

double momentum_dt_limit(const SimState& s, const MomentumParams& p, const VectorField& advecting) {
  const TorusGrid& g = s.grid();
  double limit = std::numeric_limits<double>::infinity();
  const double speed = max_speed(advecting);
  if (speed > 0.0) limit = p.cfl * g.dx() / speed;
  limit = std::min(limit, admissible_dt(face_velocity(advecting), p.transport));
  if (p.viscous == ViscousTreatment::kExplicit) {
    // Forward Euler on mu |k|^2 / rho: half the stability bound.
    const double kmax2 = 3.0 * std::pow(std::numbers::pi / g.dx(), 2);
    const double rho_min = std::max(s.rho.min(), p.floor_density());
    limit = std::min(limit, rho_min / (p.mu * kmax2));
  }
  return limit;
}

SimState momentum_step(const SimState& s, double dt, const MomentumParams& p, StepReport* report) {
  return step_impl(s, dt, p, nullptr, report);
}

SimState linear_step(const SimState& s, double dt, const MomentumParams& p,
                     const VectorField& u_frozen, StepReport* report) {
  return step_impl(s, dt, p, &u_frozen, report);
}

double kinetic_energy(const ScalarField& rho, const VectorField& u) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    sum += rho[i] * (u[0][i] * u[0][i] + u[1][i] * u[1][i] + u[2][i] * u[2][i]);
  }
  return 0.5 * sum * rho.grid().cell_volume();
}

double grad_norm(const VectorField& u) {
  double sum = 0.0;
  for (int a = 0; a < 3; ++a) {
    sum += spectral::weighted_energy(forward(u[a]), [](double k2) { return k2; }, true);
  }
  return std::sqrt(sum);
}

std::array<double, 3> momentum(const ScalarField& rho, const VectorField& u) {
  std::array<double, 3> m{0.0, 0.0, 0.0};
  for (int a = 0; a < 3; ++a) m[a] = hadamard(rho, u[a]).integral();
  return m;
}

}  // namespace vacflow
