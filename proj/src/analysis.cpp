#include "enspace/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "enspace/errors.hpp"

namespace enspace {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double scaled_norm(const Eigen::VectorXd& F, const Eigen::VectorXd& z) {
  double n = 0.0;
  for (Eigen::Index k = 0; k < F.size(); ++k) {
    const double s = std::max(1.0, std::abs(z[k]));
    const double v = std::abs(F[k]) / s;
    if (!(v <= n)) n = v;  // NaN wins
  }
  return n;
}

}  // namespace

Eigen::MatrixXd jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& F,
    const Eigen::VectorXd& z, double rel_step) {
  const Eigen::Index n = z.size();
  Eigen::MatrixXd J;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double dk = rel_step * std::max(1.0, std::abs(z[k]));
    Eigen::VectorXd zp = z, zm = z;
    zp[k] += dk;
    zm[k] -= dk;
    const Eigen::VectorXd col = (F(zp) - F(zm)) / (2.0 * dk);
    if (k == 0) J.resize(col.size(), n);
    J.col(k) = col;
  }
  return J;
}

Eigen::VectorXd newton_solve(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& F,
    Eigen::VectorXd z, const NewtonOptions& opt, int* iterations,
    double* residual) {
  auto safe_norm = [&](const Eigen::VectorXd& zz, Eigen::VectorXd* out) {
    try {
      Eigen::VectorXd f = F(zz);
      const double n = scaled_norm(f, zz);
      if (out != nullptr) *out = std::move(f);
      return std::isfinite(n) ? n : kInf;
    } catch (const SingularityError&) {
      return kInf;
    }
  };

  Eigen::VectorXd f;
  double norm = safe_norm(z, &f);
  if (!std::isfinite(norm)) {
    throw ConvergenceError("Newton: vector field undefined at the guess");
  }
  for (int it = 0; it < opt.max_iterations; ++it) {
    if (norm <= opt.tolerance) {
      if (iterations != nullptr) *iterations = it;
      if (residual != nullptr) *residual = norm;
      return z;
    }
    const Eigen::MatrixXd J = jacobian(F, z);
    const Eigen::VectorXd dz = J.fullPivLu().solve(-f);
    double lambda = 1.0;
    bool accepted = false;
    while (lambda >= 1.0 / 1024.0) {
      Eigen::VectorXd z_try = z + lambda * dz;
      Eigen::VectorXd f_try;
      const double n_try = safe_norm(z_try, &f_try);
      if (n_try < (1.0 - 1e-4 * lambda) * norm) {
        z = std::move(z_try);
        f = std::move(f_try);
        norm = n_try;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      // No descent left: either converged to round-off or stuck.
      if (norm <= 1e3 * opt.tolerance) {
        if (iterations != nullptr) *iterations = it;
        if (residual != nullptr) *residual = norm;
        return z;
      }
      throw ConvergenceError("Newton: line search failed, residual " +
                             std::to_string(norm));
    }
  }
  if (norm <= opt.tolerance) {
    if (iterations != nullptr) *iterations = opt.max_iterations;
    if (residual != nullptr) *residual = norm;
    return z;
  }
  throw ConvergenceError("Newton: no convergence in " +
                         std::to_string(opt.max_iterations) +
                         " iterations, residual " + std::to_string(norm));
}

Equilibrium solve_setpoint_equilibrium(const PhysComponent& plant, double y_ref,
                                       double P, const Vec& x_guess,
                                       double u_guess,
                                       const NewtonOptions& opt) {
  const int n = plant.state_dim();
  auto F = [&](const Eigen::VectorXd& z) {
    const Vec x = z.head(n);
    const Vec dx = plant.rhs(x, z[n], P);
    Eigen::VectorXd out(n + 1);
    out.head(n) = dx;
    out[n] = plant.output(x) - y_ref;
    return out;
  };
  Eigen::VectorXd z(n + 1);
  z.head(n) = x_guess;
  z[n] = u_guess;
  Equilibrium eq;
  z = newton_solve(F, z, opt, &eq.iterations, &eq.residual);
  eq.x = z.head(n);
  eq.u = z[n];
  return eq;
}

Equilibrium solve_closed_loop_equilibrium(const Scenario& scn, double t,
                                          std::optional<Eigen::VectorXd> guess,
                                          const NewtonOptions& opt) {
  const Simulator sim(scn);
  const int n = 2 + sim.internal_dim();
  const auto F = closed_loop_rhs(scn, t);
  Eigen::VectorXd z = guess ? *guess : Eigen::VectorXd(sim.initial_state().head(n));
  Equilibrium eq;
  eq.x = newton_solve(F, z, opt, &eq.iterations, &eq.residual);
  AugVec X = AugVec::Zero(sim.aug_dim());
  X.head(n) = eq.x;
  eq.u = sim.evaluate(t, X, nullptr).control.u;
  return eq;
}

bool Linearization::hurwitz() const {
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
    if (!(eigenvalues[k].real() < 0.0)) return false;
  }
  return true;
}

Linearization linearize(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& F,
    const Eigen::VectorXd& z) {
  Linearization lin;
  lin.A = jacobian(F, z);
  Eigen::EigenSolver<Eigen::MatrixXd> es(lin.A, /*computeEigenvectors=*/false);
  lin.eigenvalues = es.eigenvalues();
  return lin;
}

Linearization linearize(const Scenario& scn, const Equilibrium& eq,
                        double t) {
  return linearize(closed_loop_rhs(scn, t), eq.x);
}

// --- Certificates --------------------------------------------------------------

long CertificateReport::violations() const {
  if (kind == CertificateKind::fblc) return monotone_violations;
  const bool bound_finite = std::isfinite(reaching_bound);
  long missed = 0;
  if (bound_finite) {
    if (reached && reaching_time > reaching_bound + reaching_tolerance) missed = 1;
    if (!reached && duration > reaching_bound + reaching_tolerance) missed = 1;
  }
  return vdot_bound_violations + v_increase_violations + band_exits + missed;
}

namespace {

// Round-off floor for the exogenous channel: exact exchange still leaves a
// mismatch at the level of the Qdot terms' rounding error.
double qdot_floor(const std::vector<TrajectoryRow>& rows) {
  double scale = 0.0;
  for (const auto& r : rows) {
    scale = std::max({scale, std::abs(r.Qr), std::abs(r.Qu)});
  }
  return 1e-10 * scale;
}

}  // namespace

CertificateReport fblc_certificate(const Trajectory& traj, const FblcGains& g) {
  CertificateReport rep;
  rep.kind = CertificateKind::fblc;
  const auto& rows = traj.rows;
  rep.samples = static_cast<long>(rows.size());
  if (rows.empty()) return rep;

  std::vector<double> V(rows.size());
  std::vector<char> cond_bad(rows.size(), 0);
  const double floor = qdot_floor(rows);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    const double e_E = r.E - r.E_ref, e_p = r.p - r.p_ref;
    V[k] = 0.5 * (g.K1 * e_E * e_E + e_p * e_p);
    rep.V_max = std::max(rep.V_max, V[k]);
    const double qm = r.Qm;
    rep.max_abs_qdot_m = std::max(rep.max_abs_qdot_m, std::abs(qm));
    if (std::abs(qm) > g.K2 * std::abs(e_p) + floor) {
      cond_bad[k] = 1;
      ++rep.condition_violations;
    }
    const double vdot = -g.K2 * e_p * e_p - qm * e_p;
    if (vdot > floor * std::abs(e_p)) ++rep.vdot_positive;
  }
  const double threshold = 1e-12 * rep.V_max;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (V[k] - V[k - 1] > threshold) {
      ++rep.monotone_violations;
      if (cond_bad[k] || cond_bad[k - 1]) ++rep.coincident_violations;
    }
  }
  rep.condition_satisfied_fraction =
      1.0 - static_cast<double>(rep.condition_violations) /
                static_cast<double>(rows.size());
  rep.V0 = V.front();
  rep.V_final = V.back();
  rep.ultimate_bound = rep.max_abs_qdot_m / g.K2;
  rep.final_abs_e_p = std::abs(rows.back().p - rows.back().p_ref);
  return rep;
}

CertificateReport smc_certificate(const Trajectory& traj, const SmcGains& g,
                                  std::optional<double> mbar) {
  CertificateReport rep;
  rep.kind = CertificateKind::smc;
  const auto& rows = traj.rows;
  rep.samples = static_cast<long>(rows.size());
  if (rows.empty()) return rep;

  const std::size_t n = rows.size();
  std::vector<double> sigma(n);
  const double floor = qdot_floor(rows);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& r = rows[k];
    sigma[k] = (r.p - r.p_ref) + g.M1 * (r.E - r.E_ref);
    rep.max_abs_qdot_m = std::max(rep.max_abs_qdot_m, std::abs(r.Qm));
  }
  const double measured = rep.max_abs_qdot_m > floor ? rep.max_abs_qdot_m : 0.0;
  rep.mbar = mbar.value_or(measured);
  // Per sample the reaching argument needs |Qdot^m| < M0, and an assumed
  // bound must actually hold.
  for (const auto& r : rows) {
    const double q = std::abs(r.Qm);
    if (q >= g.M0 || (mbar && q > *mbar + floor)) ++rep.condition_violations;
  }
  rep.condition_satisfied_fraction =
      1.0 - static_cast<double>(rep.condition_violations) / static_cast<double>(n);

  rep.sigma0 = sigma.front();
  rep.duration = rows.back().t - rows.front().t;
  rep.reaching_bound =
      rep.mbar < g.M0 ? std::abs(rep.sigma0) / (g.M0 - rep.mbar) : kInf;
  rep.chatter_band =
      g.eps_bl > 0.0 ? g.eps_bl : traj.step * (g.M0 + measured);

  // Arrival at the surface. With the exact sign function the discrete
  // trajectory may park next to sigma = 0 without crossing it, so arrival
  // means entering the chatter band (or the boundary layer).
  const double level = rep.chatter_band;
  const double sgn0 = rep.sigma0 >= 0.0 ? 1.0 : -1.0;
  const double target = sgn0 * level;
  std::size_t k_reach = n;
  if (std::abs(rep.sigma0) <= level) {
    k_reach = 0;
    rep.reached = true;
    rep.reaching_time = 0.0;
  } else {
    for (std::size_t k = 1; k < n; ++k) {
      if (sgn0 * (sigma[k] - target) <= 0.0) {
        k_reach = k;
        rep.reached = true;
        const double frac =
            (sigma[k - 1] - target) / (sigma[k - 1] - sigma[k]);
        rep.reaching_time =
            rows[k - 1].t + frac * (rows[k].t - rows[k - 1].t) - rows.front().t;
        break;
      }
    }
  }

  // Integration error shifts sigma by at most the integrated balance
  // residuals, which delays arrival by that amount over (M0 - mbar).
  double drift = 0.0;
  for (std::size_t k = 1; k < std::min(k_reach + 1, n); ++k) {
    const double dt = rows[k].t - rows[k - 1].t;
    drift += (std::abs(rows[k].res_p) + g.M1 * std::abs(rows[k].res_E)) * dt;
  }
  rep.reaching_tolerance =
      traj.step + (rep.mbar < g.M0 ? drift / (g.M0 - rep.mbar) : 0.0);

  // Lyapunov decrease before reaching: Vdot = sigma * sigmadot with
  // sigmadot = pdot - pdot_ref + M1 e_p, taken from the physical jet.
  for (std::size_t k = 0; k < std::min(k_reach, n); ++k) {
    const auto& r = rows[k];
    const double e_p = r.p - r.p_ref;
    const double sdot = r.pdot - r.pdot_ref + g.M1 * e_p;
    const double vdot = sigma[k] * sdot;
    const double abs_s = std::abs(sigma[k]);
    const double allowance =
        1e-9 * (g.M0 + std::abs(r.pdot) + std::abs(r.pdot_ref) +
                g.M1 * std::abs(e_p)) * abs_s;
    if (vdot > -(g.M0 - rep.mbar) * abs_s + allowance) ++rep.vdot_bound_violations;
    if (vdot > allowance) ++rep.v_increase_violations;
  }

  // Sliding phase.
  if (rep.reached) {
    std::vector<double> ts, ls;
    for (std::size_t k = k_reach; k < n; ++k) {
      const double s = std::abs(sigma[k]);
      rep.max_sigma_after = std::max(rep.max_sigma_after, s);
      if (s > rep.chatter_band * (1.0 + 1e-9)) ++rep.band_exits;
      const double e_E = rows[k].E - rows[k].E_ref;
      if (g.M1 * std::abs(e_E) >= 100.0 * rep.chatter_band) {
        ts.push_back(rows[k].t);
        ls.push_back(std::log(std::abs(e_E)));
      }
    }
    rep.decay_points = static_cast<long>(ts.size());
    if (ts.size() >= 10) {
      Eigen::MatrixXd A(ts.size(), 2);
      Eigen::VectorXd b(ts.size());
      for (std::size_t k = 0; k < ts.size(); ++k) {
        A(k, 0) = ts[k] - ts.front();
        A(k, 1) = 1.0;
        b[k] = ls[k];
      }
      const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(b);
      rep.decay_fitted = true;
      rep.decay_rate = -coef[0];
      rep.decay_rate_error = std::abs(rep.decay_rate - g.M1) / g.M1;
    }
  }
  return rep;
}

std::optional<CertificateReport> certificate_for(const Scenario& scn,
                                                 const Trajectory& traj) {
  switch (scn.controller.kind) {
    case ControllerKind::fblc:
      return fblc_certificate(traj, scn.controller.fblc);
    case ControllerKind::smc:
      return smc_certificate(traj, scn.controller.smc, scn.smc_mbar);
    default:
      return std::nullopt;
  }
}

void attach_certificate(Metrics& m, const CertificateReport& rep) {
  m.certificate_violations = rep.violations();
  if (rep.kind == CertificateKind::smc && rep.reached) {
    m.reaching_time = rep.reaching_time;
  }
}

ConsistencyReport interlayer_consistency(const Scenario& scn,
                                         const Trajectory& traj, double tol_E,
                                         double tol_p) {
  ConsistencyReport rep;
  const auto plant = make_component(scn);
  for (const auto& r : traj.rows) {
    const double e_E = r.E - r.E_ref, e_p = r.p - r.p_ref;
    if (std::abs(e_E) > tol_E || std::abs(e_p) > tol_p) continue;
    ++rep.qualifying;
    double tol_y = 0.0;
    for (double dE : {tol_E, -tol_E}) {
      const double y = plant->output_from_energy(r.E_ref + dE, r.P_load);
      if (std::isfinite(y)) tol_y = std::max(tol_y, std::abs(y - r.y_ref));
    }
    rep.output_tolerance = std::max(rep.output_tolerance, tol_y);
    const double err = std::abs(r.y - r.y_ref);
    rep.max_output_error = std::max(rep.max_output_error, err);
    if (err > 2.0 * tol_y + 1e-12 * std::abs(r.y_ref)) ++rep.violations;
  }
  return rep;
}

}  // namespace enspace
