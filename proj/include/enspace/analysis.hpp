#pragma once

// Offline verification: equilibria, linearization, and the Lyapunov and
// reaching-time certificates evaluated on recorded trajectories.

#include <functional>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "enspace/components.hpp"
#include "enspace/controllers.hpp"
#include "enspace/sim_engine.hpp"

namespace enspace {

struct Equilibrium {
  Eigen::VectorXd x;  // physical state, followed by any controller state
  double u = 0.0;
  double residual = 0.0;  // scaled infinity norm of the vector field
  int iterations = 0;
};

struct NewtonOptions {
  int max_iterations = 100;
  double tolerance = 1e-10;
};

/// Damped Newton with a central finite-difference Jacobian. Residual entries
/// are scaled by 1 / max(1, |z_k|). Throws ConvergenceError.
Eigen::VectorXd newton_solve(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& F,
    Eigen::VectorXd guess, const NewtonOptions& opt = {}, int* iterations = nullptr,
    double* residual = nullptr);

/// Plant equilibrium that puts the output at y_ref under constant load P.
/// Unknowns are the state and the input.
Equilibrium solve_setpoint_equilibrium(const PhysComponent& plant, double y_ref,
                                       double P, const Vec& x_guess,
                                       double u_guess,
                                       const NewtonOptions& opt = {});

/// Zero of the closed-loop vector field of a scenario (load frozen at t).
/// The guess defaults to the scenario's initial augmented state.
Equilibrium solve_closed_loop_equilibrium(
    const Scenario& scn, double t,
    std::optional<Eigen::VectorXd> guess = std::nullopt,
    const NewtonOptions& opt = {});

struct Linearization {
  Eigen::MatrixXd A;
  Eigen::VectorXcd eigenvalues;
  bool hurwitz() const;
};

/// Central differences with relative step 1e-6.
Eigen::MatrixXd jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& F,
    const Eigen::VectorXd& z, double rel_step = 1e-6);

Linearization linearize(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& F,
    const Eigen::VectorXd& z);

Linearization linearize(const Scenario& scn, const Equilibrium& eq,
                        double t);

// ---------------------------------------------------------------------------

enum class CertificateKind { fblc, smc };

struct CertificateReport {
  CertificateKind kind = CertificateKind::fblc;
  long samples = 0;

  // Disturbance condition, checked per sample.
  double condition_satisfied_fraction = 1.0;
  long condition_violations = 0;
  double max_abs_qdot_m = 0.0;

  // FBLC
  long monotone_violations = 0;  // V_{k+1} - V_k > 1e-12 max V
  long vdot_positive = 0;        // -K2 e_p^2 - Qdot^m e_p > 0
  long coincident_violations = 0;
  double V0 = 0.0;
  double V_final = 0.0;
  double V_max = 0.0;
  double ultimate_bound = 0.0;   // sup |Qdot^m| / K2
  double final_abs_e_p = 0.0;

  // SMC
  double mbar = 0.0;
  double sigma0 = 0.0;
  bool reached = false;
  double reaching_time = 0.0;
  double reaching_bound = 0.0;  // |sigma0| / (M0 - mbar), inf if mbar >= M0
  double reaching_tolerance = 0.0;
  double duration = 0.0;  // recorded span of the run
  long vdot_bound_violations = 0;  // pre-reaching
  long v_increase_violations = 0;  // pre-reaching Vdot > 0
  double chatter_band = 0.0;
  long band_exits = 0;             // post-reaching |sigma| > band
  double max_sigma_after = 0.0;
  bool decay_fitted = false;
  double decay_rate = 0.0;
  double decay_rate_error = 0.0;   // |rate - M1| / M1
  long decay_points = 0;

  /// Count of certificate failures: "V increased" events (or the reaching
  /// bound missed for SMC).
  long violations() const;
  bool condition_satisfied() const { return condition_violations == 0; }
  bool passed() const { return violations() == 0; }
};

/// Lyapunov certificate for the feedback-linearizing law. Uses the recorded
/// exogenous Qdot^m column.
CertificateReport fblc_certificate(const Trajectory& traj,
                                   const FblcGains& g);

/// Reaching and sliding certificate for the sliding-mode law. When `mbar`
/// is empty the measured sup |Qdot^m| is used as the bound.
CertificateReport smc_certificate(const Trajectory& traj, const SmcGains& g,
                                  std::optional<double> mbar = std::nullopt);

/// Applies whichever certificate matches the trajectory's controller, or
/// returns nothing for the benchmark laws.
std::optional<CertificateReport> certificate_for(const Scenario& scn,
                                                 const Trajectory& traj);

/// Copies reaching time and violation count into the metrics.
void attach_certificate(Metrics& m, const CertificateReport& rep);

// ---------------------------------------------------------------------------

/// Interlayer consistency: samples whose energy errors are within the lift
/// tolerances must have an output error within the tolerance obtained by
/// inverting the reference lift.
struct ConsistencyReport {
  long qualifying = 0;
  long violations = 0;
  double max_output_error = 0.0;
  double output_tolerance = 0.0;
};

ConsistencyReport interlayer_consistency(const Scenario& scn,
                                         const Trajectory& traj, double tol_E,
                                         double tol_p);

}  // namespace enspace
