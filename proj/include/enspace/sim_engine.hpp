#pragma once

// Fixed-step simulation of plant + controller + interaction integrals,
// trajectory recording, residual monitors and performance metrics.

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "enspace/components.hpp"
#include "enspace/controllers.hpp"
#include "enspace/energy_core.hpp"
#include "enspace/interconnect.hpp"
#include "enspace/load_profile.hpp"

namespace enspace {

enum class PlantKind { rlc, generator };

std::string_view to_string(PlantKind k);

struct Scenario {
  std::string name = "scenario";
  PlantKind plant = PlantKind::rlc;
  RlcParams rlc;
  GenParams gen;
  std::array<double, 2> x0{12.8, 79.0};
  double y_ref = 80.0;
  std::vector<LoadProfile> loads;
  ControllerSpec controller;
  int delay_steps = 0;
  DisturbanceChannel disturbance;
  double step = 1e-4;
  double horizon = 5.0;
  int record_every = 1;
  double window_fraction = 0.1;  // steady-state window, fraction of horizon
  std::optional<double> smc_mbar;  // assumed disturbance bound for SMC
  std::uint64_t seed = 0;

  /// Throws InvalidInput describing the first violated constraint.
  void validate() const;
};

std::unique_ptr<PhysComponent> make_component(const Scenario& scn);

/// Sum of all load samples at time t.
LoadSample total_load(const std::vector<LoadProfile>& loads, double t);

/// Reference lift matching the scenario's plant.
EnergyReference reference_for(const Scenario& scn, const LoadSample& load);

// ---------------------------------------------------------------------------

/// One recorded sample. Interaction rates are split into the true own bus
/// rate (r), the rate implied by received reports (r_rep), the nominal
/// control rate (u) and the exogenous rate (m); the energy balance closes
/// with r_rep + u + m. Residual columns hold the residual of the step that
/// ended at this sample, per unit time.
struct TrajectoryRow {
  double t = 0;
  double x0 = 0, x1 = 0;
  double y = 0, y_ref = 0;
  double u = 0, u_dot = 0;
  double E = 0, p = 0, Et = 0, pdot = 0;
  double E_ref = 0, p_ref = 0, pdot_ref = 0;
  double D = 0, Dt = 0, qdot_C = 0;
  double P_load = 0;
  double Pr = 0, Qr = 0, Ptr = 0;
  double Pr_rep = 0, Qr_rep = 0, Ptr_rep = 0;
  double Pu = 0, Qu = 0, Ptu = 0;
  double Pm = 0, Qm = 0, Ptm = 0;
  double uz = 0, sigma = 0, V = 0;
  double res_E = 0, res_p = 0, res_Et = 0;
  double tel_P = 0, tel_Q = 0, tel_Pt = 0;
  double gap = 0;
};

struct TrajectoryColumn {
  const char* name;
  double TrajectoryRow::*field;
};

/// Column order of the CSV form. The two state columns are named after the
/// plant's states.
const std::vector<TrajectoryColumn>& trajectory_columns();
std::vector<std::string> trajectory_header(PlantKind plant);

struct Trajectory {
  PlantKind plant = PlantKind::rlc;
  ControllerKind controller = ControllerKind::fblc;
  double step = 0.0;
  int record_every = 1;
  std::vector<TrajectoryRow> rows;

  double dt() const { return step * record_every; }
};

struct ResidualStats {
  double max_abs = 0.0;
  double rms = 0.0;
};

/// Residuals over every integrator step, whatever the recording decimation.
struct ResidualReport {
  long steps = 0;
  ResidualStats energy;    // E balance
  ResidualStats pdot;      // p balance
  ResidualStats tangent;   // E_t balance
  ResidualStats tellegen_P, tellegen_Q, tellegen_Pt;
  double tellegen_P_relative = 0.0;  // max |tel_P| / max |P_load|
  ResidualStats gap;  // |y - y implied by E|
};

enum class SimStatus { ok, singularity, divergence };

std::string_view to_string(SimStatus s);

struct SimResult {
  Trajectory traj;
  ResidualReport residuals;
  SimStatus status = SimStatus::ok;
  std::string message;
  long failed_step = -1;
  InteractionVariable z_r, z_u, z_m;  // reported, nominal control, exogenous
  double wall_seconds = 0.0;

  bool ok() const { return status == SimStatus::ok; }
};

/// Augmented state: physical state, controller state, then per-step
/// integrals of the rates.
inline constexpr int kMaxAugDim = 24;
using AugVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor,
                             kMaxAugDim, 1>;

inline constexpr int kMaxLoads = 8;

/// Everything computed in one right-hand-side evaluation.
struct Stage {
  AugVec deriv;
  LoadSample load;
  Jet jet;
  Lift lift;
  EnergyReference ref;
  ControlOutput control;
  BusVariable bus;
  double pdot = 0.0;  // physical d/dt p
  std::array<InteractionRate, kMaxLoads> loads_true{};
  int n_loads = 0;
  InteractionRate r_true, r_rep, u_nom, m;
};

/// Drives one scenario. Instances are single-threaded; separate instances
/// may run concurrently.
class Simulator {
 public:
  explicit Simulator(Scenario scn);
  ~Simulator();

  const Scenario& scenario() const { return scn_; }
  const PhysComponent& plant() const { return *plant_; }
  const ControlLaw& law() const { return *law_; }

  int physical_dim() const { return 2; }
  int internal_dim() const { return law_->internal_dim(); }
  int aug_dim() const;
  AugVec initial_state() const;

  /// Right-hand side at (t, X). `held` is the neighbor payload for delayed
  /// exchange; nullptr means exact exchange with the current load rates.
  Stage evaluate(double t, const AugVec& X,
                 const std::vector<InteractionRate>* held) const;

  /// Load rates computed from the state alone, as published to the mailbox.
  std::vector<InteractionRate> load_rates(double t, const AugVec& X) const;

  SimResult run() const;

 private:
  Scenario scn_;
  std::unique_ptr<PhysComponent> plant_;
  std::unique_ptr<ControlLaw> law_;
};

SimResult simulate(const Scenario& scn);

/// Closed-loop vector field on (x, controller state) at frozen time t with
/// exact exchange. Used by the equilibrium solver and linearization.
std::function<Eigen::VectorXd(const Eigen::VectorXd&)> closed_loop_rhs(
    const Scenario& scn, double t);

/// Recomputes E, p and E_t from a recorded row's state, input and load.
EnergyState relift(const Scenario& scn, const TrajectoryRow& row);

// ---------------------------------------------------------------------------

struct Metrics {
  double steady_state_error = 0.0;
  double overshoot = 0.0;
  double settling_time_2pct = 0.0;       // band 2% of |y_ref|
  bool settled = true;
  double settling_time_2pct_span = 0.0;  // band 2% of |y_ref - y(0)|
  bool settled_span = true;
  double control_effort_l2 = 0.0;        // integral (u - u_ss)^2 dt
  double control_total_variation = 0.0;  // sum |u_{k+1} - u_k|
  double u_ss = 0.0;
  double final_y = 0.0;
  double final_u = 0.0;
  std::array<double, 2> final_state{};
  std::optional<double> reaching_time;
  long certificate_violations = 0;
};

/// Metrics over the recorded grid. The steady-state window is the final
/// `window_fraction` of the run.
Metrics compute_metrics(const Trajectory& traj, double y_ref,
                        double window_fraction);

/// Recomputes the residual statistics from recorded rows. Matches the
/// in-run report when the trajectory was recorded at full rate.
ResidualReport residual_monitors(const Trajectory& traj);

}  // namespace enspace
