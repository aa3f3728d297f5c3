#include "enspace/sim_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "enspace/errors.hpp"
#include "enspace/rk4.hpp"

namespace enspace {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Offsets of the per-step rate integrals inside the augmented state.
enum Acc : int {
  kPr = 0, kQr, kPtr,
  kPu, kQu, kPtu,
  kPm, kQm, kPtm,
  kD, kDt, kEt, kQC,
  kAccCount
};

void put(AugVec& v, int base, const InteractionRate& r) {
  v[base] = r.P;
  v[base + 1] = r.Qdot;
  v[base + 2] = r.Pt;
}

InteractionRate get(const AugVec& v, int base) {
  return {v[base], v[base + 1], v[base + 2]};
}

struct RunningStats {
  double max_abs = 0.0;
  double sumsq = 0.0;
  long n = 0;

  void add(double v) {
    const double a = std::abs(v);
    if (!(a <= max_abs)) max_abs = a;  // also propagates NaN
    sumsq += v * v;
    ++n;
  }
  ResidualStats stats() const {
    return {max_abs, n > 0 ? std::sqrt(sumsq / static_cast<double>(n)) : 0.0};
  }
};

struct ResidualAccumulator {
  RunningStats energy, pdot, tangent, tel_P, tel_Q, tel_Pt, gap;
  double max_load = 0.0;

  void add_step(const TrajectoryRow& r) {
    energy.add(r.res_E);
    pdot.add(r.res_p);
    tangent.add(r.res_Et);
  }
  void add_sample(const TrajectoryRow& r) {
    tel_P.add(r.tel_P);
    tel_Q.add(r.tel_Q);
    tel_Pt.add(r.tel_Pt);
    gap.add(r.gap);
    max_load = std::max(max_load, std::abs(r.P_load));
  }
  ResidualReport report() const {
    ResidualReport rep;
    rep.steps = energy.n;
    rep.energy = energy.stats();
    rep.pdot = pdot.stats();
    rep.tangent = tangent.stats();
    rep.tellegen_P = tel_P.stats();
    rep.tellegen_Q = tel_Q.stats();
    rep.tellegen_Pt = tel_Pt.stats();
    rep.gap = gap.stats();
    rep.tellegen_P_relative =
        max_load > 0.0 ? tel_P.max_abs / max_load : tel_P.max_abs;
    return rep;
  }
};

}  // namespace

std::string_view to_string(PlantKind k) {
  return k == PlantKind::rlc ? "rlc" : "generator";
}

std::string_view to_string(SimStatus s) {
  switch (s) {
    case SimStatus::ok: return "ok";
    case SimStatus::singularity: return "singularity";
    case SimStatus::divergence: return "divergence";
  }
  return "unknown";
}

void Scenario::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw InvalidInput("simulation.step must be positive");
  }
  if (!(horizon >= step) || !std::isfinite(horizon)) {
    throw InvalidInput("simulation.horizon must be at least one step");
  }
  if (record_every < 1) {
    throw InvalidInput("simulation.record_every must be >= 1");
  }
  if (delay_steps < 0) {
    throw InvalidInput("interconnect.delay_steps must be >= 0");
  }
  if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
    throw InvalidInput("metrics.window_fraction must lie in (0, 1]");
  }
  if (!(y_ref > 0.0)) throw InvalidInput("plant.y_ref must be positive");
  if (static_cast<int>(loads.size()) > kMaxLoads) {
    throw InvalidInput("at most " + std::to_string(kMaxLoads) + " loads");
  }
  if (!std::isfinite(x0[0]) || !std::isfinite(x0[1])) {
    throw InvalidInput("plant.initial_state must be finite");
  }
  const bool energy = controller.kind == ControllerKind::fblc ||
                      controller.kind == ControllerKind::smc;
  if (disturbance.active() && !energy) {
    throw InvalidInput(
        "disturbance injection needs an energy-space controller");
  }
  if (smc_mbar && !(*smc_mbar >= 0.0)) {
    throw InvalidInput("certificate.smc_mbar must be >= 0");
  }
}

std::unique_ptr<PhysComponent> make_component(const Scenario& scn) {
  if (scn.plant == PlantKind::rlc) {
    return std::make_unique<RlcComponent>(scn.rlc);
  }
  return std::make_unique<GeneratorComponent>(scn.gen);
}

LoadSample total_load(const std::vector<LoadProfile>& loads, double t) {
  LoadSample sum;
  for (const auto& l : loads) {
    const LoadSample s = l.evaluate(t);
    sum.P += s.P;
    sum.P_dot += s.P_dot;
    sum.P_ddot += s.P_ddot;
  }
  return sum;
}

EnergyReference reference_for(const Scenario& scn, const LoadSample& load) {
  if (scn.plant == PlantKind::rlc) {
    return rlc_reference_lift(load, scn.y_ref, scn.rlc);
  }
  return gen_reference_lift(scn.y_ref, scn.gen);
}

// --- CSV schema ----------------------------------------------------------------

const std::vector<TrajectoryColumn>& trajectory_columns() {
  using R = TrajectoryRow;
  static const std::vector<TrajectoryColumn> cols = {
      {"t", &R::t},
      {"x0", &R::x0}, {"x1", &R::x1},
      {"y", &R::y}, {"y_ref", &R::y_ref},
      {"u", &R::u}, {"u_dot", &R::u_dot},
      {"E", &R::E}, {"p", &R::p}, {"Et", &R::Et}, {"pdot", &R::pdot},
      {"E_ref", &R::E_ref}, {"p_ref", &R::p_ref}, {"pdot_ref", &R::pdot_ref},
      {"D", &R::D}, {"Dt", &R::Dt}, {"qdot_C", &R::qdot_C},
      {"P_load", &R::P_load},
      {"Pr", &R::Pr}, {"Qr", &R::Qr}, {"Ptr", &R::Ptr},
      {"Pr_rep", &R::Pr_rep}, {"Qr_rep", &R::Qr_rep}, {"Ptr_rep", &R::Ptr_rep},
      {"Pu", &R::Pu}, {"Qu", &R::Qu}, {"Ptu", &R::Ptu},
      {"Pm", &R::Pm}, {"Qm", &R::Qm}, {"Ptm", &R::Ptm},
      {"uz", &R::uz}, {"sigma", &R::sigma}, {"V", &R::V},
      {"res_E", &R::res_E}, {"res_p", &R::res_p}, {"res_Et", &R::res_Et},
      {"tel_P", &R::tel_P}, {"tel_Q", &R::tel_Q}, {"tel_Pt", &R::tel_Pt},
      {"gap", &R::gap},
  };
  return cols;
}

std::vector<std::string> trajectory_header(PlantKind plant) {
  std::vector<std::string> h;
  for (const auto& c : trajectory_columns()) h.emplace_back(c.name);
  if (plant == PlantKind::rlc) {
    h[1] = "i1";
    h[2] = "v1";
  } else {
    h[1] = "omega1";
    h[2] = "Pm1";
  }
  return h;
}

// --- Simulator ---------------------------------------------------------------

Simulator::Simulator(Scenario scn) : scn_(std::move(scn)) {
  scn_.validate();
  plant_ = make_component(scn_);
  law_ = make_control_law(scn_.controller, *plant_, scn_.y_ref);
  if (aug_dim() > kMaxAugDim) {
    throw InvalidInput("augmented state too large");
  }
}

Simulator::~Simulator() = default;

int Simulator::aug_dim() const {
  return physical_dim() + internal_dim() + kAccCount;
}

AugVec Simulator::initial_state() const {
  AugVec X = AugVec::Zero(aug_dim());
  const Vec x0 = make_vec({scn_.x0[0], scn_.x0[1]});
  X.head(2) = x0;
  const LoadSample load0 = total_load(scn_.loads, 0.0);
  const Vec c0 = law_->initial_internal(x0, load0, reference_for(scn_, load0));
  X.segment(2, internal_dim()) = c0;
  return X;
}

std::vector<InteractionRate> Simulator::load_rates(double t,
                                                   const AugVec& X) const {
  const Vec x = X.head(2);
  const Vec c = X.segment(2, internal_dim());
  const LoadSample load = total_load(scn_.loads, t);
  const double u0 = law_->provisional_input(t, x, c, load);
  const Vec x_dot = plant_->rhs(x, u0, load.P);
  const BusVariable bus = plant_->bus_variable(x, x_dot);
  std::vector<InteractionRate> out;
  out.reserve(scn_.loads.size());
  for (const auto& profile : scn_.loads) {
    out.push_back(load_interaction(profile.evaluate(t), plant_->coupling(), bus));
  }
  return out;
}

Stage Simulator::evaluate(double t, const AugVec& X,
                          const std::vector<InteractionRate>* held) const {
  const int nc = internal_dim();
  const Vec x = X.head(2);
  const Vec c = X.segment(2, nc);

  Stage s;
  s.n_loads = static_cast<int>(scn_.loads.size());
  std::array<LoadSample, kMaxLoads> samples{};
  for (int k = 0; k < s.n_loads; ++k) {
    samples[k] = scn_.loads[k].evaluate(t);
    s.load.P += samples[k].P;
    s.load.P_dot += samples[k].P_dot;
    s.load.P_ddot += samples[k].P_ddot;
  }

  // Lift at the provisional input. For the RLC source the input is a state;
  // for the generator the lift does not depend on the valve.
  const double u0 = law_->provisional_input(t, x, c, s.load);
  const Jet jet0 = plant_->rhs_jet(x, u0, s.load.P, 0.0, s.load.P_dot);
  const Lift lift0 = lift(*plant_, x, jet0);

  s.bus = plant_->bus_variable(x, jet0.x_dot);
  for (int k = 0; k < s.n_loads; ++k) {
    s.loads_true[k] = load_interaction(samples[k], plant_->coupling(), s.bus);
  }
  if (held != nullptr) {
    s.r_rep = own_port_rate(*held);
  } else {
    s.r_rep = own_port_rate(
        std::span<const InteractionRate>(s.loads_true.data(), s.n_loads));
  }
  const double neighbor_qdot = -s.r_rep.Qdot;

  s.ref = reference_for(scn_, s.load);
  const ControlContext ctx{t, x, c, jet0, lift0, s.load, s.ref, neighbor_qdot};
  s.control = law_->evaluate(
      ctx, law_->energy_based() ? &scn_.disturbance : nullptr);

  const double u = s.control.u;
  const double u_dot = s.control.u_dot.value_or(0.0);
  s.jet = plant_->rhs_jet(x, u, s.load.P, u_dot, s.load.P_dot);
  s.lift = lift(*plant_, x, s.jet);
  s.pdot = energy_rate_derivative(*plant_, x, s.jet);

  const InteractionRate u_actual = interaction_rate(
      plant_->effort_flow(PortKind::control, x, s.jet, u, u_dot));
  s.r_true = interaction_rate(
      plant_->effort_flow(PortKind::bus, x, s.jet, u, u_dot));
  const InteractionRate injected{0.0, s.control.actuator_qdot, 0.0};
  s.u_nom = u_actual - injected;
  s.m = (s.r_true - s.r_rep) + injected;

  s.deriv = AugVec::Zero(aug_dim());
  s.deriv.head(2) = s.jet.x_dot;
  s.deriv.segment(2, nc) = s.control.internal_rate;
  const int a = 2 + nc;
  put(s.deriv, a + kPr, s.r_rep);
  put(s.deriv, a + kPu, s.u_nom);
  put(s.deriv, a + kPm, s.m);
  s.deriv[a + kD] = s.lift.dissipation.D;
  s.deriv[a + kDt] = s.lift.dissipation.Dt;
  s.deriv[a + kEt] = s.lift.xz.Et;
  s.deriv[a + kQC] = s.lift.qdot_C;
  return s;
}

SimResult Simulator::run() const {
  const auto wall0 = std::chrono::steady_clock::now();
  const double h = scn_.step;
  const long N = std::max(1L, std::lround(scn_.horizon / h));
  const int nc = internal_dim();
  const int a = 2 + nc;

  SimResult res;
  res.traj.plant = scn_.plant;
  res.traj.controller = scn_.controller.kind;
  res.traj.step = h;
  res.traj.record_every = scn_.record_every;
  res.traj.rows.reserve(static_cast<std::size_t>(N / scn_.record_every + 2));

  Exchange exchange(Coupling::star(plant_->coupling(),
                                   static_cast<int>(scn_.loads.size())),
                    scn_.delay_steps);

  AugVec X = initial_state();
  ResidualAccumulator acc;
  EnergyState prev_xz;
  InteractionVariable z_r, z_u, z_m;

  for (long n = 0; n <= N; ++n) {
    const double t = static_cast<double>(n) * h;
    const std::vector<InteractionRate>* held = nullptr;
    Stage s;
    try {
      if (!exchange.exact()) {
        exchange.publish(n, load_rates(t, X));
        held = &exchange.received(n);
      }
      s = evaluate(t, X, held);
    } catch (const SingularityError& e) {
      res.status = SimStatus::singularity;
      res.message = std::string(e.what()) + " at step " + std::to_string(n);
      res.failed_step = n;
      break;
    }

    TrajectoryRow row;
    row.t = t;
    row.x0 = X[0];
    row.x1 = X[1];
    row.y = plant_->output(X.head(2));
    row.y_ref = scn_.y_ref;
    row.u = s.control.u;
    row.u_dot = s.control.u_dot.value_or(kNaN);
    row.E = s.lift.xz.E;
    row.p = s.lift.xz.p;
    row.Et = s.lift.xz.Et;
    row.pdot = s.pdot;
    row.E_ref = s.ref.E_ref;
    row.p_ref = s.ref.p_ref;
    row.pdot_ref = s.ref.pdot_ref;
    row.D = s.lift.dissipation.D;
    row.Dt = s.lift.dissipation.Dt;
    row.qdot_C = s.lift.qdot_C;
    row.P_load = s.load.P;
    row.Pr = s.r_true.P;
    row.Qr = s.r_true.Qdot;
    row.Ptr = s.r_true.Pt;
    row.Pr_rep = s.r_rep.P;
    row.Qr_rep = s.r_rep.Qdot;
    row.Ptr_rep = s.r_rep.Pt;
    row.Pu = s.u_nom.P;
    row.Qu = s.u_nom.Qdot;
    row.Ptu = s.u_nom.Pt;
    row.Pm = s.m.P;
    row.Qm = s.m.Qdot;
    row.Ptm = s.m.Pt;
    row.uz = s.control.uz.value_or(kNaN);
    row.sigma = s.control.sigma.value_or(kNaN);
    const double e_E = row.E - row.E_ref;
    const double e_p = row.p - row.p_ref;
    if (scn_.controller.kind == ControllerKind::fblc) {
      row.V = 0.5 * (scn_.controller.fblc.K1 * e_E * e_E + e_p * e_p);
    } else if (scn_.controller.kind == ControllerKind::smc) {
      row.V = 0.5 * row.sigma * row.sigma;
    } else {
      row.V = kNaN;
    }
    const InteractionRate tel = s.r_true - s.r_rep;
    row.tel_P = tel.P;
    row.tel_Q = tel.Qdot;
    row.tel_Pt = tel.Pt;
    row.gap = std::abs(row.y - plant_->output_from_energy(row.E, row.P_load));

    if (n > 0) {
      // X holds the integrals over the step that just ended.
      const InteractionRate dr = get(X, a + kPr);
      const InteractionRate du = get(X, a + kPu);
      const InteractionRate dm = get(X, a + kPm);
      const double dD = X[a + kD], dDt = X[a + kDt];
      const double dEt = X[a + kEt], dQC = X[a + kQC];
      row.res_E = ((row.E - prev_xz.E) - (-dD + dr.P + du.P + dm.P)) / h;
      row.res_p = ((row.p - prev_xz.p) -
                   (4.0 * dEt + 2.0 * dQC - dr.Qdot - du.Qdot - dm.Qdot)) / h;
      row.res_Et = ((row.Et - prev_xz.Et) - (-dDt + dr.Pt + du.Pt + dm.Pt)) / h;
      acc.add_step(row);
      z_r.z += dr;
      z_u.z += du;
      z_m.z += dm;
    }
    acc.add_sample(row);
    prev_xz = s.lift.xz;

    if (n % scn_.record_every == 0 || n == N) res.traj.rows.push_back(row);
    if (n == N) break;

    // Integrals restart every step so that their increments keep full
    // precision over long runs.
    X.tail(kAccCount).setZero();
    try {
      X = rk4_step_from(X, t, h, s.deriv,
                        [&](double tt, const AugVec& XX) -> AugVec {
                          return evaluate(tt, XX, held).deriv;
                        });
    } catch (const Error& e) {
      const bool diverged = dynamic_cast<const DivergenceError*>(&e) != nullptr;
      if (!diverged && dynamic_cast<const SingularityError*>(&e) == nullptr) {
        throw;
      }
      res.status = diverged ? SimStatus::divergence : SimStatus::singularity;
      res.message = std::string(e.what()) + " during step " + std::to_string(n);
      res.failed_step = n;
      if (res.traj.rows.empty() || res.traj.rows.back().t != row.t) {
        res.traj.rows.push_back(row);
      }
      break;
    }
  }

  res.residuals = acc.report();
  res.z_r = z_r;
  res.z_u = z_u;
  res.z_m = z_m;
  res.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - wall0)
                         .count();
  return res;
}

SimResult simulate(const Scenario& scn) { return Simulator(scn).run(); }

std::function<Eigen::VectorXd(const Eigen::VectorXd&)> closed_loop_rhs(
    const Scenario& scn, double t) {
  auto sim = std::make_shared<Simulator>(scn);
  return [sim, t](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    const int n = 2 + sim->internal_dim();
    if (z.size() != n) throw InvalidInput("closed-loop state has wrong size");
    AugVec X = AugVec::Zero(sim->aug_dim());
    X.head(n) = z;
    const Stage s = sim->evaluate(t, X, nullptr);
    return s.deriv.head(n);
  };
}

EnergyState relift(const Scenario& scn, const TrajectoryRow& row) {
  const auto plant = make_component(scn);
  const LoadSample load = total_load(scn.loads, row.t);
  const Vec x = make_vec({row.x0, row.x1});
  const double u_dot = std::isnan(row.u_dot) ? 0.0 : row.u_dot;
  const Jet jet = plant->rhs_jet(x, row.u, load.P, u_dot, load.P_dot);
  return lift(*plant, x, jet).xz;
}

// --- Metrics -----------------------------------------------------------------

namespace {

// Time at which |y - y_ref| last leaves the band, interpolated between the
// last outside sample and the following inside sample.
std::pair<double, bool> settling(const std::vector<TrajectoryRow>& rows,
                                 double y_ref, double band) {
  long last_out = -1;
  for (long k = static_cast<long>(rows.size()) - 1; k >= 0; --k) {
    if (std::abs(rows[k].y - y_ref) > band) {
      last_out = k;
      break;
    }
  }
  if (last_out < 0) return {rows.front().t, true};
  if (last_out == static_cast<long>(rows.size()) - 1) {
    return {rows.back().t, false};
  }
  const auto& r0 = rows[last_out];
  const auto& r1 = rows[last_out + 1];
  const double d0 = std::abs(r0.y - y_ref) - band;
  const double d1 = std::abs(r1.y - y_ref) - band;
  const double frac = d0 / (d0 - d1);
  return {r0.t + frac * (r1.t - r0.t), true};
}

}  // namespace

Metrics compute_metrics(const Trajectory& traj, double y_ref,
                        double window_fraction) {
  Metrics m;
  const auto& rows = traj.rows;
  if (rows.empty()) return m;
  const double t0 = rows.front().t, t1 = rows.back().t;
  const double t_win = t1 - window_fraction * (t1 - t0);

  double err_sum = 0.0, u_sum = 0.0;
  long count = 0;
  for (const auto& r : rows) {
    if (r.t + 1e-12 * std::max(1.0, std::abs(t1)) < t_win) continue;
    err_sum += std::abs(r.y - y_ref);
    u_sum += r.u;
    ++count;
  }
  m.steady_state_error = count > 0 ? err_sum / static_cast<double>(count) : 0;
  m.u_ss = count > 0 ? u_sum / static_cast<double>(count) : rows.back().u;

  const double y0 = rows.front().y;
  double span = std::abs(y_ref - y0);
  const double dir = y_ref >= y0 ? 1.0 : -1.0;
  if (!(span > 1e-12 * std::abs(y_ref))) span = std::abs(y_ref);
  double peak = 0.0;
  for (const auto& r : rows) peak = std::max(peak, dir * (r.y - y_ref));
  m.overshoot = peak / span;

  auto [ts, ok] = settling(rows, y_ref, 0.02 * std::abs(y_ref));
  m.settling_time_2pct = ts - t0;
  m.settled = ok;
  auto [ts2, ok2] = settling(rows, y_ref, 0.02 * span);
  m.settling_time_2pct_span = ts2 - t0;
  m.settled_span = ok2;

  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double dt = rows[k].t - rows[k - 1].t;
    const double a = rows[k - 1].u - m.u_ss, b = rows[k].u - m.u_ss;
    m.control_effort_l2 += 0.5 * dt * (a * a + b * b);
    m.control_total_variation += std::abs(rows[k].u - rows[k - 1].u);
  }
  m.final_y = rows.back().y;
  m.final_u = rows.back().u;
  m.final_state = {rows.back().x0, rows.back().x1};
  return m;
}

ResidualReport residual_monitors(const Trajectory& traj) {
  ResidualAccumulator acc;
  for (std::size_t k = 0; k < traj.rows.size(); ++k) {
    if (k > 0) acc.add_step(traj.rows[k]);
    acc.add_sample(traj.rows[k]);
  }
  return acc.report();
}

}  // namespace enspace
