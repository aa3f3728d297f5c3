#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "enspace/errors.hpp"
#include "enspace/rk4.hpp"
#include "enspace/sim_engine.hpp"

using namespace enspace;

namespace {

Scenario rlc_scenario(ControllerKind kind, double horizon) {
  Scenario s;
  s.loads = {LoadProfile::constant(1000.0)};
  s.controller.kind = kind;
  s.horizon = horizon;
  return s;
}

Scenario gen_scenario(ControllerKind kind, double horizon, double step) {
  Scenario s;
  s.plant = PlantKind::generator;
  s.x0 = {373.23, 1000.0};
  s.y_ref = 377.0;
  s.loads = {LoadProfile::sigmoid_step(1000.0, 1000.0, 2.0, 1.0)};
  s.controller.kind = kind;
  s.step = step;
  s.horizon = horizon;
  return s;
}

// Droop equilibrium from the quadratic D w^2 + (Kt/r) w - (Kt y_ref/r - P) = 0.
double droop_speed(double P) {
  const GenParams g;
  const DroopGains d;
  const double a = g.D1, b = g.Kt / d.r, c = -(g.Kt * 377.0 / d.r - P);
  return (-b + std::sqrt(b * b - 4 * a * c)) / (2 * a);
}

}  // namespace

TEST_CASE("RK4 step") {
  const double x = rk4_step(1.0, 0.0, 0.1, [](double, double v) { return -v; });
  CHECK(x == doctest::Approx(0.9048375).epsilon(1e-15));
  CHECK(std::abs(x - std::exp(-0.1)) < 1e-7);
  CHECK(rk4_step(3.5, 0.0, 0.1, [](double, double) { return 0.0; }) == 3.5);
  try {
    rk4_step(1.0, 2.0, 0.1, [](double t, double v) {
      return t > 2.01 ? std::numeric_limits<double>::quiet_NaN() : v;
    });
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.stage() == 2);
  }
}

TEST_CASE("proportional control settles the RLC bus") {
  const SimResult res = simulate(rlc_scenario(ControllerKind::proportional, 5.0));
  REQUIRE(res.ok());
  CHECK(std::abs(res.traj.rows.back().y - 80.0) < 0.005 * 80.0);
}

TEST_CASE("zero-gain law with no load stays at rest") {
  Scenario s = rlc_scenario(ControllerKind::proportional, 0.2);
  s.loads = {LoadProfile::constant(0.0)};
  s.controller.proportional = {0.0, 0.0};
  s.x0 = {0.0, 80.0};
  const SimResult res = simulate(s);
  REQUIRE(res.ok());
  CHECK(res.traj.rows.front().u == 80.0);
  CHECK(std::abs(res.traj.rows.back().x0) < 1e-12);
  CHECK(res.traj.rows.back().x1 == doctest::Approx(80.0).epsilon(1e-14));
}

TEST_CASE("droop equilibrium is held") {
  Scenario s = gen_scenario(ControllerKind::droop, 5.0, 1e-3);
  s.loads = {LoadProfile::constant(2000.0)};
  const double w = droop_speed(2000.0);
  const double a = -(w - 377.0) / 0.2;
  s.x0 = {w, 1000.0 * a};
  s.controller.initial_input = a;
  const SimResult res = simulate(s);
  REQUIRE(res.ok());
  CHECK(res.traj.rows.back().x0 == doctest::Approx(w).epsilon(1e-12));
  CHECK(res.traj.rows.back().u == doctest::Approx(a).epsilon(1e-9));
}

TEST_CASE("identical scenarios give bit-identical trajectories") {
  const Scenario s = gen_scenario(ControllerKind::smc, 2.0, 1e-3);
  const SimResult a = simulate(s), b = simulate(s);
  REQUIRE(a.traj.rows.size() == b.traj.rows.size());
  bool same = true;
  for (std::size_t k = 0; k < a.traj.rows.size(); ++k) {
    for (const auto& col : trajectory_columns()) {
      const double x = a.traj.rows[k].*(col.field);
      const double y = b.traj.rows[k].*(col.field);
      same = same && std::memcmp(&x, &y, sizeof x) == 0;
    }
  }
  CHECK(same);
}

TEST_CASE("re-lifting recorded samples reproduces the energy columns") {
  Scenario s = rlc_scenario(ControllerKind::fblc, 0.05);
  s.loads = {LoadProfile::sigmoid_step(1000.0, 300.0, 50.0, 0.02)};
  const SimResult res = simulate(s);
  REQUIRE(res.ok());
  for (std::size_t k = 0; k < res.traj.rows.size(); k += 37) {
    const auto& r = res.traj.rows[k];
    const EnergyState xz = relift(s, r);
    CHECK(xz.E == r.E);
    CHECK(xz.p == r.p);
    CHECK(xz.Et == r.Et);
  }
}

TEST_CASE("exact exchange keeps the sum-zero residual at round-off") {
  const SimResult res = simulate(gen_scenario(ControllerKind::fblc, 3.0, 1e-3));
  REQUIRE(res.ok());
  CHECK(res.residuals.tellegen_P_relative < 1e-12);
}

TEST_CASE("balance residuals shrink at fourth order") {
  // Smooth generator run: residuals per unit time against step halving.
  double prev = 0.0;
  for (double h : {4e-3, 2e-3, 1e-3}) {
    const SimResult res = simulate(gen_scenario(ControllerKind::fblc, 4.0, h));
    REQUIRE(res.ok());
    const double worst = std::max(res.residuals.energy.max_abs,
                                  res.residuals.tangent.max_abs);
    if (prev > 0.0) {
      const double order = std::log2(prev / worst);
      CHECK(order > 3.5);
    }
    prev = worst;
  }
}

TEST_CASE("terminal state converges at fourth order") {
  // Droop loop: every state is smooth. (Under the energy laws the speed is
  // pinned by the linear error dynamics and hits round-off immediately.)
  auto terminal = [](double h) {
    const SimResult res = simulate(gen_scenario(ControllerKind::droop, 2.0, h));
    REQUIRE(res.ok());
    return res.traj.rows.back();
  };
  const auto ref = terminal(1e-2 / 16.0);
  const double e1 = std::abs(terminal(2e-2).x0 - ref.x0);
  const double e2 = std::abs(terminal(1e-2).x0 - ref.x0);
  CHECK(std::log2(e1 / e2) > 3.5);
}

TEST_CASE("hard switching concentrates the p residual in the sliding phase") {
  Scenario s = rlc_scenario(ControllerKind::smc, 3.0);
  s.controller.smc.eps_bl = 0.0;
  const SimResult res = simulate(s);
  REQUIRE(res.ok());
  const auto& rows = res.traj.rows;
  // First sign change of sigma: from here on the switch fires inside steps.
  double t_switch = -1.0;
  for (std::size_t k = 1; k < rows.size() && t_switch < 0; ++k) {
    if ((rows[k].sigma > 0) != (rows[k - 1].sigma > 0)) t_switch = rows[k - 1].t;
  }
  REQUIRE(t_switch > 0.0);
  // Smooth level: before the switch, once the fast initial mode has decayed.
  double smooth = 0.0, after = 0.0;
  for (const auto& r : rows) {
    if (r.t >= 0.05 && r.t < t_switch) smooth = std::max(smooth, std::abs(r.res_p));
    if (r.t > t_switch) after = std::max(after, std::abs(r.res_p));
  }
  CHECK(after > 100.0 * smooth);
}

TEST_CASE("singularities stop the run and keep the partial trajectory") {
  // A governor too weak for the load lets the rotor run down to the guard.
  Scenario s = gen_scenario(ControllerKind::droop, 100.0, 1e-3);
  s.gen.Kt = 1.0;
  s.loads = {LoadProfile::constant(1e4)};
  const SimResult res = simulate(s);
  CHECK(res.status == SimStatus::singularity);
  CHECK(res.failed_step > 0);
  CHECK(res.traj.rows.size() == static_cast<std::size_t>(res.failed_step) + 1);
  CHECK(res.message.find("omega1") != std::string::npos);
}

TEST_CASE("scenario validation") {
  Scenario s = rlc_scenario(ControllerKind::fblc, 1.0);
  s.step = 0.0;
  CHECK_THROWS_AS(s.validate(), InvalidInput);
  s = rlc_scenario(ControllerKind::fblc, 1.0);
  s.record_every = 0;
  CHECK_THROWS_AS(s.validate(), InvalidInput);
  s = rlc_scenario(ControllerKind::fblc, 1.0);
  s.delay_steps = -1;
  CHECK_THROWS_AS(s.validate(), InvalidInput);
  s = rlc_scenario(ControllerKind::proportional, 1.0);
  s.disturbance.mode = DisturbanceMode::signal;
  CHECK_THROWS_AS(s.validate(), InvalidInput);
}

TEST_CASE("metrics") {
  Trajectory traj;
  traj.step = 1e-3;
  SUBCASE("constant trajectory at the reference") {
    for (int k = 0; k <= 1000; ++k) {
      TrajectoryRow r;
      r.t = k * 1e-3;
      r.y = 80.0;
      r.u = 81.25;
      traj.rows.push_back(r);
    }
    const Metrics m = compute_metrics(traj, 80.0, 0.1);
    CHECK(m.steady_state_error == 0.0);
    CHECK(m.overshoot == 0.0);
    CHECK(m.settling_time_2pct == 0.0);
    CHECK(m.control_effort_l2 == 0.0);
    CHECK(m.control_total_variation == 0.0);
  }
  SUBCASE("exponential approach settles at ln 5") {
    for (int k = 0; k <= 5000; ++k) {
      TrajectoryRow r;
      r.t = k * 1e-3;
      r.y = 80.0 * (1.0 + 0.1 * std::exp(-r.t));
      r.u = r.y;
      traj.rows.push_back(r);
    }
    const Metrics m = compute_metrics(traj, 80.0, 0.1);
    CHECK(m.settling_time_2pct == doctest::Approx(std::log(5.0)).epsilon(1e-6));
    CHECK(m.settled);
    CHECK(m.overshoot == 0.0);
    // Total variation of a monotone signal is its net change.
    CHECK(m.control_total_variation ==
          doctest::Approx(traj.rows.front().u - traj.rows.back().u));
  }
}

TEST_CASE("droop leaves an offset that the energy law removes") {
  const Scenario droop = gen_scenario(ControllerKind::droop, 40.0, 1e-3);
  const Scenario fblc = gen_scenario(ControllerKind::fblc, 40.0, 1e-3);
  const SimResult a = simulate(droop), b = simulate(fblc);
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  const Metrics ma = compute_metrics(a.traj, 377.0, 0.1);
  const Metrics mb = compute_metrics(b.traj, 377.0, 0.1);
  CHECK(ma.steady_state_error > 0.1);
  CHECK(mb.steady_state_error < 1e-3 * 377.0);
}
