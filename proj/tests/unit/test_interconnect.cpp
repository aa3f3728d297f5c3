#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "enspace/errors.hpp"
#include "enspace/interconnect.hpp"
#include "enspace/sim_engine.hpp"

using namespace enspace;

TEST_CASE("star coupling") {
  const Coupling c = Coupling::star(CouplingKind::bus_voltage, 2);
  CHECK(c.load_count() == 2);
  CHECK(c.members == std::vector<int>{0, 1, 2});
  CHECK(c.owner == 0);
  CHECK_THROWS_AS(Coupling::star(CouplingKind::bus_voltage, -1), InvalidInput);
}

TEST_CASE("exact exchange hands over the load triple") {
  Exchange ex(Coupling::star(CouplingKind::bus_voltage, 1), 0);
  CHECK(ex.exact());
  ex.publish(0, {InteractionRate{1000.0, 2.0, 3.0}});
  CHECK(ex.received(0).front() == InteractionRate{1000.0, 2.0, 3.0});
  CHECK(own_port_rate(ex.received(0)) == InteractionRate{-1000.0, -2.0, -3.0});
}

TEST_CASE("own port rate") {
  const std::vector<InteractionRate> one{{1000.0, 0.0, 0.0}};
  CHECK(own_port_rate(one) == InteractionRate{-1000.0, 0.0, 0.0});
  CHECK(own_port_rate(std::vector<InteractionRate>{}) == InteractionRate{});
}

TEST_CASE("mailbox delay") {
  Mailbox box(1, 2);
  for (long k = 0; k < 8; ++k) {
    box.publish(k, {InteractionRate{static_cast<double>(k), 0.0, 0.0}});
    const long expect = std::max(0L, k - 2);
    CHECK(box.payload_step(k) == expect);
    CHECK(box.deliver(k).front().P == static_cast<double>(expect));
  }
}

TEST_CASE("mailbox scheduling errors") {
  Mailbox box(1, 1);
  CHECK_THROWS_AS(box.deliver(0), ScheduleError);
  box.publish(0, {InteractionRate{}});
  CHECK_THROWS_AS(box.publish(2, {InteractionRate{}}), ScheduleError);
  CHECK_THROWS_AS(box.publish(1, {}), ScheduleError);
  CHECK_THROWS_AS(Mailbox(1, -1), InvalidInput);
  // A payload that has fallen out of the window is no longer deliverable.
  box.publish(1, {InteractionRate{}});
  box.publish(2, {InteractionRate{}});
  box.publish(3, {InteractionRate{}});
  CHECK_THROWS_AS(box.deliver(1), ScheduleError);
}

TEST_CASE("disturbance channel") {
  DisturbanceChannel zero;
  CHECK_FALSE(zero.active());
  CHECK(disturbance_rate(zero, 1.0, 3.0, {}, {}) == InteractionRate{});

  DisturbanceChannel sig;
  sig.mode = DisturbanceMode::signal;
  sig.amplitude = 0.5;
  sig.omega = 1.0;
  for (double t : {0.0, 0.3, 2.0, 7.5}) {
    CHECK(sig.qdot(t, 99.0) == 0.5 * std::sin(t));
  }

  DisturbanceChannel fb;
  fb.mode = DisturbanceMode::error_feedback;
  fb.gain = 12.0;
  CHECK(fb.qdot(0.0, 2.0) == -24.0);

  // Report mismatch enters the exogenous channel.
  const InteractionRate m =
      disturbance_rate(sig, 0.0, 0.0, {-1000.0, 4.0, 1.0}, {-990.0, 3.0, 1.0});
  CHECK(m == InteractionRate{-10.0, 1.0, 0.0});
}

TEST_CASE("delayed reports: exogenous rate is the load-rate increment") {
  Scenario scn;
  scn.plant = PlantKind::generator;
  scn.x0 = {373.23, 1000.0};
  scn.y_ref = 377.0;
  scn.loads = {LoadProfile::sigmoid_step(1000.0, 1000.0, 2.0, 1.0)};
  scn.controller.kind = ControllerKind::fblc;
  scn.delay_steps = 2;
  scn.step = 1e-3;
  scn.horizon = 2.0;
  const SimResult res = simulate(scn);
  REQUIRE(res.ok());
  const auto& rows = res.traj.rows;

  double scale_P = 0.0, scale_Q = 0.0, scale_Pt = 0.0;
  for (const auto& r : rows) {
    scale_P = std::max(scale_P, std::abs(r.Pr));
    scale_Q = std::max(scale_Q, std::abs(r.Qr));
    scale_Pt = std::max(scale_Pt, std::abs(r.Ptr));
  }
  double worst = 0.0, largest_m = 0.0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& past = rows[k < 2 ? 0 : k - 2];
    const auto& r = rows[k];
    worst = std::max({worst,
                      std::abs(r.Pm - (r.Pr - past.Pr)) / scale_P,
                      std::abs(r.Qm - (r.Qr - past.Qr)) / scale_Q,
                      std::abs(r.Ptm - (r.Ptr - past.Ptr)) / scale_Pt});
    largest_m = std::max(largest_m, std::abs(r.Qm));
  }
  CHECK(worst < 1e-9);
  CHECK(largest_m > 0.0);  // the channel is actually exercised
}
