#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>

#include "enspace/energy_core.hpp"
#include "enspace/errors.hpp"

using namespace enspace;

namespace {

Mat diag2(double a, double b) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// Plain-arithmetic quadratic form, no Eigen products involved.
double quad_form(const std::array<double, 2>& x, const std::array<double, 4>& M) {
  return 0.5 * (x[0] * (M[0] * x[0] + M[1] * x[1]) +
                x[1] * (M[2] * x[0] + M[3] * x[1]));
}

const EnergyLiftParams kRlc =
    EnergyLiftParams::constant(diag2(1.12e-3, 6.8e-3), diag2(0.2, 0.0));
const EnergyLiftParams kGen =
    EnergyLiftParams::constant(diag2(10.0, 0.0), diag2(0.02, 0.0));

}  // namespace

TEST_CASE("stored energy of the RLC equilibrium") {
  const double E = stored_energy(vec2(12.5, 80.0), kRlc);
  CHECK(E == doctest::Approx(quad_form({12.5, 80.0}, {1.12e-3, 0, 0, 6.8e-3}))
                 .epsilon(1e-15));
  CHECK(E == doctest::Approx(21.8475).epsilon(1e-12));
  CHECK(stored_energy(vec2(0.0, 0.0), kRlc) == 0.0);
}

TEST_CASE("stored energy of the rotor at nominal speed") {
  const double E = stored_energy(vec2(377.0, 2421.29), kGen);
  CHECK(E == doctest::Approx(0.5 * 10.0 * 377.0 * 377.0).epsilon(1e-15));
  CHECK(E == doctest::Approx(710645.0).epsilon(1e-12));
}

TEST_CASE("stored energy is homogeneous of degree two") {
  const Vec x = vec2(3.1, -7.4);
  for (double c : {-2.0, 0.5, 3.0}) {
    CHECK(stored_energy(c * x, kRlc) ==
          doctest::Approx(c * c * stored_energy(x, kRlc)).epsilon(1e-14));
  }
}

TEST_CASE("stored energy rejects non-finite states") {
  CHECK_THROWS_AS(stored_energy(vec2(std::nan(""), 1.0), kRlc), InvalidInput);
  CHECK_THROWS_AS(
      stored_energy(vec2(std::numeric_limits<double>::infinity(), 1.0), kRlc),
      InvalidInput);
}

TEST_CASE("tangent energy vanishes at rest") {
  CHECK(tangent_energy(vec2(0.0, 0.0), kRlc, vec2(12.5, 80.0)) == 0.0);
  CHECK(tangent_energy(vec2(2.0, -1.0), kRlc, vec2(12.5, 80.0)) ==
        doctest::Approx(quad_form({2.0, -1.0}, {1.12e-3, 0, 0, 6.8e-3})));
}

TEST_CASE("dissipation equals the physical loss") {
  CHECK(dissipation(vec2(12.5, 80.0), kRlc) ==
        doctest::Approx(0.1 * 12.5 * 12.5).epsilon(1e-14));
  CHECK(dissipation(vec2(12.5, 80.0), kRlc) == doctest::Approx(15.625));
  CHECK(dissipation(vec2(0.0, 0.0), kRlc) == 0.0);
  CHECK(dissipation(vec2(377.0, 2421.29), kGen) ==
        doctest::Approx(1421.29).epsilon(1e-12));
  CHECK(tangent_dissipation(vec2(3.0, 5.0), kRlc, vec2(0.0, 0.0)) ==
        doctest::Approx(0.1 * 9.0));
}

TEST_CASE("time constants") {
  SUBCASE("rotor time constant is independent of speed") {
    for (double w : {100.0, 377.0, 1234.5}) {
      const double E = stored_energy(vec2(w, 0.0), kGen);
      const double D = dissipation(vec2(w, 0.0), kGen);
      const TimeConstants tc = time_constants(E, D, 1.0, 1.0);
      CHECK(tc.tau == doctest::Approx(10.0 / (2.0 * 0.01)).epsilon(1e-13));
    }
  }
  SUBCASE("ratio form") {
    CHECK(time_constants(7.0 * 3.0, 3.0, 4.0, 2.0).tau == doctest::Approx(7.0));
    CHECK(time_constants(21.8475, 15.625, 1.0, 1.0).tau ==
          doctest::Approx(1.39824).epsilon(1e-12));
  }
  SUBCASE("degenerate denominators are named") {
    try {
      time_constants(1.0, 0.0, 1.0, 1.0);
      FAIL("expected an error");
    } catch (const UndefinedTimeConstant& e) {
      CHECK(e.denominator() == "D");
    }
    try {
      time_constants(1.0, 1.0, 1.0, 1e-13);
      FAIL("expected an error");
    } catch (const UndefinedTimeConstant& e) {
      CHECK(e.denominator() == "D_t");
    }
  }
}

TEST_CASE("interaction rate from an effort/flow sample") {
  const InteractionRate r = interaction_rate({2.0, 3.0, 5.0, 7.0});
  CHECK(r.P == 6.0);
  CHECK(r.Qdot == 2.0 * 7.0 - 3.0 * 5.0);
  CHECK(r.Pt == 35.0);

  const InteractionRate load = interaction_rate({80.0, 12.5, 0.0, 0.0});
  CHECK(load == InteractionRate{1000.0, 0.0, 0.0});

  // e = f and e_dot = f_dot: the antisymmetric part cancels.
  CHECK(interaction_rate({4.5, 4.5, -1.5, -1.5}).Qdot == 0.0);
}

TEST_CASE("energy dynamics") {
  SUBCASE("pure dissipation") {
    const EnergyState xz{6.0, 0.0, 0.0};
    const EnergyRate d =
        energy_rhs(xz, TimeConstants{2.0, 1.0}, 0.0, {}, {}, {});
    CHECK(d.E_dot == doctest::Approx(-3.0));
    CHECK(d.p_dot == 0.0);
    CHECK(d.Et_dot == 0.0);
  }
  SUBCASE("balanced equilibrium is a fixed point") {
    const EnergyState xz{10.0, 0.0, 0.0};
    const TimeConstants tc{2.0, 1.0};
    const InteractionRate r{2.0, 1.5, 0.0}, u{2.0, 0.5, 0.0}, m{1.0, 0.0, 0.0};
    // qdot_C chosen so that 2 Qdot_C = sum of Qdot.
    const EnergyRate d = energy_rhs(xz, tc, 1.0, r, u, m);
    CHECK(d.E_dot == doctest::Approx(0.0));
    CHECK(d.p_dot == doctest::Approx(0.0));
    CHECK(d.Et_dot == doctest::Approx(0.0));
  }
  SUBCASE("dissipation form matches the time-constant form") {
    const EnergyState xz{21.8475, 3.0, 40.0};
    const DissipationRates dr{15.625, 8.0};
    const TimeConstants tc = time_constants(xz.E, dr.D, xz.Et, dr.Dt);
    const InteractionRate r{-1000.0, 4.0, 2.0}, u{1015.0, -2.0, 7.0};
    const EnergyRate a = energy_rhs(xz, tc, 0.3, r, u, {});
    const EnergyRate b = energy_rhs(xz, dr, 0.3, r, u, {});
    CHECK(a.E_dot == doctest::Approx(b.E_dot).epsilon(1e-13));
    CHECK(a.p_dot == doctest::Approx(b.p_dot).epsilon(1e-13));
    CHECK(a.Et_dot == doctest::Approx(b.Et_dot).epsilon(1e-13));
    // Independent evaluation of the three balances.
    CHECK(b.E_dot == doctest::Approx(-15.625 - 1000.0 + 1015.0));
    CHECK(b.p_dot == doctest::Approx(4.0 * 40.0 + 2.0 * 0.3 - (4.0 - 2.0)));
    CHECK(b.Et_dot == doctest::Approx(-8.0 + 2.0 + 7.0));
  }
}

TEST_CASE("sum-zero residual") {
  const std::array<InteractionRate, 1> neighbor{InteractionRate{-5.0, -1.0, 0.0}};
  CHECK(tellegen_residual(neighbor, {5.0, 1.0, 0.0}) == InteractionRate{});
  const std::array<InteractionRate, 2> two{InteractionRate{1.0, 2.0, 3.0},
                                           InteractionRate{0.5, -1.0, 0.0}};
  const InteractionRate res = tellegen_residual(two, {-1.5, -1.0, -3.0});
  CHECK(res == InteractionRate{});
  CHECK(tellegen_residual(two, {}) == InteractionRate{1.5, 1.0, 3.0});
}
