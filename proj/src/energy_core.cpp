#include "enspace/energy_core.hpp"

#include <cmath>

#include "enspace/errors.hpp"

namespace enspace {
namespace {

void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) {
    throw InvalidInput(std::string("non-finite ") + what);
  }
}

double half_quadratic(const Vec& v, const Mat& M) {
  return 0.5 * v.dot(M * v);
}

}  // namespace

EnergyLiftParams EnergyLiftParams::constant(const Mat& H, const Mat& B) {
  return {[H](const Vec&) { return H; }, [B](const Vec&) { return B; }};
}

double stored_energy(const Vec& x, const EnergyLiftParams& params) {
  require_finite(x, "state");
  return half_quadratic(x, params.H(x));
}

double tangent_energy(const Vec& x_dot, const EnergyLiftParams& params,
                      const Vec& x) {
  require_finite(x, "state");
  require_finite(x_dot, "state derivative");
  return half_quadratic(x_dot, params.H(x));
}

double dissipation(const Vec& x, const EnergyLiftParams& params) {
  require_finite(x, "state");
  return half_quadratic(x, params.B(x));
}

double tangent_dissipation(const Vec& x_dot, const EnergyLiftParams& params,
                           const Vec& x) {
  require_finite(x, "state");
  require_finite(x_dot, "state derivative");
  return half_quadratic(x_dot, params.B(x));
}

TimeConstants time_constants(double E, double D, double Et, double Dt,
                             double eps_D) {
  if (!(D > eps_D)) throw UndefinedTimeConstant("D");
  if (!(Dt > eps_D)) throw UndefinedTimeConstant("D_t");
  return {E / D, Et / Dt};
}

InteractionRate interaction_rate(const EffortFlowSample& s) {
  return {s.e * s.f, s.e * s.f_dot - s.f * s.e_dot, s.e_dot * s.f_dot};
}

EnergyRate energy_rhs(const EnergyState& xz, const TimeConstants& tc,
                      double qdot_C, const InteractionRate& r,
                      const InteractionRate& u, const InteractionRate& m) {
  if (!(tc.tau > 0.0) || !std::isfinite(tc.tau)) {
    throw UndefinedTimeConstant("D");
  }
  if (!(tc.tau_t > 0.0) || !std::isfinite(tc.tau_t)) {
    throw UndefinedTimeConstant("D_t");
  }
  return energy_rhs(xz, DissipationRates{xz.E / tc.tau, xz.Et / tc.tau_t},
                    qdot_C, r, u, m);
}

EnergyRate energy_rhs(const EnergyState& xz, const DissipationRates& d,
                      double qdot_C, const InteractionRate& r,
                      const InteractionRate& u, const InteractionRate& m) {
  return {
      -d.D + r.P + u.P + m.P,
      4.0 * xz.Et + 2.0 * qdot_C - r.Qdot - u.Qdot - m.Qdot,
      -d.Dt + r.Pt + u.Pt + m.Pt,
  };
}

InteractionRate tellegen_residual(std::span<const InteractionRate> rates,
                                  const InteractionRate& own) {
  InteractionRate sum = own;
  for (const auto& r : rates) sum += r;
  return sum;
}

}  // namespace enspace
