#pragma once

// Energy-space definitions: stored and tangent energy, dissipation, time
// constants, port interaction rates and the third-order energy dynamics.

#include <functional>
#include <span>

#include <Eigen/Core>

namespace enspace {

/// Physical state vectors are tiny (two entries for both shipped components),
/// so they live on the stack with a small compile-time capacity.
inline constexpr int kMaxStateDim = 4;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor,
                          kMaxStateDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                          Eigen::ColMajor, kMaxStateDim, kMaxStateDim>;

/// Default dissipation floor below which time constants are undefined.
inline constexpr double kEpsD = 1e-12;

struct EffortFlowSample {
  double e = 0.0;
  double f = 0.0;
  double e_dot = 0.0;
  double f_dot = 0.0;
};

/// The lifted state (E, p, E_t).
struct EnergyState {
  double E = 0.0;
  double p = 0.0;
  double Et = 0.0;
};

/// Time derivative of an EnergyState.
struct EnergyRate {
  double E_dot = 0.0;
  double p_dot = 0.0;
  double Et_dot = 0.0;
};

struct TimeConstants {
  double tau = 0.0;
  double tau_t = 0.0;
};

/// D and D_t, used directly in place of E/tau and E_t/tau_t.
struct DissipationRates {
  double D = 0.0;
  double Dt = 0.0;
};

/// (P, Qdot, P_t) flowing into a component through one port.
struct InteractionRate {
  double P = 0.0;
  double Qdot = 0.0;
  double Pt = 0.0;

  InteractionRate& operator+=(const InteractionRate& o) {
    P += o.P;
    Qdot += o.Qdot;
    Pt += o.Pt;
    return *this;
  }
  InteractionRate& operator-=(const InteractionRate& o) {
    P -= o.P;
    Qdot -= o.Qdot;
    Pt -= o.Pt;
    return *this;
  }
  friend InteractionRate operator+(InteractionRate a, const InteractionRate& b) {
    return a += b;
  }
  friend InteractionRate operator-(InteractionRate a, const InteractionRate& b) {
    return a -= b;
  }
  friend InteractionRate operator-(const InteractionRate& a) {
    return {-a.P, -a.Qdot, -a.Pt};
  }
  friend InteractionRate operator*(double s, const InteractionRate& a) {
    return {s * a.P, s * a.Qdot, s * a.Pt};
  }
  friend bool operator==(const InteractionRate&, const InteractionRate&) = default;
};

/// Running integral of an InteractionRate since t0. The simulator advances
/// `z` with the same RK4 step as the physical state.
struct InteractionVariable {
  InteractionRate z;
  double t0 = 0.0;
};

/// H(x) and B(x). Both shipped components use constant matrices.
struct EnergyLiftParams {
  std::function<Mat(const Vec&)> H;
  std::function<Mat(const Vec&)> B;

  static EnergyLiftParams constant(const Mat& H, const Mat& B);
};

/// E = 1/2 x^T H(x) x.
double stored_energy(const Vec& x, const EnergyLiftParams& params);

/// E_t = 1/2 xdot^T H(x) xdot.
double tangent_energy(const Vec& x_dot, const EnergyLiftParams& params,
                      const Vec& x);

/// D = 1/2 x^T B(x) x.
double dissipation(const Vec& x, const EnergyLiftParams& params);

/// D_t = 1/2 xdot^T B(x) xdot.
double tangent_dissipation(const Vec& x_dot, const EnergyLiftParams& params,
                           const Vec& x);

/// tau = E/D and tau_t = E_t/D_t. Throws UndefinedTimeConstant naming the
/// failing denominator when D or D_t is at or below eps_D.
TimeConstants time_constants(double E, double D, double Et, double Dt,
                             double eps_D = kEpsD);

/// (P, Qdot, P_t) = (e f, e fdot - f edot, edot fdot).
InteractionRate interaction_rate(const EffortFlowSample& s);

/// Energy dynamics in ratio form:
///   Edot  = -E/tau    + P^r + P^u + P^m
///   pdot  = 4 E_t + 2 Qdot_C - Qdot^r - Qdot^u - Qdot^m
///   Etdot = -E_t/tau_t + P_t^r + P_t^u + P_t^m
/// Throws UndefinedTimeConstant if tau or tau_t is not a positive finite
/// number.
EnergyRate energy_rhs(const EnergyState& xz, const TimeConstants& tc,
                      double qdot_C, const InteractionRate& r,
                      const InteractionRate& u, const InteractionRate& m);

/// Same dynamics with E/tau and E_t/tau_t replaced by D and D_t. This form
/// stays defined when the component has no dissipation.
EnergyRate energy_rhs(const EnergyState& xz, const DissipationRates& d,
                      double qdot_C, const InteractionRate& r,
                      const InteractionRate& u, const InteractionRate& m);

/// own + sum(rates). Zero when the sum-zero interconnection constraint holds.
InteractionRate tellegen_residual(std::span<const InteractionRate> rates,
                                  const InteractionRate& own);

}  // namespace enspace
