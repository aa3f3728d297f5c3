#include "enspace/components.hpp"

#include <cmath>
#include <limits>

#include "enspace/errors.hpp"

namespace enspace {

Vec make_vec(std::initializer_list<double> values) {
  if (values.size() > static_cast<std::size_t>(kMaxStateDim)) {
    throw InvalidInput("state vector too long");
  }
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index k = 0;
  for (double x : values) v[k++] = x;
  return v;
}

Lift lift(const PhysComponent& c, const Vec& x, const Jet& jet) {
  const auto& params = c.lift_params();
  const Mat H = params.H(x);
  const Mat B = params.B(x);
  Lift out;
  out.xz.E = 0.5 * x.dot(H * x);
  out.xz.p = x.dot(H * jet.x_dot);
  out.xz.Et = 0.5 * jet.x_dot.dot(H * jet.x_dot);
  out.dissipation.D = 0.5 * x.dot(B * x);
  out.dissipation.Dt = 0.5 * jet.x_dot.dot(B * jet.x_dot);
  out.qdot_C = c.qdot_C(x, jet.x_dot, jet.x_ddot);
  return out;
}

double energy_rate_derivative(const PhysComponent& c, const Vec& x,
                              const Jet& jet) {
  const Mat H = c.lift_params().H(x);
  return jet.x_dot.dot(H * jet.x_dot) + x.dot(H * jet.x_ddot);
}

// --- RLC --------------------------------------------------------------------

RlcComponent::RlcComponent(const RlcParams& p) : p_(p) {
  if (!(p.R1 > 0.0) || !(p.L1 > 0.0) || !(p.C1 > 0.0)) {
    throw InvalidInput("RLC parameters must be strictly positive");
  }
  Mat H = Mat::Zero(2, 2);
  H(0, 0) = p.L1;
  H(1, 1) = p.C1;
  // D = R i^2, the resistor loss.
  Mat B = Mat::Zero(2, 2);
  B(0, 0) = 2.0 * p.R1;
  lift_ = EnergyLiftParams::constant(H, B);
}

void RlcComponent::guard(double v) const {
  if (!(std::abs(v) > p_.v_min)) throw SingularityError("v1", v, p_.v_min);
}

Vec RlcComponent::rhs(const Vec& x, double u, double r) const {
  const double i = x[0], v = x[1];
  guard(v);
  Vec d(2);
  d[0] = (-p_.R1 * i - v + u) / p_.L1;
  d[1] = i / p_.C1 - r / (p_.C1 * v);
  return d;
}

Jet RlcComponent::rhs_jet(const Vec& x, double u, double r, double u_dot,
                          double r_dot) const {
  Jet j;
  j.x_dot = rhs(x, u, r);
  const double v = x[1];
  const double di = j.x_dot[0], dv = j.x_dot[1];
  j.x_ddot.resize(2);
  j.x_ddot[0] = (-p_.R1 * di - dv + u_dot) / p_.L1;
  j.x_ddot[1] = (di - (r_dot * v - r * dv) / (v * v)) / p_.C1;
  return j;
}

std::vector<PortInfo> RlcComponent::ports() const {
  return {{PortKind::control, "control"},
          {PortKind::capacitor, "capacitor"},
          {PortKind::bus, "bus"}};
}

EffortFlowSample RlcComponent::effort_flow(PortKind port, const Vec& x,
                                           const Jet& jet, double u,
                                           double u_dot) const {
  const double i = x[0], v = x[1];
  const double di = jet.x_dot[0], dv = jet.x_dot[1];
  const double dv2 = jet.x_ddot[1];
  switch (port) {
    case PortKind::control:
      return {u, i, u_dot, di};
    case PortKind::capacitor:
      return {v, p_.C1 * dv, dv, p_.C1 * dv2};
    case PortKind::bus:
      // Current entering the source from the bus is the capacitor current
      // minus the branch current.
      return {v, -(i - p_.C1 * dv), dv, -(di - p_.C1 * dv2)};
  }
  throw InvalidInput("RLC: unknown port");
}

double RlcComponent::qdot_C(const Vec& x, const Vec& x_dot,
                            const Vec& x_ddot) const {
  const double v = x[1], dv = x_dot[1], dv2 = x_ddot[1];
  return p_.C1 * (v * dv2 - dv * dv);
}

double RlcComponent::output_from_energy(double E, double P) const {
  // E = L P^2 / (2 v^2) + C v^2 / 2 is a quadratic in v^2; take the upper root.
  const double disc = E * E - p_.L1 * p_.C1 * P * P;
  if (disc < 0.0 || !std::isfinite(disc)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return std::sqrt((E + std::sqrt(disc)) / p_.C1);
}

// --- Generator ----------------------------------------------------------------

GeneratorComponent::GeneratorComponent(const GenParams& p) : p_(p) {
  if (!(p.J1 > 0.0) || !(p.D1 > 0.0) || !(p.Tt > 0.0) || !(p.Kt > 0.0)) {
    throw InvalidInput("generator parameters must be strictly positive");
  }
  // Only the rotor stores energy; the turbine state enters through the
  // control port.
  Mat H = Mat::Zero(2, 2);
  H(0, 0) = p.J1;
  Mat B = Mat::Zero(2, 2);
  B(0, 0) = 2.0 * p.D1;
  lift_ = EnergyLiftParams::constant(H, B);
}

void GeneratorComponent::guard(double omega) const {
  if (!(std::abs(omega) > p_.omega_min)) {
    throw SingularityError("omega1", omega, p_.omega_min);
  }
}

Vec GeneratorComponent::rhs(const Vec& x, double u, double r) const {
  const double w = x[0], Pm = x[1];
  guard(w);
  Vec d(2);
  d[0] = -(p_.D1 / p_.J1) * w + Pm / (p_.J1 * w) - r / (p_.J1 * w);
  d[1] = -Pm / p_.Tt + (p_.Kt / p_.Tt) * u;
  return d;
}

Jet GeneratorComponent::rhs_jet(const Vec& x, double u, double r, double u_dot,
                                double r_dot) const {
  Jet j;
  j.x_dot = rhs(x, u, r);
  const double w = x[0], Pm = x[1];
  const double dw = j.x_dot[0], dPm = j.x_dot[1];
  j.x_ddot.resize(2);
  j.x_ddot[0] = -(p_.D1 / p_.J1) * dw + (dPm - r_dot) / (p_.J1 * w) -
                (Pm - r) * dw / (p_.J1 * w * w);
  j.x_ddot[1] = -dPm / p_.Tt + (p_.Kt / p_.Tt) * u_dot;
  return j;
}

std::vector<PortInfo> GeneratorComponent::ports() const {
  return {{PortKind::control, "control"}, {PortKind::bus, "bus"}};
}

EffortFlowSample GeneratorComponent::effort_flow(PortKind port, const Vec& x,
                                                 const Jet& jet, double,
                                                 double) const {
  const double w = x[0], Pm = x[1];
  const double dw = jet.x_dot[0], dPm = jet.x_dot[1];
  const double d2w = jet.x_ddot[0];
  switch (port) {
    case PortKind::control:
      return {Pm / w, w, (dPm * w - Pm * dw) / (w * w), dw};
    case PortKind::bus: {
      // Electrical torque seen from the bus: the part of the mechanical
      // torque not spent on friction or acceleration.
      const double e = -Pm / w + p_.D1 * w + p_.J1 * dw;
      const double e_dot =
          -(dPm * w - Pm * dw) / (w * w) + p_.D1 * dw + p_.J1 * d2w;
      return {e, w, e_dot, dw};
    }
    case PortKind::capacitor:
      break;
  }
  throw InvalidInput("generator: unknown port");
}

double GeneratorComponent::output_from_energy(double E, double) const {
  if (!(E >= 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(2.0 * E / p_.J1);
}

// --- Loads ------------------------------------------------------------------

InteractionRate load_interaction(const LoadSample& load, CouplingKind kind,
                                 const BusVariable& bus) {
  const double y = bus.value, dy = bus.rate;
  if (y == 0.0 || !std::isfinite(y)) {
    throw InvalidInput("load interaction: bus variable must be nonzero");
  }
  EffortFlowSample s;
  const double ratio = load.P / y;
  const double ratio_dot = (load.P_dot * y - load.P * dy) / (y * y);
  if (kind == CouplingKind::bus_voltage) {
    s = {y, ratio, dy, ratio_dot};
  } else {
    s = {ratio, y, ratio_dot, dy};
  }
  InteractionRate rate = interaction_rate(s);
  rate.P = load.P;  // exact, rather than (P/y)*y
  return rate;
}

InteractionRate load_interaction(const LoadProfile& profile, CouplingKind kind,
                                 const BusVariable& bus, double t) {
  return load_interaction(profile.evaluate(t), kind, bus);
}

}  // namespace enspace
