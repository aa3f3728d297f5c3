#pragma once

// Physical-layer component models: the inverter-fed RLC source, the
// synchronous generator with its turbine, and constant-power loads attached
// to either of them.

#include <array>
#include <memory>
#include <string_view>
#include <vector>

#include "enspace/energy_core.hpp"
#include "enspace/load_profile.hpp"

namespace enspace {

/// First and second time derivatives of the state.
struct Jet {
  Vec x_dot;
  Vec x_ddot;
};

/// Which quantity the bus shares between a source and its loads.
enum class CouplingKind { bus_voltage, bus_frequency };

enum class PortKind {
  control,    // the actuator port, (e, f) fixed by the component
  capacitor,  // internal storage port whose Qdot enters Qdot_C
  bus,        // the port shared with the loads
};

struct PortInfo {
  PortKind kind;
  std::string_view name;
};

/// Value and time derivative of the shared bus variable (v or omega).
struct BusVariable {
  double value = 0.0;
  double rate = 0.0;
};

/// Everything the energy-space layer reads from one physical sample.
struct Lift {
  EnergyState xz;
  DissipationRates dissipation;
  double qdot_C = 0.0;
};

/// Contract shared by the physical components.
///
/// `u` is the scalar actuator input and `r` is the total load power drawn at
/// the bus. Neither component has a physical disturbance input; exogenous
/// interactions are injected on the actuator side by the simulator.
class PhysComponent {
 public:
  virtual ~PhysComponent() = default;

  virtual std::string_view name() const = 0;
  virtual int state_dim() const = 0;
  virtual std::array<std::string_view, 2> state_names() const = 0;
  virtual std::string_view input_name() const = 0;
  virtual CouplingKind coupling() const = 0;

  virtual Vec rhs(const Vec& x, double u, double r) const = 0;
  /// x_dot equals rhs(x, u, r) exactly; x_ddot uses the supplied input rates.
  virtual Jet rhs_jet(const Vec& x, double u, double r, double u_dot,
                      double r_dot) const = 0;

  virtual std::vector<PortInfo> ports() const = 0;
  virtual EffortFlowSample effort_flow(PortKind port, const Vec& x,
                                       const Jet& jet, double u,
                                       double u_dot) const = 0;
  virtual const EnergyLiftParams& lift_params() const = 0;
  virtual double qdot_C(const Vec& x, const Vec& x_dot,
                        const Vec& x_ddot) const = 0;

  /// The regulated output y.
  virtual double output(const Vec& x) const = 0;
  virtual BusVariable bus_variable(const Vec& x, const Vec& x_dot) const = 0;
  /// Output implied by stored energy E when the component sits on its
  /// reference manifold at load P. NaN when no such output exists.
  virtual double output_from_energy(double E, double P) const = 0;
};

/// E, p, E_t, D, D_t and Qdot_C from one sample. p = x^T H xdot because H is
/// constant for every shipped component.
Lift lift(const PhysComponent& c, const Vec& x, const Jet& jet);

/// d/dt p = 2 E_t + x^T H xddot (constant H).
double energy_rate_derivative(const PhysComponent& c, const Vec& x,
                              const Jet& jet);

// ---------------------------------------------------------------------------

struct RlcParams {
  double R1 = 0.1;
  double L1 = 1.12e-3;
  double C1 = 6.8e-3;
  double v_min = 1e-3;  // guard on the constant-power load term
};

/// Inverter-controlled voltage source behind a series RL branch feeding a
/// shunt capacitor. State (i1, v1), input u (source voltage), r = P_load.
///
///   di/dt = (-R i - v + u) / L
///   dv/dt = i/C - P/(C v)
class RlcComponent final : public PhysComponent {
 public:
  explicit RlcComponent(const RlcParams& p);

  std::string_view name() const override { return "rlc"; }
  int state_dim() const override { return 2; }
  std::array<std::string_view, 2> state_names() const override {
    return {"i1", "v1"};
  }
  std::string_view input_name() const override { return "u"; }
  CouplingKind coupling() const override { return CouplingKind::bus_voltage; }

  Vec rhs(const Vec& x, double u, double r) const override;
  Jet rhs_jet(const Vec& x, double u, double r, double u_dot,
              double r_dot) const override;
  std::vector<PortInfo> ports() const override;
  EffortFlowSample effort_flow(PortKind port, const Vec& x, const Jet& jet,
                               double u, double u_dot) const override;
  const EnergyLiftParams& lift_params() const override { return lift_; }
  double qdot_C(const Vec& x, const Vec& x_dot,
                const Vec& x_ddot) const override;
  double output(const Vec& x) const override { return x[1]; }
  BusVariable bus_variable(const Vec& x, const Vec& x_dot) const override {
    return {x[1], x_dot[1]};
  }
  double output_from_energy(double E, double P) const override;

  const RlcParams& params() const { return p_; }

 private:
  void guard(double v) const;
  RlcParams p_;
  EnergyLiftParams lift_;
};

struct GenParams {
  double J1 = 10.0;
  double D1 = 0.01;
  double Tt = 0.5;
  double Kt = 1000.0;
  double omega_min = 1.0;
};

/// Swing equation in power form with a first-order (IEEE Type-1) turbine.
/// State (omega1, Pm1), input a (valve position, cm), r = P_load.
///
///   domega/dt = -(D/J) omega + Pm/(J omega) - P/(J omega)
///   dPm/dt    = -Pm/Tt + (Kt/Tt) a
class GeneratorComponent final : public PhysComponent {
 public:
  explicit GeneratorComponent(const GenParams& p);

  std::string_view name() const override { return "generator"; }
  int state_dim() const override { return 2; }
  std::array<std::string_view, 2> state_names() const override {
    return {"omega1", "Pm1"};
  }
  std::string_view input_name() const override { return "a"; }
  CouplingKind coupling() const override { return CouplingKind::bus_frequency; }

  Vec rhs(const Vec& x, double u, double r) const override;
  Jet rhs_jet(const Vec& x, double u, double r, double u_dot,
              double r_dot) const override;
  std::vector<PortInfo> ports() const override;
  EffortFlowSample effort_flow(PortKind port, const Vec& x, const Jet& jet,
                               double u, double u_dot) const override;
  const EnergyLiftParams& lift_params() const override { return lift_; }
  double qdot_C(const Vec&, const Vec&, const Vec&) const override {
    return 0.0;
  }
  double output(const Vec& x) const override { return x[0]; }
  BusVariable bus_variable(const Vec& x, const Vec& x_dot) const override {
    return {x[0], x_dot[0]};
  }
  double output_from_energy(double E, double P) const override;

  const GenParams& params() const { return p_; }

 private:
  void guard(double omega) const;
  GenParams p_;
  EnergyLiftParams lift_;
};

/// Interaction rate into a constant-power load of profile sample `load`
/// attached to a bus of the given kind. Voltage buses use the pair
/// (v, P/v); frequency buses use (P/omega, omega). P equals load.P exactly.
InteractionRate load_interaction(const LoadSample& load, CouplingKind kind,
                                 const BusVariable& bus);

/// Convenience overload evaluating the profile at t.
InteractionRate load_interaction(const LoadProfile& profile, CouplingKind kind,
                                 const BusVariable& bus, double t);

/// Builds a Vec from a brace list, e.g. make_vec({12.8, 79.0}).
Vec make_vec(std::initializer_list<double> values);

}  // namespace enspace
