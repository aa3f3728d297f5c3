#pragma once

// Control laws. The two energy-space laws (FBLC and SMC) compute the primary
// input u_z = Qdot^u from the lifted state and map it back to the physical
// actuator; the three benchmarks act on the physical state directly.

#include <memory>
#include <optional>
#include <string_view>

#include "enspace/components.hpp"
#include "enspace/energy_core.hpp"
#include "enspace/load_profile.hpp"

namespace enspace {

struct EnergyReference {
  double E_ref = 0.0;
  double p_ref = 0.0;
  double pdot_ref = 0.0;
};

struct FblcGains {
  double K1 = 10.0;
  double K2 = 10.0;
};

struct SmcGains {
  double M0 = 5.4;
  double M1 = 2.9;
  double eps_bl = 0.0;  // 0 selects the exact sign function
};

struct ProportionalGains {
  double Ki = 5.0;
  double Kv = 0.5;
};

struct BraytonMoserGains {
  double N1 = 8.0;
  double N2 = 1.0;
  double N3 = 2.0;
  double Pi = 3000.0;
};

struct DroopGains {
  double Tg = 0.2;
  double r = 0.2;
};

void validate(const FblcGains& g);
void validate(const SmcGains& g);
void validate(const DroopGains& g);

/// u_z = 4E_t + 2Qdot_C + sum Qdot_j + K1 e_E + K2 e_p - pdot_ref.
double fblc_uz(const EnergyState& xz, double qdot_C, double neighbor_qdot_sum,
               const EnergyReference& ref, const FblcGains& g);

struct SmcCommand {
  double uz = 0.0;
  double sigma = 0.0;
};

/// sigma = e_p + M1 e_E;
/// u_z = 4E_t + 2Qdot_C + sum Qdot_j + M1 e_p + M0 sgn(sigma) - pdot_ref.
SmcCommand smc_uz(const EnergyState& xz, double qdot_C,
                  double neighbor_qdot_sum, const EnergyReference& ref,
                  const SmcGains& g);

/// sign(s) when eps == 0, otherwise s / max(|s|, eps).
double sign_eps(double s, double eps);

/// E_ref = L (P/y)^2 / 2 + C y^2 / 2, p_ref = L P Pdot / y^2 and its exact
/// time derivative.
EnergyReference rlc_reference_lift(const LoadSample& load, double y_ref,
                                   const RlcParams& p);
EnergyReference rlc_reference_lift(const LoadProfile& profile, double t,
                                   double y_ref, const RlcParams& p);

/// (J y^2 / 2, 0, 0).
EnergyReference gen_reference_lift(double y_ref, const GenParams& p);

/// du/dt = (u di/dt - u_z) / i, the ODE realizing u_z on the RLC source.
double rlc_u_rate(double uz, const Vec& x, const Vec& x_dot, double u,
                  double i_min = 1e-3);

/// One RK4 step of the realization ODE with x, x_dot and u_z held fixed.
double rlc_uz_to_u(double uz, const Vec& x, const Vec& x_dot, double u_prev,
                   double h, double i_min = 1e-3);

/// a = (Tt (2 omega_dot Pm / omega - u_z) + Pm) / Kt.
double gen_uz_to_u(double uz, const Vec& x, const Vec& x_dot,
                   const GenParams& p);

/// Proportional voltage controller around the reference input
/// y + R P / y.
double proportional_u(const Vec& x, double y_ref, double P, const RlcParams& p,
                      const ProportionalGains& g);
double proportional_u_rate(const Vec& x, const Vec& x_dot, double y_ref,
                           const LoadSample& load, const RlcParams& p,
                           const ProportionalGains& g);

/// Brayton-Moser voltage controller.
double brayton_moser_u(const Vec& x, const Vec& x_dot, double y_ref,
                       const RlcParams& p, const BraytonMoserGains& g);
double brayton_moser_u_rate(const Vec& x, const Jet& jet, double y_ref,
                            const RlcParams& p, const BraytonMoserGains& g);

/// da/dt = -a/Tg - (omega - y_ref) / (Tg r).
double droop_rate(double a, double omega, double y_ref, const DroopGains& g);

/// One RK4 step of the droop governor with omega held fixed.
double droop_governor_step(double a_prev, double omega, double y_ref,
                           const DroopGains& g, double h);

// ---------------------------------------------------------------------------

enum class ControllerKind { fblc, smc, proportional, brayton_moser, droop };
enum class PdotRefMode { analytic, filtered };

std::string_view to_string(ControllerKind k);
std::optional<ControllerKind> controller_from_string(std::string_view s);

/// Actuator-side exogenous injection. The energy laws add qdot(t, e_p) to
/// u_z right before the physical realization; the law itself never uses it.
class ActuatorInjection {
 public:
  virtual ~ActuatorInjection() = default;
  virtual double qdot(double t, double e_p) const = 0;
};

/// Inputs to one controller evaluation. `jet` and `lift` were computed with
/// the provisional input and a zero input rate; both shipped plants make the
/// lift independent of those.
struct ControlContext {
  double t = 0.0;
  const Vec& x;
  const Vec& internal;
  const Jet& jet;
  const Lift& lift;
  const LoadSample& load;
  const EnergyReference& ref;
  double neighbor_qdot_sum = 0.0;
};

struct ControlOutput {
  double u = 0.0;
  std::optional<double> u_dot;  // absent when the realization is algebraic
  Vec internal_rate;
  std::optional<double> uz;
  std::optional<double> sigma;
  double pdot_ref_used = 0.0;
  double actuator_qdot = 0.0;  // injected exogenous Qdot
};

class ControlLaw {
 public:
  virtual ~ControlLaw() = default;
  virtual ControllerKind kind() const = 0;
  bool energy_based() const {
    return kind() == ControllerKind::fblc || kind() == ControllerKind::smc;
  }
  virtual int internal_dim() const = 0;
  virtual Vec initial_internal(const Vec& x0, const LoadSample& load0,
                               const EnergyReference& ref0) const = 0;
  /// Physical input used to evaluate the jet before the law runs.
  virtual double provisional_input(double t, const Vec& x, const Vec& internal,
                                   const LoadSample& load) const = 0;
  virtual ControlOutput evaluate(const ControlContext& ctx,
                                 const ActuatorInjection* injection) const = 0;
};

struct ControllerSpec {
  ControllerKind kind = ControllerKind::fblc;
  FblcGains fblc;
  SmcGains smc;
  ProportionalGains proportional;
  BraytonMoserGains brayton_moser;
  DroopGains droop;
  std::optional<double> initial_input;  // u(0) or a(0)
  PdotRefMode pdot_ref = PdotRefMode::analytic;
  double pdot_filter_tau = 1e-3;  // used in filtered mode
  double i_min = 1e-3;
};

/// Builds the law regulating `plant` to output y_ref. Throws InvalidInput if
/// the controller does not apply to that plant (e.g. droop on the RLC source).
std::unique_ptr<ControlLaw> make_control_law(const ControllerSpec& spec,
                                             const PhysComponent& plant,
                                             double y_ref);

}  // namespace enspace
