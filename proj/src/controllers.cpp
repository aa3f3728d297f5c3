#include "enspace/controllers.hpp"

#include <cmath>

#include "enspace/errors.hpp"
#include "enspace/rk4.hpp"

namespace enspace {

void validate(const FblcGains& g) {
  if (!(g.K1 > 0.0) || !(g.K2 > 0.0)) {
    throw InvalidInput("FBLC gains K1 and K2 must be positive");
  }
}

void validate(const SmcGains& g) {
  if (!(g.M0 > 0.0) || !(g.M1 > 0.0) || !(g.eps_bl >= 0.0)) {
    throw InvalidInput("SMC gains need M0 > 0, M1 > 0, eps_bl >= 0");
  }
}

void validate(const DroopGains& g) {
  if (!(g.Tg > 0.0) || !(g.r > 0.0)) {
    throw InvalidInput("droop gains need Tg > 0 and r > 0");
  }
}

namespace {

// Terms shared by both energy laws: the drift of the p dynamics plus the
// neighbor reports, minus the reference acceleration.
double cancellation(const EnergyState& xz, double qdot_C,
                    double neighbor_qdot_sum, const EnergyReference& ref) {
  return 4.0 * xz.Et + 2.0 * qdot_C + neighbor_qdot_sum - ref.pdot_ref;
}

}  // namespace

double fblc_uz(const EnergyState& xz, double qdot_C, double neighbor_qdot_sum,
               const EnergyReference& ref, const FblcGains& g) {
  const double e_E = xz.E - ref.E_ref;
  const double e_p = xz.p - ref.p_ref;
  return cancellation(xz, qdot_C, neighbor_qdot_sum, ref) + g.K1 * e_E +
         g.K2 * e_p;
}

double sign_eps(double s, double eps) {
  if (eps > 0.0) return s / std::max(std::abs(s), eps);
  return static_cast<double>((s > 0.0) - (s < 0.0));
}

SmcCommand smc_uz(const EnergyState& xz, double qdot_C,
                  double neighbor_qdot_sum, const EnergyReference& ref,
                  const SmcGains& g) {
  const double e_E = xz.E - ref.E_ref;
  const double e_p = xz.p - ref.p_ref;
  const double sigma = e_p + g.M1 * e_E;
  const double uz = cancellation(xz, qdot_C, neighbor_qdot_sum, ref) +
                    g.M1 * e_p + g.M0 * sign_eps(sigma, g.eps_bl);
  return {uz, sigma};
}

EnergyReference rlc_reference_lift(const LoadSample& load, double y_ref,
                                   const RlcParams& p) {
  if (!(y_ref > 0.0)) throw InvalidInput("RLC reference: y_ref must be > 0");
  const double y2 = y_ref * y_ref;
  const double i_ref = load.P / y_ref;
  return {
      0.5 * p.L1 * i_ref * i_ref + 0.5 * p.C1 * y2,
      p.L1 * load.P * load.P_dot / y2,
      p.L1 * (load.P_dot * load.P_dot + load.P * load.P_ddot) / y2,
  };
}

EnergyReference rlc_reference_lift(const LoadProfile& profile, double t,
                                   double y_ref, const RlcParams& p) {
  return rlc_reference_lift(profile.evaluate(t), y_ref, p);
}

EnergyReference gen_reference_lift(double y_ref, const GenParams& p) {
  if (!(y_ref > 0.0)) {
    throw InvalidInput("generator reference: y_ref must be > 0");
  }
  return {0.5 * p.J1 * y_ref * y_ref, 0.0, 0.0};
}

double rlc_u_rate(double uz, const Vec& x, const Vec& x_dot, double u,
                  double i_min) {
  const double i = x[0];
  if (!(std::abs(i) > i_min)) throw SingularityError("i1", i, i_min);
  return (u * x_dot[0] - uz) / i;
}

double rlc_uz_to_u(double uz, const Vec& x, const Vec& x_dot, double u_prev,
                   double h, double i_min) {
  return rk4_step(u_prev, 0.0, h, [&](double, double u) {
    return rlc_u_rate(uz, x, x_dot, u, i_min);
  });
}

double gen_uz_to_u(double uz, const Vec& x, const Vec& x_dot,
                   const GenParams& p) {
  const double w = x[0], Pm = x[1];
  if (!(std::abs(w) > p.omega_min)) {
    throw SingularityError("omega1", w, p.omega_min);
  }
  return (p.Tt * (2.0 * x_dot[0] * Pm / w - uz) + Pm) / p.Kt;
}

double proportional_u(const Vec& x, double y_ref, double P, const RlcParams& p,
                      const ProportionalGains& g) {
  const double i = x[0], v = x[1];
  const double i_ref = P / y_ref;
  const double u_ref = y_ref + p.R1 * i_ref;
  return u_ref - g.Ki * (i - i_ref) - g.Kv * (v - y_ref);
}

double proportional_u_rate(const Vec&, const Vec& x_dot, double y_ref,
                           const LoadSample& load, const RlcParams& p,
                           const ProportionalGains& g) {
  const double i_ref_dot = load.P_dot / y_ref;
  return p.R1 * i_ref_dot - g.Ki * (x_dot[0] - i_ref_dot) - g.Kv * x_dot[1];
}

double brayton_moser_u(const Vec& x, const Vec& x_dot, double y_ref,
                       const RlcParams& p, const BraytonMoserGains& g) {
  const double i = x[0], v = x[1], dv = x_dot[1];
  if (!(std::abs(v) > p.v_min)) throw SingularityError("v1", v, p.v_min);
  return y_ref + p.R1 * i - p.L1 * (g.Pi / (v * v) + g.N3) * dv -
         (g.N1 * (v - y_ref) + g.N2 * dv);
}

double brayton_moser_u_rate(const Vec& x, const Jet& jet, double y_ref,
                            const RlcParams& p, const BraytonMoserGains& g) {
  (void)y_ref;
  const double v = x[1];
  const double di = jet.x_dot[0], dv = jet.x_dot[1], d2v = jet.x_ddot[1];
  if (!(std::abs(v) > p.v_min)) throw SingularityError("v1", v, p.v_min);
  const double coeff = g.Pi / (v * v) + g.N3;
  const double coeff_dot = -2.0 * g.Pi * dv / (v * v * v);
  return p.R1 * di - p.L1 * (coeff_dot * dv + coeff * d2v) - g.N1 * dv -
         g.N2 * d2v;
}

double droop_rate(double a, double omega, double y_ref, const DroopGains& g) {
  return -a / g.Tg - (omega - y_ref) / (g.Tg * g.r);
}

double droop_governor_step(double a_prev, double omega, double y_ref,
                           const DroopGains& g, double h) {
  validate(g);
  return rk4_step(a_prev, 0.0, h, [&](double, double a) {
    return droop_rate(a, omega, y_ref, g);
  });
}

std::string_view to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::fblc: return "fblc";
    case ControllerKind::smc: return "smc";
    case ControllerKind::proportional: return "proportional";
    case ControllerKind::brayton_moser: return "brayton_moser";
    case ControllerKind::droop: return "droop";
  }
  return "unknown";
}

std::optional<ControllerKind> controller_from_string(std::string_view s) {
  for (auto k : {ControllerKind::fblc, ControllerKind::smc,
                 ControllerKind::proportional, ControllerKind::brayton_moser,
                 ControllerKind::droop}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

// --- Control law objects ----------------------------------------------------

namespace {

Vec zeros(int n) { return Vec::Zero(n); }

class EnergyLaw final : public ControlLaw {
 public:
  EnergyLaw(const ControllerSpec& spec, const PhysComponent& plant)
      : spec_(spec),
        rlc_(dynamic_cast<const RlcComponent*>(&plant)),
        gen_(dynamic_cast<const GeneratorComponent*>(&plant)) {
    if (rlc_ == nullptr && gen_ == nullptr) {
      throw InvalidInput("energy-space laws need an RLC or generator plant");
    }
    if (spec.kind == ControllerKind::fblc) validate(spec.fblc);
    else validate(spec.smc);
    filtered_ = spec.pdot_ref == PdotRefMode::filtered;
    if (filtered_ && !(spec.pdot_filter_tau > 0.0)) {
      throw InvalidInput("pdot_ref filter time constant must be positive");
    }
    filter_index_ = rlc_ != nullptr ? 1 : 0;
  }

  ControllerKind kind() const override { return spec_.kind; }

  int internal_dim() const override {
    return (rlc_ != nullptr ? 1 : 0) + (filtered_ ? 1 : 0);
  }

  Vec initial_internal(const Vec& x0, const LoadSample&,
                       const EnergyReference& ref0) const override {
    Vec c = zeros(internal_dim());
    if (rlc_ != nullptr) c[0] = spec_.initial_input.value_or(x0[1]);
    if (filtered_) c[filter_index_] = ref0.p_ref;
    return c;
  }

  double provisional_input(double, const Vec&, const Vec& internal,
                           const LoadSample&) const override {
    // The generator's lift does not depend on the valve, so any value works.
    return rlc_ != nullptr ? internal[0] : 0.0;
  }

  ControlOutput evaluate(const ControlContext& ctx,
                         const ActuatorInjection* injection) const override {
    ControlOutput out;
    out.internal_rate = zeros(internal_dim());

    EnergyReference ref = ctx.ref;
    if (filtered_) {
      // Dirty derivative of p_ref: w' = (p_ref - w)/tau, estimate = w'.
      const double w = ctx.internal[filter_index_];
      ref.pdot_ref = (ref.p_ref - w) / spec_.pdot_filter_tau;
      out.internal_rate[filter_index_] = ref.pdot_ref;
    }
    out.pdot_ref_used = ref.pdot_ref;

    const EnergyState& xz = ctx.lift.xz;
    double uz = 0.0;
    if (spec_.kind == ControllerKind::fblc) {
      uz = fblc_uz(xz, ctx.lift.qdot_C, ctx.neighbor_qdot_sum, ref,
                   spec_.fblc);
    } else {
      const SmcCommand cmd =
          smc_uz(xz, ctx.lift.qdot_C, ctx.neighbor_qdot_sum, ref, spec_.smc);
      uz = cmd.uz;
      out.sigma = cmd.sigma;
    }
    out.uz = uz;
    if (injection != nullptr) {
      out.actuator_qdot = injection->qdot(ctx.t, xz.p - ref.p_ref);
    }
    const double realized = uz + out.actuator_qdot;

    if (rlc_ != nullptr) {
      out.u = ctx.internal[0];
      const double du =
          rlc_u_rate(realized, ctx.x, ctx.jet.x_dot, out.u, spec_.i_min);
      out.u_dot = du;
      out.internal_rate[0] = du;
    } else {
      out.u = gen_uz_to_u(realized, ctx.x, ctx.jet.x_dot, gen_->params());
    }
    return out;
  }

 private:
  ControllerSpec spec_;
  const RlcComponent* rlc_;
  const GeneratorComponent* gen_;
  bool filtered_ = false;
  int filter_index_ = 0;
};

const RlcComponent& need_rlc(const PhysComponent& plant, const char* who) {
  const auto* rlc = dynamic_cast<const RlcComponent*>(&plant);
  if (rlc == nullptr) {
    throw InvalidInput(std::string(who) + " applies to the RLC plant only");
  }
  return *rlc;
}

class ProportionalLaw final : public ControlLaw {
 public:
  ProportionalLaw(const ControllerSpec& spec, const PhysComponent& plant,
                  double y_ref)
      : g_(spec.proportional),
        plant_(need_rlc(plant, "proportional")),
        y_ref_(y_ref) {}

  ControllerKind kind() const override { return ControllerKind::proportional; }
  int internal_dim() const override { return 0; }
  Vec initial_internal(const Vec&, const LoadSample&,
                       const EnergyReference&) const override {
    return zeros(0);
  }
  double provisional_input(double, const Vec& x, const Vec&,
                           const LoadSample& load) const override {
    return proportional_u(x, y_ref_, load.P, plant_.params(), g_);
  }
  ControlOutput evaluate(const ControlContext& ctx,
                         const ActuatorInjection*) const override {
    ControlOutput out;
    out.internal_rate = zeros(0);
    out.u = proportional_u(ctx.x, y_ref_, ctx.load.P, plant_.params(), g_);
    out.u_dot = proportional_u_rate(ctx.x, ctx.jet.x_dot, y_ref_, ctx.load,
                                    plant_.params(), g_);
    out.pdot_ref_used = ctx.ref.pdot_ref;
    return out;
  }

 private:
  ProportionalGains g_;
  const RlcComponent& plant_;
  double y_ref_;
};

class BraytonMoserLaw final : public ControlLaw {
 public:
  BraytonMoserLaw(const ControllerSpec& spec, const PhysComponent& plant,
                  double y_ref)
      : g_(spec.brayton_moser),
        plant_(need_rlc(plant, "brayton_moser")),
        y_ref_(y_ref) {}

  ControllerKind kind() const override { return ControllerKind::brayton_moser; }
  int internal_dim() const override { return 0; }
  Vec initial_internal(const Vec&, const LoadSample&,
                       const EnergyReference&) const override {
    return zeros(0);
  }
  double provisional_input(double, const Vec& x, const Vec&,
                           const LoadSample& load) const override {
    // dv/dt does not depend on the source voltage.
    const Vec x_dot = plant_.rhs(x, 0.0, load.P);
    return brayton_moser_u(x, x_dot, y_ref_, plant_.params(), g_);
  }
  ControlOutput evaluate(const ControlContext& ctx,
                         const ActuatorInjection*) const override {
    ControlOutput out;
    out.internal_rate = zeros(0);
    out.u = brayton_moser_u(ctx.x, ctx.jet.x_dot, y_ref_, plant_.params(), g_);
    out.u_dot = brayton_moser_u_rate(ctx.x, ctx.jet, y_ref_, plant_.params(), g_);
    out.pdot_ref_used = ctx.ref.pdot_ref;
    return out;
  }

 private:
  BraytonMoserGains g_;
  const RlcComponent& plant_;
  double y_ref_;
};

class DroopLaw final : public ControlLaw {
 public:
  DroopLaw(const ControllerSpec& spec, const PhysComponent& plant, double y_ref)
      : spec_(spec),
        plant_(dynamic_cast<const GeneratorComponent*>(&plant)),
        y_ref_(y_ref) {
    if (plant_ == nullptr) {
      throw InvalidInput("droop applies to the generator plant only");
    }
    validate(spec.droop);
  }

  ControllerKind kind() const override { return ControllerKind::droop; }
  int internal_dim() const override { return 1; }
  Vec initial_internal(const Vec& x0, const LoadSample&,
                       const EnergyReference&) const override {
    Vec c = zeros(1);
    // Default: turbine starts in internal equilibrium, a = Pm / Kt.
    c[0] = spec_.initial_input.value_or(x0[1] / plant_->params().Kt);
    return c;
  }
  double provisional_input(double, const Vec&, const Vec& internal,
                           const LoadSample&) const override {
    return internal[0];
  }
  ControlOutput evaluate(const ControlContext& ctx,
                         const ActuatorInjection*) const override {
    ControlOutput out;
    out.internal_rate = zeros(1);
    out.u = ctx.internal[0];
    const double da = droop_rate(out.u, ctx.x[0], y_ref_, spec_.droop);
    out.u_dot = da;
    out.internal_rate[0] = da;
    out.pdot_ref_used = ctx.ref.pdot_ref;
    return out;
  }

 private:
  ControllerSpec spec_;
  const GeneratorComponent* plant_;
  double y_ref_;
};

}  // namespace

std::unique_ptr<ControlLaw> make_control_law(const ControllerSpec& spec,
                                             const PhysComponent& plant,
                                             double y_ref) {
  switch (spec.kind) {
    case ControllerKind::fblc:
    case ControllerKind::smc:
      return std::make_unique<EnergyLaw>(spec, plant);
    case ControllerKind::proportional:
      return std::make_unique<ProportionalLaw>(spec, plant, y_ref);
    case ControllerKind::brayton_moser:
      return std::make_unique<BraytonMoserLaw>(spec, plant, y_ref);
    case ControllerKind::droop:
      return std::make_unique<DroopLaw>(spec, plant, y_ref);
  }
  throw InvalidInput("unknown controller kind");
}

}  // namespace enspace
