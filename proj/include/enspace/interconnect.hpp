#pragma once

// Port coupling on a shared bus, the rate exchange between members, and the
// exogenous interaction channel.

#include <deque>
#include <span>
#include <string_view>
#include <vector>

#include "enspace/components.hpp"
#include "enspace/controllers.hpp"
#include "enspace/energy_core.hpp"

namespace enspace {

/// One bus shared by a storage-owning source (member 0) and its loads.
/// Every orientation is +1: rates are counted positive into the member.
struct Coupling {
  CouplingKind shared_variable = CouplingKind::bus_voltage;
  std::vector<int> members;
  std::vector<int> orientation;
  int owner = 0;

  /// Source plus n_loads loads, ids 0..n_loads.
  static Coupling star(CouplingKind kind, int n_loads);
  int load_count() const { return static_cast<int>(members.size()) - 1; }
};

/// Delivers load rates to the source with a fixed delay counted in steps.
///
/// Payloads are published once per step boundary. deliver(k) returns what
/// was published at step k - delay; before any history exists (k < delay)
/// it returns the step-0 publication.
class Mailbox {
 public:
  Mailbox(int n_senders, int delay_steps);

  int delay() const { return delay_; }
  void publish(long step, std::vector<InteractionRate> rates);
  /// Throws ScheduleError if the required payload was never published.
  const std::vector<InteractionRate>& deliver(long step) const;
  /// Step at which the delivered payload was sent.
  long payload_step(long step) const;

 private:
  int n_senders_;
  int delay_;
  long first_step_ = -1;
  std::deque<std::vector<InteractionRate>> history_;
};

/// Synchronous exchange for one coupling. With delay 0 the source sees the
/// loads' current rates; otherwise it sees the mailbox contents.
class Exchange {
 public:
  Exchange(Coupling coupling, int delay_steps);

  const Coupling& coupling() const { return coupling_; }
  bool exact() const { return mailbox_.delay() == 0; }
  void publish(long step, std::vector<InteractionRate> load_rates);
  /// Neighbor rates the source holds during step k.
  const std::vector<InteractionRate>& received(long step) const;

 private:
  Coupling coupling_;
  Mailbox mailbox_;
};

/// -sum of the received neighbor rates. An isolated component gets zero.
InteractionRate own_port_rate(std::span<const InteractionRate> received);

enum class DisturbanceMode { zero, signal, error_feedback };

std::string_view to_string(DisturbanceMode m);

/// Exogenous Qdot^m injected at the actuator of an energy-space controller.
///
///   zero            Qdot^m = 0
///   signal          Qdot^m = offset + amplitude sin(omega t + phase)
///   error_feedback  Qdot^m = -gain e_p
///
/// Independently of the mode, any difference between the true source port
/// rate and the one implied by the received reports is booked as part of
/// z^m (see disturbance_rate).
struct DisturbanceChannel final : ActuatorInjection {
  DisturbanceMode mode = DisturbanceMode::zero;
  double offset = 0.0;
  double amplitude = 0.0;
  double omega = 0.0;
  double phase = 0.0;
  double gain = 0.0;

  double qdot(double t, double e_p) const override;
  bool active() const { return mode != DisturbanceMode::zero; }
};

/// Full exogenous rate used by the bookkeeping and the certificates: the
/// injected actuator part plus the report mismatch (true own rate minus the
/// rate implied by the received reports).
InteractionRate disturbance_rate(const DisturbanceChannel& channel, double t,
                                 double e_p, const InteractionRate& own_true,
                                 const InteractionRate& own_reported);

}  // namespace enspace
