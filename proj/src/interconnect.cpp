#include "enspace/interconnect.hpp"

#include <cmath>

#include "enspace/errors.hpp"

namespace enspace {

Coupling Coupling::star(CouplingKind kind, int n_loads) {
  if (n_loads < 0) throw InvalidInput("coupling: negative load count");
  Coupling c;
  c.shared_variable = kind;
  for (int k = 0; k <= n_loads; ++k) {
    c.members.push_back(k);
    c.orientation.push_back(+1);
  }
  c.owner = 0;
  return c;
}

Mailbox::Mailbox(int n_senders, int delay_steps)
    : n_senders_(n_senders), delay_(delay_steps) {
  if (delay_steps < 0) throw InvalidInput("mailbox: negative delay");
  if (n_senders < 0) throw InvalidInput("mailbox: negative sender count");
}

void Mailbox::publish(long step, std::vector<InteractionRate> rates) {
  if (static_cast<int>(rates.size()) != n_senders_) {
    throw ScheduleError("mailbox: publication has wrong sender count");
  }
  if (first_step_ < 0) {
    first_step_ = step;
  } else if (step != first_step_ + static_cast<long>(history_.size())) {
    throw ScheduleError("mailbox: publication out of order at step " +
                        std::to_string(step));
  }
  history_.push_back(std::move(rates));
  // Only the last delay + 1 payloads can still be delivered.
  while (history_.size() > static_cast<std::size_t>(delay_) + 1) {
    history_.pop_front();
    ++first_step_;
  }
}

long Mailbox::payload_step(long step) const {
  const long sent = step - delay_;
  return sent < 0 ? 0 : sent;
}

const std::vector<InteractionRate>& Mailbox::deliver(long step) const {
  const long sent = payload_step(step);
  const long last = first_step_ + static_cast<long>(history_.size()) - 1;
  if (first_step_ < 0 || sent < first_step_ || sent > last) {
    throw ScheduleError("mailbox: nothing published for step " +
                        std::to_string(sent) + " (delivery at step " +
                        std::to_string(step) + ")");
  }
  return history_[static_cast<std::size_t>(sent - first_step_)];
}

Exchange::Exchange(Coupling coupling, int delay_steps)
    : coupling_(std::move(coupling)),
      mailbox_(coupling_.load_count(), delay_steps) {}

void Exchange::publish(long step, std::vector<InteractionRate> load_rates) {
  mailbox_.publish(step, std::move(load_rates));
}

const std::vector<InteractionRate>& Exchange::received(long step) const {
  return mailbox_.deliver(step);
}

InteractionRate own_port_rate(std::span<const InteractionRate> received) {
  InteractionRate sum;
  for (const auto& r : received) sum += r;
  return -sum;
}

std::string_view to_string(DisturbanceMode m) {
  switch (m) {
    case DisturbanceMode::zero: return "zero";
    case DisturbanceMode::signal: return "signal";
    case DisturbanceMode::error_feedback: return "error_feedback";
  }
  return "unknown";
}

double DisturbanceChannel::qdot(double t, double e_p) const {
  switch (mode) {
    case DisturbanceMode::zero: return 0.0;
    case DisturbanceMode::signal:
      return offset + amplitude * std::sin(omega * t + phase);
    case DisturbanceMode::error_feedback: return -gain * e_p;
  }
  return 0.0;
}

InteractionRate disturbance_rate(const DisturbanceChannel& channel, double t,
                                 double e_p, const InteractionRate& own_true,
                                 const InteractionRate& own_reported) {
  InteractionRate m = own_true - own_reported;
  m.Qdot += channel.qdot(t, e_p);
  return m;
}

}  // namespace enspace
