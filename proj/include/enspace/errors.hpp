#pragma once

#include <stdexcept>
#include <string>

namespace enspace {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A function received an argument outside its domain (non-finite state,
/// non-positive parameter, unknown port, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Scenario configuration could not be parsed or validated. `key()` names the
/// offending config path.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// A division guard tripped (v -> 0, omega -> 0, i -> 0).
class SingularityError : public Error {
 public:
  SingularityError(std::string guard, double value, double limit)
      : Error("singularity: |" + guard + "| = " + std::to_string(value) +
              " <= " + std::to_string(limit)),
        guard_(std::move(guard)),
        value_(value) {}
  const std::string& guard() const { return guard_; }
  double value() const { return value_; }

 private:
  std::string guard_;
  double value_;
};

/// An integrator stage produced a non-finite value.
class DivergenceError : public Error {
 public:
  DivergenceError(int stage, double t)
      : Error("divergence: non-finite value in RK4 stage " +
              std::to_string(stage) + " at t = " + std::to_string(t)),
        stage_(stage),
        t_(t) {}
  int stage() const { return stage_; }
  double time() const { return t_; }

 private:
  int stage_;
  double t_;
};

/// tau or tau_t requested while the matching dissipation is not positive.
class UndefinedTimeConstant : public Error {
 public:
  explicit UndefinedTimeConstant(std::string denominator)
      : Error("undefined time constant: " + denominator + " <= eps_D"),
        denominator_(std::move(denominator)) {}
  const std::string& denominator() const { return denominator_; }

 private:
  std::string denominator_;
};

/// A mailbox delivery was requested for a step nobody published. This is a
/// programming error in the caller's stepping order.
class ScheduleError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver ran out of iterations.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace enspace
