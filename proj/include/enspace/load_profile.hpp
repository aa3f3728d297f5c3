#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace enspace {

/// P(t) together with its first two time derivatives.
struct LoadSample {
  double P = 0.0;
  double P_dot = 0.0;
  double P_ddot = 0.0;
};

enum class LoadKind { constant, sigmoid_step, piecewise_linear, tabulated };

/// Power demand of a load over time, with exact derivatives.
///
/// The tabulated kind interpolates a (time, power) table with a cubic spline;
/// outside the table the end values are held. Piecewise-linear profiles have
/// a zero second derivative between breakpoints.
class LoadProfile {
 public:
  static LoadProfile constant(double P);
  /// P0 + dP / (1 + exp(-k (t - t0))).
  static LoadProfile sigmoid_step(double P0, double dP, double k, double t0);
  static LoadProfile piecewise_linear(std::vector<double> t,
                                      std::vector<double> P);
  static LoadProfile tabulated(std::vector<double> t, std::vector<double> P);
  /// Reads a whitespace separated two-column table. Lines starting with '#'
  /// are comments.
  static LoadProfile tabulated_file(const std::filesystem::path& path);

  LoadSample evaluate(double t) const;
  LoadKind kind() const;
  /// Where the table came from, for tabulated profiles loaded from disk.
  const std::string& source() const { return source_; }

  struct Constant {
    double P;
  };
  struct Sigmoid {
    double P0, dP, k, t0;
  };
  struct Linear {
    std::vector<double> t, P;
  };
  struct Spline;  // wraps the GSL interpolation object
  struct Tabulated {
    std::vector<double> t, P;
    std::shared_ptr<const Spline> spline;
  };
  using Data = std::variant<Constant, Sigmoid, Linear, Tabulated>;
  const Data& data() const { return data_; }

 private:
  explicit LoadProfile(Data d) : data_(std::move(d)) {}
  Data data_;
  std::string source_;
};

const char* to_string(LoadKind kind);

}  // namespace enspace
