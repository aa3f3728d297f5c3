#pragma once

// Subcommands of the `enspace` tool. Each returns the process exit code:
// 0 success, 1 configuration or usage error, 2 simulation error.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace enspace::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitSimulation = 2;

/// Flags shared by run, compare and sweep. Dedicated flags are turned into
/// overrides appended after the --set list, so precedence is
/// file < --set (in order) < dedicated flags.
struct ScenarioFlags {
  std::string scenario;
  std::vector<std::string> sets;
  std::optional<double> step;
  std::optional<double> horizon;
  std::optional<int> delay_steps;
  std::optional<std::string> controller;
  std::optional<std::uint64_t> seed;

  std::vector<std::string> overrides() const;
};

struct RunOptions {
  ScenarioFlags flags;
  std::string manifest;  // re-run from a previous run's manifest
  std::string out = "out";
};

struct CompareOptions {
  ScenarioFlags flags;
  std::vector<std::string> controllers;
  std::string out = "out";
};

struct SweepOptions {
  ScenarioFlags flags;
  std::vector<std::string> grid;  // key=v1,v2,... or key=start:step:stop
  std::string out = "out";
};

struct VerifyOptions {
  std::string trajectory;
  std::string scenario;  // resolved scenario of the run (gains, step)
  std::vector<std::string> sets;
  std::optional<double> mbar;
  std::string out;  // optional; certificate.txt is written there when set
};

int cmd_run(const RunOptions& opt, std::ostream& log);
int cmd_compare(const CompareOptions& opt, std::ostream& log);
int cmd_sweep(const SweepOptions& opt, std::ostream& log);
int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& log);

/// Worker count: ENSPACE_WORKERS when set to a positive integer, otherwise
/// the number of logical cores.
int worker_count();

/// Parses argv and dispatches.
int main_entry(int argc, char** argv);

}  // namespace enspace::cli
