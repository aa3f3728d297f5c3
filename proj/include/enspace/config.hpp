#pragma once

// Scenario files. The format is YAML with one mapping per section:
//
//   name, seed
//   plant:        kind, params, initial_state, y_ref
//   loads:        list of {kind, ...}
//   controller:   kind, initial_input, pdot_ref, pdot_filter_tau, i_min,
//                 and one optional gain block per law (fblc, smc, ...)
//   interconnect: delay_steps
//   disturbance:  mode, offset, amplitude, omega, phase, gain
//   simulation:   step, horizon, record_every
//   metrics:      window_fraction
//   certificate:  smc_mbar
//
// Unknown keys are rejected. The full schema is documented in README.md.

#include <filesystem>
#include <string>
#include <vector>

#include "enspace/sim_engine.hpp"

namespace enspace {

/// Parses a scenario document. `overrides` are "dotted.key=value" strings
/// applied to the document tree before conversion; numeric path segments
/// index into sequences (loads.0.P=1500). Relative table paths are resolved
/// against `base_dir`. Throws ConfigError naming the offending key.
Scenario scenario_from_text(const std::string& text,
                            const std::filesystem::path& base_dir,
                            const std::vector<std::string>& overrides = {});

Scenario load_scenario(const std::filesystem::path& path,
                       const std::vector<std::string>& overrides = {});

/// Fully resolved document: every field explicit, tabulated loads inlined.
/// Reading it back yields an identical scenario.
std::string scenario_to_text(const Scenario& scn);

/// Hex SHA-256 digest.
std::string sha256_hex(const std::string& data);

}  // namespace enspace
