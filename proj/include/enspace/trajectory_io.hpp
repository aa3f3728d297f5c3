#pragma once

// CSV form of a trajectory: one header line with the column names of
// trajectory_header(), then one row per sample at 17 significant digits.

#include <filesystem>
#include <iosfwd>

#include "enspace/sim_engine.hpp"

namespace enspace {

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& traj);

/// Reads a file written by write_trajectory_csv. The plant is recovered from
/// the state column names; `step` and `record_every` are not stored in the
/// file and must be supplied. Throws InvalidInput on any schema mismatch.
Trajectory read_trajectory_csv(std::istream& in, double step,
                               int record_every = 1);
Trajectory read_trajectory_csv(const std::filesystem::path& path, double step,
                               int record_every = 1);

}  // namespace enspace
