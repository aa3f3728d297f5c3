#pragma once

// Static SVG line charts. The panel layout follows the plant: current,
// voltage and control for the RLC source; load, speed, mechanical power and
// valve for the generator.

#include <string>
#include <vector>

#include "enspace/sim_engine.hpp"

namespace enspace {

struct PlotSeries {
  std::string label;
  const Trajectory* traj = nullptr;
};

/// One stacked figure with every series overlaid in each panel. All series
/// must share the plant kind.
std::string render_figure(const std::vector<PlotSeries>& series,
                          const std::string& title);

}  // namespace enspace
