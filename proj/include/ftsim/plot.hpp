#pragma once

// Static SVG plots of a trace: one image per figure analog (estimator
// errors, formation trajectory with start markers, tracking errors,
// adaptive parameters, end-effector path). No display server needed.

#include <string>
#include <vector>

#include "ftsim/integrate.hpp"

namespace ftsim {

// Writes the figure set appropriate to the trace's channel layout into dir
// (created if absent). Returns the paths written.
std::vector<std::string> export_plots(const SimTrace& trace, const std::string& dir);

}  // namespace ftsim
