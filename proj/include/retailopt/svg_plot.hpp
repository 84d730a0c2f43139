#pragma once

#include <string>
#include <utility>
#include <vector>

#include "retailopt/types.hpp"

namespace retailopt {

// Figure with obstacles in gray, ground truth (when present) in black,
// estimates in per-method colors, and anchors as circles. One <path> per
// trajectory, one <circle> per anchor.
std::string render_svg(const Session& session,
                       const std::vector<std::pair<std::string, AbsoluteTrajectory>>& estimates);

}  // namespace retailopt
