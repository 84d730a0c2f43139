#pragma once

#include <vector>

#include "retailopt/discrete_opt.hpp"
#include "retailopt/types.hpp"

namespace retailopt {

struct TspTour {
    std::vector<DomainPoint> route;  // start, waypoints in visit order, end
    double length = 0.0;
};

// Exact minimum-length Hamiltonian path from start to end over all waypoints
// (Held-Karp subset DP, Euclidean distances). Ties break lexicographically on
// the visit order. Rejects more than 15 waypoints.
TspTour solve_path_tsp(const DomainPoint& start, const DomainPoint& end,
                       const std::vector<DomainPoint>& waypoints);

// Shortest anchor tour between the two TK anchors through all TU anchors,
// resampled to T points at constant speed, then Viterbi-projected.
AbsoluteTrajectory tsp_baseline(const Session& session, const ViterbiConfig& cfg);

// Q translated so q_1 sits on the earliest TK anchor, clamped to the domain.
// No discrete projection.
AbsoluteTrajectory anchored_raw_baseline(const Session& session);

// Arc-length resampling of a polyline to n points at constant speed.
std::vector<DomainPoint> resample_polyline(const std::vector<DomainPoint>& polyline,
                                           std::size_t n);

}  // namespace retailopt
