#pragma once

#include <cstdint>
#include <vector>

#include "retailopt/types.hpp"

namespace retailopt {

// Inertial-error stand-in: cumulative heading random walk, piecewise speed
// scale, and white positional noise applied to ground-truth displacements.
struct DriftModel {
    // Defaults are calibrated so the anchored-raw baseline lands near 3-6 m APE
    // at scale_m = 10 on the default shelf-grid scenario.
    double heading_drift_rate = 0.03;  // rad/step std of the heading random walk
    double scale_sigma = 0.5;          // lognormal sigma of the per-segment speed factor
    double white_noise_sigma = 0.001;  // per-step positional noise, normalized units
    int scale_segment_steps = 120;    // steps per independently scaled segment
};

struct ScenarioConfig {
    int shelf_rows = 3;
    int shelf_cols = 3;
    double corridor_width = 0.12;
    int n_tu_anchors = 4;
    int n_detours = 3;          // extra random waypoints to lengthen the walk
    double walk_speed_mps = 0.5;
    double pause_seconds = 15.0;  // dwell at each visited shelf
    double dt = 0.5;
    double scale_m = 10.0;
    DriftModel drift;
};

// Axis-aligned shelf grid with uniform corridors; validates that the valid
// space is connected (union-find over a sampled visibility graph). Throws on
// infeasible geometry.
Environment generate_environment(const ScenarioConfig& cfg);

struct GroundTruthScenario {
    AbsoluteTrajectory trajectory;
    std::vector<TimeUnknownAnchor> anchors_tu;
    std::vector<TimeKnownAnchor> anchors_tk;  // first and last trajectory points
};

// Collision-free walk visiting n_tu_anchors shelf fronts and returning to the
// start, resampled at walk speed with pauses at each shelf.
GroundTruthScenario generate_ground_truth(const Environment& env, const ScenarioConfig& cfg,
                                          std::uint64_t rng_seed);

// Integrates drift-corrupted ground-truth displacements from the origin.
RelativeTrajectory corrupt_to_relative(const AbsoluteTrajectory& gt, const DriftModel& drift,
                                       std::uint64_t rng_seed);

// Environment + ground truth + corrupted relative trajectory, with ground
// truth attached for evaluation.
Session generate_session(const ScenarioConfig& cfg, std::uint64_t rng_seed);

}  // namespace retailopt
