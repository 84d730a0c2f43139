#pragma once

#include <vector>

#include "retailopt/tape.hpp"
#include "retailopt/types.hpp"

namespace retailopt {

struct ObjectiveConfig {
    double lambda_reg = 0.01;
};

// Matching confidences for diagnostics and tests: T x (J+K), TU columns first.
// TU columns are softmax-over-time of -dist^2/tau; TK columns are one-hot at
// the anchor's timestep.
Tensor match_weights(const std::vector<PlanePoint>& q_prime,
                     const std::vector<TimeUnknownAnchor>& tu,
                     const std::vector<TimeKnownAnchor>& tk, double tau);

struct LossGraph {
    Var match;
    Var bound;
    Var reg;
    Var total;  // match + bound + lambda * reg
};

// Builds the full objective on the tape. q_prime and delta are T x 2 nodes
// from the network graph; log_tau feeds the soft-matching temperature.
// Requires at least one anchor.
LossGraph build_loss_graph(Tape& tape, Var q_prime, Var delta, Var log_tau,
                           const std::vector<TimeUnknownAnchor>& tu,
                           const std::vector<TimeKnownAnchor>& tk, const ObjectiveConfig& cfg);

}  // namespace retailopt
