#pragma once

#include <cstdint>
#include <vector>

#include "retailopt/objective.hpp"
#include "retailopt/tape.hpp"
#include "retailopt/transform_net.hpp"
#include "retailopt/types.hpp"

namespace retailopt {

struct OptimizerConfig {
    int iterations = 1000;
    double learning_rate = 0.001;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double tau0 = 100.0;  // initial matching temperature
    std::uint64_t rng_seed = 0;  // parameter initialization
};

// Adam moment buffers matching a fixed parameter tensor order.
struct AdamState {
    std::vector<Tensor> m;
    std::vector<Tensor> v;
    long step = 0;
};

// Standard bias-corrected Adam update, in place.
void adam_step(std::vector<Tensor*> params, const std::vector<Tensor>& grads, AdamState& state,
               const OptimizerConfig& cfg);

struct OptimizationTrace {
    std::vector<double> loss;  // one entry per iteration
    double final_tau = 0.0;
    TransformNetParams final_params;
};

struct ContinuousResult {
    std::vector<PlanePoint> q_prime;
    OptimizationTrace trace;
};

// Full-batch gradient descent of the matching objective for a fixed number of
// iterations. Throws std::runtime_error naming the iteration if the loss goes
// non-finite or exceeds 1e6.
ContinuousResult optimize_transform(const Session& session, int attention_dim,
                                    const ObjectiveConfig& obj_cfg, const OptimizerConfig& cfg);

}  // namespace retailopt
