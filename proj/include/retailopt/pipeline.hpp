#pragma once

#include <string>
#include <vector>

#include "retailopt/continuous_opt.hpp"
#include "retailopt/discrete_opt.hpp"
#include "retailopt/eval.hpp"
#include "retailopt/objective.hpp"
#include "retailopt/types.hpp"

namespace retailopt {

// All hyperparameters of one experiment run.
struct RunConfig {
    ObjectiveConfig objective;
    OptimizerConfig optimizer;
    ViterbiConfig viterbi;
    int attention_dim = 32;
    double eval_hz = 2.0;
};

struct EstimateResult {
    std::string method;
    AbsoluteTrajectory trajectory;
    std::vector<double> loss_trace;  // retailopt only
};

// method: "retailopt" (continuous + discrete), "tsp", or "raw".
EstimateResult run_method(const Session& session, const std::string& method,
                          const RunConfig& cfg);

struct SuiteEntry {
    std::string scenario_id;
    std::uint64_t seed = 0;
    Session session;
};

// APE table over (scenario, method); method failures become empty cells with a
// diagnostic instead of aborting the suite.
EvalReport run_suite(const std::vector<SuiteEntry>& entries,
                     const std::vector<std::string>& methods, const RunConfig& cfg);

}  // namespace retailopt
