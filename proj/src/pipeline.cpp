#include "retailopt/pipeline.hpp"

#include <stdexcept>

#include "retailopt/baselines.hpp"

namespace retailopt {

EstimateResult run_method(const Session& session, const std::string& method,
                          const RunConfig& cfg) {
    EstimateResult result;
    result.method = method;
    if (method == "retailopt") {
        ContinuousResult cont =
            optimize_transform(session, cfg.attention_dim, cfg.objective, cfg.optimizer);
        result.trajectory =
            project(cont.q_prime, session.environment, session.relative.dt, cfg.viterbi);
        result.loss_trace = std::move(cont.trace.loss);
    } else if (method == "tsp") {
        result.trajectory = tsp_baseline(session, cfg.viterbi);
    } else if (method == "raw") {
        result.trajectory = anchored_raw_baseline(session);
    } else {
        throw std::invalid_argument("unknown method: " + method);
    }
    return result;
}

EvalReport run_suite(const std::vector<SuiteEntry>& entries,
                     const std::vector<std::string>& methods, const RunConfig& cfg) {
    std::vector<EvalCell> cells;
    for (const auto& entry : entries) {
        for (const auto& method : methods) {
            EvalCell cell;
            cell.scenario_id = entry.scenario_id;
            cell.method = method;
            cell.seed = entry.seed;
            cell.t_len = entry.session.relative.length();
            if (!entry.session.ground_truth) {
                cell.diagnostic = "missing ground truth";
                cells.push_back(std::move(cell));
                continue;
            }
            try {
                const EstimateResult est = run_method(entry.session, method, cfg);
                cell.ape_m = average_positional_error(est.trajectory, *entry.session.ground_truth,
                                                      entry.session.environment.scale_m,
                                                      cfg.eval_hz);
            } catch (const std::exception& e) {
                cell.diagnostic = e.what();
            }
            cells.push_back(std::move(cell));
        }
    }
    return assemble_report(std::move(cells));
}

}  // namespace retailopt
