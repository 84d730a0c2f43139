#pragma once

#include <optional>
#include <string>
#include <vector>

#include "retailopt/types.hpp"

namespace retailopt {

// Mean metric distance between the trajectories, subsampled to eval_hz
// (stride = round(1/(dt*eval_hz)), minimum 1, phase fixed at t=1).
double average_positional_error(const AbsoluteTrajectory& est, const AbsoluteTrajectory& gt,
                                double scale_m, double eval_hz = 2.0);

struct EvalCell {
    std::string scenario_id;
    std::string method;
    std::uint64_t seed = 0;
    std::size_t t_len = 0;
    std::optional<double> ape_m;    // empty when the method failed
    std::string diagnostic;         // failure reason, if any
};

struct EvalReport {
    std::vector<EvalCell> cells;                              // input order
    std::vector<std::pair<std::string, double>> method_mean;  // over successful cells

    std::string to_csv() const;
};

EvalReport assemble_report(std::vector<EvalCell> cells);

}  // namespace retailopt
