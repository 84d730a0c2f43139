#include "retailopt/eval.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace retailopt {

double average_positional_error(const AbsoluteTrajectory& est, const AbsoluteTrajectory& gt,
                                double scale_m, double eval_hz) {
    if (est.length() != gt.length())
        throw std::invalid_argument("average_positional_error: length mismatch");
    if (est.dt != gt.dt) throw std::invalid_argument("average_positional_error: dt mismatch");
    if (est.length() == 0) throw std::invalid_argument("average_positional_error: empty");

    const long stride = std::max(1L, std::lround(1.0 / (gt.dt * eval_hz)));
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t t = 0; t < gt.length(); t += stride) {
        sum += scale_m * est.points[t].dist(gt.points[t]);
        ++count;
    }
    return sum / static_cast<double>(count);
}

std::string EvalReport::to_csv() const {
    std::string out = "scenario_id,method,seed,carry_mode,T,ape_m\n";
    char buf[128];
    for (const auto& c : cells) {
        if (c.ape_m) {
            std::snprintf(buf, sizeof(buf), "%.6f", *c.ape_m);
            out += c.scenario_id + "," + c.method + "," + std::to_string(c.seed) + ",," +
                   std::to_string(c.t_len) + "," + buf + "\n";
        } else {
            out += c.scenario_id + "," + c.method + "," + std::to_string(c.seed) + ",," +
                   std::to_string(c.t_len) + ",\n";
        }
    }
    for (const auto& [method, mean] : method_mean) {
        std::snprintf(buf, sizeof(buf), "%.6f", mean);
        out += "# mean," + method + "," + buf + "\n";
    }
    for (const auto& c : cells) {
        if (!c.ape_m)
            out += "# failed," + c.scenario_id + "," + c.method + "," + c.diagnostic + "\n";
    }
    return out;
}

EvalReport assemble_report(std::vector<EvalCell> cells) {
    EvalReport report;
    report.cells = std::move(cells);
    std::map<std::string, std::pair<double, int>> agg;
    std::vector<std::string> order;
    for (const auto& c : report.cells) {
        if (!agg.count(c.method)) order.push_back(c.method);
        if (c.ape_m) {
            agg[c.method].first += *c.ape_m;
            agg[c.method].second += 1;
        } else {
            agg[c.method];
        }
    }
    for (const auto& m : order) {
        const auto& [sum, n] = agg[m];
        if (n > 0) report.method_mean.emplace_back(m, sum / n);
    }
    return report;
}

}  // namespace retailopt
