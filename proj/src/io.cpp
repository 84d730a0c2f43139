#include "retailopt/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace retailopt {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw std::runtime_error("parse error at '" + where + "': " + what);
}

double as_number(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<int>();
}

std::pair<double, double> as_xy(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) fail(where, "expected [x, y]");
    return {as_number(j[0], where + "[0]"), as_number(j[1], where + "[1]")};
}

// Tracks consumed keys so unknown keys can be rejected.
class StrictObject {
  public:
    StrictObject(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j.is_object()) fail(where_, "expected an object");
    }

    const json* get(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    const json& require(const std::string& key) {
        const json* p = get(key);
        if (!p) fail(where_ + "." + key, "missing required field");
        return *p;
    }

    void number(const std::string& key, double& out) {
        if (const json* p = get(key)) out = as_number(*p, where_ + "." + key);
    }
    void integer(const std::string& key, int& out) {
        if (const json* p = get(key)) out = as_int(*p, where_ + "." + key);
    }
    void seed(const std::string& key, std::uint64_t& out) {
        if (const json* p = get(key)) {
            if (!p->is_number_unsigned() && !p->is_number_integer())
                fail(where_ + "." + key, "expected an integer seed");
            out = p->get<std::uint64_t>();
        }
    }

    void reject_unknown() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) fail(where_ + "." + it.key(), "unknown key");
    }

    const std::string& where() const { return where_; }

  private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string xy(double x, double y) { return "[" + fmt(x) + "," + fmt(y) + "]"; }

json parse_text(const std::string& text) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw std::runtime_error("parse error: malformed JSON");
    return j;
}

}  // namespace

Session parse_session(const std::string& json_text) {
    const json root = parse_text(json_text);
    StrictObject top(root, "session");
    Session s;

    StrictObject env(top.require("environment"), "environment");
    if (const json* p = env.get("name")) {
        if (!p->is_string()) fail("environment.name", "expected a string");
        s.environment.name = p->get<std::string>();
    }
    s.environment.scale_m = as_number(env.require("scale_m"), "environment.scale_m");
    const json& obstacles = env.require("obstacles");
    if (!obstacles.is_array()) fail("environment.obstacles", "expected an array");
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
        const std::string where = "environment.obstacles[" + std::to_string(i) + "]";
        StrictObject rect(obstacles[i], where);
        const auto [x0, y0] = as_xy(rect.require("min"), where + ".min");
        const auto [x1, y1] = as_xy(rect.require("max"), where + ".max");
        rect.reject_unknown();
        s.environment.obstacles.push_back({{x0, y0}, {x1, y1}});
    }
    env.reject_unknown();

    s.relative.dt = as_number(top.require("dt"), "dt");
    const json& rel = top.require("relative");
    if (!rel.is_array()) fail("relative", "expected an array of [x, y]");
    for (std::size_t i = 0; i < rel.size(); ++i) {
        const auto [x, y] = as_xy(rel[i], "relative[" + std::to_string(i) + "]");
        s.relative.points.push_back({x, y});
    }

    const json& tu = top.require("anchors_tu");
    if (!tu.is_array()) fail("anchors_tu", "expected an array of [x, y]");
    for (std::size_t i = 0; i < tu.size(); ++i) {
        const auto [x, y] = as_xy(tu[i], "anchors_tu[" + std::to_string(i) + "]");
        s.anchors_tu.push_back({{x, y}});
    }

    const json& tk = top.require("anchors_tk");
    if (!tk.is_array()) fail("anchors_tk", "expected an array of {loc, t}");
    for (std::size_t i = 0; i < tk.size(); ++i) {
        const std::string where = "anchors_tk[" + std::to_string(i) + "]";
        StrictObject a(tk[i], where);
        const auto [x, y] = as_xy(a.require("loc"), where + ".loc");
        const int t = as_int(a.require("t"), where + ".t");
        a.reject_unknown();
        s.anchors_tk.push_back({{x, y}, t});
    }

    if (const json* gt = top.get("ground_truth")) {
        if (!gt->is_array()) fail("ground_truth", "expected an array of [x, y]");
        AbsoluteTrajectory g;
        g.dt = s.relative.dt;
        for (std::size_t i = 0; i < gt->size(); ++i) {
            const auto [x, y] = as_xy((*gt)[i], "ground_truth[" + std::to_string(i) + "]");
            g.points.push_back({x, y});
        }
        s.ground_truth = std::move(g);
    }
    top.reject_unknown();
    return s;
}

std::string session_to_json(const Session& s) {
    std::ostringstream o;
    o << "{\n  \"environment\": {\n    \"name\": " << json(s.environment.name).dump()
      << ",\n    \"scale_m\": " << fmt(s.environment.scale_m) << ",\n    \"obstacles\": [";
    for (std::size_t i = 0; i < s.environment.obstacles.size(); ++i) {
        const auto& r = s.environment.obstacles[i];
        o << (i ? "," : "") << "\n      {\"min\": " << xy(r.min_corner.x, r.min_corner.y)
          << ", \"max\": " << xy(r.max_corner.x, r.max_corner.y) << "}";
    }
    o << (s.environment.obstacles.empty() ? "]" : "\n    ]") << "\n  },\n  \"dt\": "
      << fmt(s.relative.dt) << ",\n  \"relative\": [";
    for (std::size_t i = 0; i < s.relative.points.size(); ++i)
        o << (i ? "," : "") << xy(s.relative.points[i].x, s.relative.points[i].y);
    o << "],\n  \"anchors_tu\": [";
    for (std::size_t i = 0; i < s.anchors_tu.size(); ++i)
        o << (i ? "," : "") << xy(s.anchors_tu[i].location.x, s.anchors_tu[i].location.y);
    o << "],\n  \"anchors_tk\": [";
    for (std::size_t i = 0; i < s.anchors_tk.size(); ++i)
        o << (i ? "," : "") << "{\"loc\": "
          << xy(s.anchors_tk[i].location.x, s.anchors_tk[i].location.y)
          << ", \"t\": " << s.anchors_tk[i].timestep << "}";
    o << "]";
    if (s.ground_truth) {
        o << ",\n  \"ground_truth\": [";
        for (std::size_t i = 0; i < s.ground_truth->points.size(); ++i)
            o << (i ? "," : "") << xy(s.ground_truth->points[i].x, s.ground_truth->points[i].y);
        o << "]";
    }
    o << "\n}\n";
    return o.str();
}

RunConfig parse_run_config(const std::string& json_text) {
    const json root = parse_text(json_text);
    StrictObject top(root, "config");
    RunConfig cfg;
    top.number("lambda_reg", cfg.objective.lambda_reg);
    top.number("beta", cfg.viterbi.beta);
    top.number("tau0", cfg.optimizer.tau0);
    top.integer("iterations", cfg.optimizer.iterations);
    top.number("learning_rate", cfg.optimizer.learning_rate);
    top.number("adam_beta1", cfg.optimizer.adam_beta1);
    top.number("adam_beta2", cfg.optimizer.adam_beta2);
    top.number("adam_eps", cfg.optimizer.adam_eps);
    top.integer("n_samples", cfg.viterbi.n_samples);
    top.integer("d", cfg.attention_dim);
    top.number("eval_hz", cfg.eval_hz);
    std::uint64_t seed = 0;
    top.seed("seed", seed);
    cfg.optimizer.rng_seed = seed;
    cfg.viterbi.rng_seed = seed;
    top.reject_unknown();
    if (cfg.optimizer.iterations < 1) fail("config.iterations", "must be >= 1");
    if (cfg.optimizer.learning_rate <= 0.0) fail("config.learning_rate", "must be > 0");
    if (cfg.objective.lambda_reg < 0.0) fail("config.lambda_reg", "must be >= 0");
    if (cfg.viterbi.beta < 0.0) fail("config.beta", "must be >= 0");
    if (cfg.viterbi.n_samples < 1) fail("config.n_samples", "must be >= 1");
    if (cfg.optimizer.tau0 <= 0.0) fail("config.tau0", "must be > 0");
    return cfg;
}

ScenarioConfig parse_scenario_config(const std::string& json_text) {
    const json root = parse_text(json_text);
    StrictObject top(root, "scenario");
    ScenarioConfig cfg;
    top.integer("shelf_rows", cfg.shelf_rows);
    top.integer("shelf_cols", cfg.shelf_cols);
    top.number("corridor_width", cfg.corridor_width);
    top.integer("n_tu_anchors", cfg.n_tu_anchors);
    top.integer("n_detours", cfg.n_detours);
    top.number("walk_speed_mps", cfg.walk_speed_mps);
    top.number("pause_seconds", cfg.pause_seconds);
    top.number("dt", cfg.dt);
    top.number("scale_m", cfg.scale_m);
    if (const json* d = top.get("drift")) {
        StrictObject drift(*d, "scenario.drift");
        drift.number("heading_drift_rate", cfg.drift.heading_drift_rate);
        drift.number("scale_sigma", cfg.drift.scale_sigma);
        drift.number("white_noise_sigma", cfg.drift.white_noise_sigma);
        drift.integer("scale_segment_steps", cfg.drift.scale_segment_steps);
        drift.reject_unknown();
    }
    top.reject_unknown();
    return cfg;
}

std::string estimate_to_json(const EstimateResult& est, std::optional<double> runtime_ms) {
    std::ostringstream o;
    o << "{\n  \"method\": " << json(est.method).dump() << ",\n  \"trajectory\": [";
    for (std::size_t i = 0; i < est.trajectory.points.size(); ++i)
        o << (i ? "," : "") << xy(est.trajectory.points[i].x, est.trajectory.points[i].y);
    o << "]";
    if (!est.loss_trace.empty()) {
        o << ",\n  \"loss_trace\": [";
        for (std::size_t i = 0; i < est.loss_trace.size(); ++i)
            o << (i ? "," : "") << fmt(est.loss_trace[i]);
        o << "]";
    }
    if (runtime_ms) o << ",\n  \"runtime_ms\": " << fmt(*runtime_ms);
    o << "\n}\n";
    return o.str();
}

EstimateResult parse_estimate(const std::string& json_text) {
    const json root = parse_text(json_text);
    StrictObject top(root, "estimate");
    EstimateResult est;
    const json& m = top.require("method");
    if (!m.is_string()) fail("estimate.method", "expected a string");
    est.method = m.get<std::string>();
    const json& traj = top.require("trajectory");
    if (!traj.is_array()) fail("estimate.trajectory", "expected an array of [x, y]");
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto [x, y] = as_xy(traj[i], "estimate.trajectory[" + std::to_string(i) + "]");
        est.trajectory.points.push_back({x, y});
    }
    if (const json* lt = top.get("loss_trace")) {
        if (!lt->is_array()) fail("estimate.loss_trace", "expected an array");
        for (std::size_t i = 0; i < lt->size(); ++i)
            est.loss_trace.push_back(
                as_number((*lt)[i], "estimate.loss_trace[" + std::to_string(i) + "]"));
    }
    top.get("runtime_ms");
    top.reject_unknown();
    return est;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write file: " + tmp);
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("cannot rename into place: " + path);
    }
}

}  // namespace retailopt
