#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "retailopt/io.hpp"
#include "retailopt/pipeline.hpp"
#include "retailopt/svg_plot.hpp"
#include "retailopt/synth.hpp"

namespace fs = std::filesystem;
using namespace retailopt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInfeasible = 3;

RunConfig load_run_config(const std::string& path) {
    if (path.empty()) return RunConfig{};
    return parse_run_config(read_text_file(path));
}

Session load_session_checked(const std::string& path) {
    Session s = parse_session(read_text_file(path));
    const auto violations = validate_session(s);
    if (!violations.empty()) {
        std::string msg = path + ": invalid session:";
        for (const auto& v : violations) msg += "\n  - " + v;
        throw std::runtime_error(msg);
    }
    return s;
}

int cmd_generate(const std::string& config_path, const std::string& out_dir, int count,
                 std::uint64_t seed) {
    ScenarioConfig cfg;
    if (!config_path.empty()) cfg = parse_scenario_config(read_text_file(config_path));
    fs::create_directories(out_dir);

    std::string manifest = "{\n  \"count\": " + std::to_string(count) + ",\n  \"seed\": " +
                           std::to_string(seed) + ",\n  \"files\": [";
    for (int i = 0; i < count; ++i) {
        const Session s = generate_session(cfg, seed + static_cast<std::uint64_t>(i));
        char name[64];
        std::snprintf(name, sizeof(name), "session_%03d.json", i);
        write_text_atomic((fs::path(out_dir) / name).string(), session_to_json(s));
        manifest += std::string(i ? "," : "") + "\n    \"" + name + "\"";
    }
    manifest += "\n  ]\n}\n";
    write_text_atomic((fs::path(out_dir) / "manifest.json").string(), manifest);
    return kExitOk;
}

int cmd_estimate(const std::string& session_path, const std::string& config_path,
                 const std::string& out_path, const std::string& method) {
    const Session session = load_session_checked(session_path);
    const RunConfig cfg = load_run_config(config_path);

    const auto start = std::chrono::steady_clock::now();
    const EstimateResult result = run_method(session, method, cfg);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    write_text_atomic(out_path, estimate_to_json(result, ms));
    return kExitOk;
}

int cmd_eval(const std::string& sessions_dir, const std::string& methods_csv,
             const std::string& config_path, const std::string& out_path) {
    const RunConfig cfg = load_run_config(config_path);

    std::vector<std::string> methods;
    std::size_t pos = 0;
    while (pos <= methods_csv.size()) {
        const std::size_t comma = methods_csv.find(',', pos);
        const std::string m = methods_csv.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!m.empty()) methods.push_back(m);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (methods.empty()) throw std::runtime_error("eval: no methods given");

    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(sessions_dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.ends_with(".json") && name != "manifest.json")
            files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error("eval: no session files in " + sessions_dir);

    std::vector<SuiteEntry> entries;
    for (const auto& f : files) {
        SuiteEntry e;
        e.scenario_id = fs::path(f).stem().string();
        e.seed = cfg.optimizer.rng_seed;
        e.session = load_session_checked(f);
        if (!e.session.ground_truth)
            std::cerr << "warning: " << f << " has no ground truth; recorded as failed cells\n";
        entries.push_back(std::move(e));
    }

    const EvalReport report = run_suite(entries, methods, cfg);
    write_text_atomic(out_path, report.to_csv());
    return kExitOk;
}

int cmd_plot(const std::string& session_path, const std::vector<std::string>& estimate_paths,
             const std::string& out_path) {
    const Session session = load_session_checked(session_path);
    std::vector<std::pair<std::string, AbsoluteTrajectory>> estimates;
    for (const auto& p : estimate_paths) {
        EstimateResult est = parse_estimate(read_text_file(p));
        if (est.trajectory.length() == 0)
            throw std::runtime_error(p + ": estimate has an empty trajectory");
        est.trajectory.dt = session.relative.dt;
        estimates.emplace_back(est.method, std::move(est.trajectory));
    }
    write_text_atomic(out_path, render_svg(session, estimates));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RetailOpt indoor trajectory estimation"};
    app.require_subcommand(1);

    std::string config_path, out_path, session_path, sessions_dir, methods = "retailopt,tsp,raw";
    std::string method = "retailopt";
    std::vector<std::string> estimate_paths;
    int count = 1;
    std::uint64_t seed = 0;

    auto* generate = app.add_subcommand("generate", "Generate synthetic sessions");
    generate->add_option("--config", config_path, "Scenario config JSON");
    generate->add_option("--out", out_path, "Output directory")->required();
    generate->add_option("--count", count, "Number of sessions")->check(CLI::PositiveNumber);
    generate->add_option("--seed", seed, "Base seed");

    auto* estimate = app.add_subcommand("estimate", "Estimate a trajectory for one session");
    estimate->add_option("--session", session_path, "Session JSON")->required();
    estimate->add_option("--config", config_path, "Run config JSON");
    estimate->add_option("--out", out_path, "Output estimate JSON")->required();
    estimate->add_option("--method", method, "retailopt|tsp|raw")
        ->check(CLI::IsMember({"retailopt", "tsp", "raw"}));

    auto* eval = app.add_subcommand("eval", "APE report over a session directory");
    eval->add_option("--sessions", sessions_dir, "Directory of session JSON files")->required();
    eval->add_option("--methods", methods, "Comma-separated method list");
    eval->add_option("--config", config_path, "Run config JSON");
    eval->add_option("--out", out_path, "Output CSV")->required();

    auto* plot = app.add_subcommand("plot", "Render session and estimates as SVG");
    plot->add_option("--session", session_path, "Session JSON")->required();
    plot->add_option("--estimates", estimate_paths, "Estimate JSON files")->delimiter(',');
    plot->add_option("--out", out_path, "Output SVG")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (generate->parsed()) return cmd_generate(config_path, out_path, count, seed);
        if (estimate->parsed()) return cmd_estimate(session_path, config_path, out_path, method);
        if (eval->parsed()) return cmd_eval(sessions_dir, methods, config_path, out_path);
        if (plot->parsed()) return cmd_plot(session_path, estimate_paths, out_path);
    } catch (const InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
