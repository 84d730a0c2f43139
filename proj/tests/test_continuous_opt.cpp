#include <doctest.h>

#include <cmath>

#include "retailopt/continuous_opt.hpp"
#include "retailopt/synth.hpp"
#include "test_util.hpp"

using namespace retailopt;
using namespace retailopt::testutil;

namespace {

// Short scenario for optimizer tests: tiny grid, quick walk, zero drift.
ScenarioConfig fast_scenario() {
    ScenarioConfig cfg;
    cfg.shelf_rows = 2;
    cfg.shelf_cols = 2;
    cfg.n_tu_anchors = 2;
    cfg.n_detours = 0;
    cfg.walk_speed_mps = 1.2;
    cfg.pause_seconds = 1.0;
    cfg.drift = {0.0, 0.0, 0.0};
    return cfg;
}

OptimizerConfig short_opt(int iterations) {
    OptimizerConfig cfg;
    cfg.iterations = iterations;
    cfg.tau0 = 0.02;  // sharp matching; see README on temperature choice
    return cfg;
}

}  // namespace

TEST_CASE("adam first step moves by about -lr * sign(g)") {
    OptimizerConfig cfg;
    cfg.learning_rate = 0.001;
    Tensor p(1, 3);
    p.v = {1.0, 2.0, 3.0};
    Tensor g(1, 3);
    g.v = {0.4, -2.0, 1e-3};
    AdamState state;
    adam_step({&p}, {g}, state, cfg);
    CHECK(p.v[0] == doctest::Approx(1.0 - 0.001).epsilon(1e-4));
    CHECK(p.v[1] == doctest::Approx(2.0 + 0.001).epsilon(1e-4));
    CHECK(p.v[2] == doctest::Approx(3.0 - 0.001).epsilon(1e-2));
}

TEST_CASE("adam leaves parameters unchanged on zero gradient") {
    OptimizerConfig cfg;
    Tensor p(2, 2);
    p.v = {1, 2, 3, 4};
    const std::vector<double> before = p.v;
    AdamState state;
    adam_step({&p}, {Tensor(2, 2)}, state, cfg);
    CHECK(p.v == before);
}

TEST_CASE("adam is deterministic") {
    OptimizerConfig cfg;
    Tensor p1(1, 2), p2(1, 2);
    p1.v = p2.v = {0.5, -0.5};
    Tensor g(1, 2);
    g.v = {0.3, 0.7};
    AdamState s1, s2;
    for (int i = 0; i < 10; ++i) {
        adam_step({&p1}, {g}, s1, cfg);
        adam_step({&p2}, {g}, s2, cfg);
    }
    CHECK(p1.v == p2.v);
}

TEST_CASE("optimize_transform is deterministic") {
    const Session s = generate_session(fast_scenario(), 77);
    const auto a = optimize_transform(s, 8, {}, short_opt(40));
    const auto b = optimize_transform(s, 8, {}, short_opt(40));
    REQUIRE(a.q_prime.size() == b.q_prime.size());
    for (std::size_t i = 0; i < a.q_prime.size(); ++i) CHECK(a.q_prime[i] == b.q_prime[i]);
    CHECK(a.trace.loss == b.trace.loss);
}

TEST_CASE("aligned session starts near zero loss and does not regress") {
    // Zero drift: the relative trajectory is the truth translated to the
    // origin; translating it back onto the TK anchor reproduces an aligned Q.
    Session s = generate_session(fast_scenario(), 5);
    const PlanePoint shift =
        s.anchors_tk.front().location.as_plane() - s.relative.points.front();
    for (auto& p : s.relative.points) p = p + shift;

    const auto res = optimize_transform(s, 8, {}, short_opt(120));
    REQUIRE(!res.trace.loss.empty());
    CHECK(res.trace.loss.front() < 0.05);
    CHECK(res.trace.loss.back() <= res.trace.loss.front() + 1e-12);
}

TEST_CASE("pure translation offset is recovered") {
    const Session s = generate_session(fast_scenario(), 21);
    REQUIRE(s.ground_truth.has_value());
    const auto res = optimize_transform(s, 16, {}, short_opt(400));
    const auto& gt = s.ground_truth->points;
    REQUIRE(res.q_prime.size() == gt.size());
    double sq = 0.0;
    for (std::size_t i = 0; i < gt.size(); ++i) sq += res.q_prime[i].sqdist(gt[i].as_plane());
    const double rmse = std::sqrt(sq / static_cast<double>(gt.size()));
    CHECK(rmse < 0.05);
}

TEST_CASE("trace length equals iterations and tau stays positive") {
    const Session s = generate_session(fast_scenario(), 9);
    const auto res = optimize_transform(s, 8, {}, short_opt(30));
    CHECK(res.trace.loss.size() == 30);
    CHECK(res.trace.final_tau > 0.0);
}

TEST_CASE("endpoint loss does not increase across seeds") {
    int ok = 0;
    const int runs = 8;
    for (int seed = 0; seed < runs; ++seed) {
        const Session s = generate_session(fast_scenario(), 100 + seed);
        const auto res = optimize_transform(s, 8, {}, short_opt(80));
        if (res.trace.loss.back() <= res.trace.loss.front() + 1e-12) ++ok;
    }
    CHECK(ok >= runs - 1);  // endpoint-level, not per-step, monotonicity
}

TEST_CASE("smoothed loss trace is non-increasing") {
    const Session s = generate_session(fast_scenario(), 31);
    const auto res = optimize_transform(s, 8, {}, short_opt(200));
    const auto& loss = res.trace.loss;
    const int win = 50;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t start = 0; start + win <= loss.size(); start += win) {
        double mean = 0.0;
        for (int i = 0; i < win; ++i) mean += loss[start + i];
        mean /= win;
        CHECK(mean <= prev + 1e-9);
        prev = mean;
    }
}
