#include <doctest.h>

#include <cmath>

#include "retailopt/objective.hpp"
#include "retailopt/rng.hpp"

using namespace retailopt;

namespace {

Tensor points_tensor(const std::vector<PlanePoint>& pts) {
    Tensor t(static_cast<int>(pts.size()), 2);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        t.at(static_cast<int>(i), 0) = pts[i].x;
        t.at(static_cast<int>(i), 1) = pts[i].y;
    }
    return t;
}

struct LossValues {
    double match, bound, reg, total;
};

// Evaluates the objective with q_prime, delta and log_tau as free leaves.
LossValues eval_loss(const std::vector<PlanePoint>& q_prime,
                     const std::vector<PlanePoint>& delta, double log_tau,
                     const std::vector<TimeUnknownAnchor>& tu,
                     const std::vector<TimeKnownAnchor>& tk, const ObjectiveConfig& cfg) {
    Tape tape;
    const Var qp = tape.leaf(points_tensor(q_prime));
    const Var d = tape.leaf(points_tensor(delta));
    const Var lt = tape.leaf(Tensor::scalar(log_tau));
    const LossGraph g = build_loss_graph(tape, qp, d, lt, tu, tk, cfg);
    return {tape.value(g.match).v[0], tape.value(g.bound).v[0], tape.value(g.reg).v[0],
            tape.value(g.total).v[0]};
}

}  // namespace

TEST_CASE("match weights: singleton softmax is one") {
    const Tensor w = match_weights({{0.5, 0.5}}, {{{0.8, 0.5}}}, {}, 1.0);
    REQUIRE(w.rows == 1);
    REQUIRE(w.cols == 1);
    CHECK(w.v[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("match weights: equidistant timesteps split evenly") {
    const Tensor w = match_weights({{0.4, 0.5}, {0.6, 0.5}}, {{{0.5, 0.5}}}, {}, 0.7);
    CHECK(w.at(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(w.at(1, 0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("match weights: time-known column is one-hot at its timestep") {
    std::vector<PlanePoint> qp(5, PlanePoint{0.5, 0.5});
    const Tensor w = match_weights(qp, {}, {{{0.3, 0.3}, 3}}, 1.0);
    REQUIRE(w.rows == 5);
    REQUIRE(w.cols == 1);
    for (int t = 0; t < 5; ++t) CHECK(w.at(t, 0) == (t == 2 ? 1.0 : 0.0));
}

TEST_CASE("match weights: TU columns sum to one for any tau") {
    Rng rng(3);
    std::vector<PlanePoint> qp;
    for (int t = 0; t < 12; ++t) qp.push_back({rng.uniform(), rng.uniform()});
    const std::vector<TimeUnknownAnchor> tu = {{{0.2, 0.9}}, {{0.9, 0.1}}};
    for (double tau : {1e-3, 0.02, 1.0, 100.0}) {
        const Tensor w = match_weights(qp, tu, {}, tau);
        for (int j = 0; j < w.cols; ++j) {
            double sum = 0.0;
            for (int t = 0; t < w.rows; ++t) sum += w.at(t, j);
            CHECK(std::abs(sum - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("match loss: T=1 TU anchor at distance 0.3 gives 0.09") {
    const auto v = eval_loss({{0.5, 0.5}}, {{0.0, 0.0}}, 0.0, {{{0.8, 0.5}}}, {}, {});
    CHECK(v.match == doctest::Approx(0.09).epsilon(1e-12));
}

TEST_CASE("match loss: TK anchor offset 0.1 contributes 0.01") {
    const auto v = eval_loss({{0.4, 0.5}, {0.9, 0.9}}, {{0.0, 0.0}, {0.0, 0.0}}, 0.0, {},
                             {{{0.3, 0.5}, 1}}, {});
    CHECK(v.match == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("match loss: exact pass-through is zero") {
    const auto v = eval_loss({{0.3, 0.5}, {0.7, 0.5}}, {{0.0, 0.0}, {0.0, 0.0}}, 0.0,
                             {{{0.7, 0.5}}}, {{{0.3, 0.5}, 1}}, {});
    // The TU anchor sits exactly on q'_2; softmax weight at the off timestep
    // multiplies a positive distance, so only a tiny tau keeps it negligible.
    const auto sharp = eval_loss({{0.3, 0.5}, {0.7, 0.5}}, {{0.0, 0.0}, {0.0, 0.0}},
                                 std::log(1e-4), {{{0.7, 0.5}}}, {{{0.3, 0.5}, 1}}, {});
    CHECK(v.match >= 0.0);
    CHECK(sharp.match == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("bound loss hand values") {
    CHECK(eval_loss({{0.5, 0.5}, {0.2, 0.8}}, {{0, 0}, {0, 0}}, 0.0, {{{0.5, 0.5}}}, {}, {})
              .bound == 0.0);
    CHECK(eval_loss({{0.5, 0.5}, {1.2, 0.5}}, {{0, 0}, {0, 0}}, 0.0, {{{0.5, 0.5}}}, {}, {})
              .bound == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(eval_loss({{-0.1, 1.1}, {0.5, 0.5}}, {{0, 0}, {0, 0}}, 0.0, {{{0.5, 0.5}}}, {}, {})
              .bound == doctest::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("reg loss hand values") {
    // Constant delta (rigid translation) telescopes to zero.
    CHECK(eval_loss({{0.1, 0.1}, {0.2, 0.2}, {0.3, 0.3}},
                    {{0.05, -0.02}, {0.05, -0.02}, {0.05, -0.02}}, 0.0, {{{0.5, 0.5}}}, {}, {})
              .reg == 0.0);
    CHECK(eval_loss({{0.1, 0.1}, {0.2, 0.2}}, {{0.0, 0.0}, {0.3, 0.4}}, 0.0, {{{0.5, 0.5}}}, {},
                    {})
              .reg == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("total composes the three terms with lambda") {
    Rng rng(5);
    std::vector<PlanePoint> qp, delta;
    for (int t = 0; t < 7; ++t) {
        qp.push_back({rng.uniform(-0.2, 1.2), rng.uniform(-0.2, 1.2)});
        delta.push_back({rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)});
    }
    const std::vector<TimeUnknownAnchor> tu = {{{0.3, 0.3}}, {{0.8, 0.6}}};
    const std::vector<TimeKnownAnchor> tk = {{{0.5, 0.1}, 2}};

    ObjectiveConfig cfg;
    cfg.lambda_reg = 0.25;
    const auto v = eval_loss(qp, delta, -1.3, tu, tk, cfg);
    CHECK(v.total ==
          doctest::Approx(v.match + v.bound + cfg.lambda_reg * v.reg).epsilon(1e-14));
    CHECK(v.total >= 0.0);

    cfg.lambda_reg = 0.0;
    const auto v0 = eval_loss(qp, delta, -1.3, tu, tk, cfg);
    CHECK(v0.total == doctest::Approx(v0.match + v0.bound).epsilon(1e-14));
}

TEST_CASE("T=1 single-TU match loss is increasing in distance") {
    double prev = -1.0;
    for (double d : {0.05, 0.1, 0.2, 0.4, 0.8}) {
        const auto v = eval_loss({{0.5, 0.5}}, {{0.0, 0.0}}, 0.0, {{{0.5 + d, 0.5}}}, {}, {});
        CHECK(v.match > prev);
        prev = v.match;
    }
}

TEST_CASE("objective rejects empty anchor sets") {
    Tape tape;
    const Var qp = tape.leaf(points_tensor({{0.5, 0.5}, {0.6, 0.5}}));
    const Var d = tape.leaf(points_tensor({{0, 0}, {0, 0}}));
    const Var lt = tape.leaf(Tensor::scalar(0.0));
    CHECK_THROWS(build_loss_graph(tape, qp, d, lt, {}, {}, {}));
}

TEST_CASE("objective gradients match central differences") {
    Rng rng(9);
    std::vector<PlanePoint> base;
    for (int t = 0; t < 6; ++t) base.push_back({rng.uniform(), rng.uniform()});
    const std::vector<TimeUnknownAnchor> tu = {{{0.2, 0.7}}, {{0.9, 0.4}}};
    const std::vector<TimeKnownAnchor> tk = {{{0.4, 0.2}, 3}};
    const Tensor q_const = points_tensor(base);

    Tensor qp0(6, 2);
    for (std::size_t i = 0; i < qp0.v.size(); ++i) qp0.v[i] = q_const.v[i] + rng.uniform(-0.15, 0.15);
    std::vector<Tensor> params = {qp0, Tensor::scalar(-0.8)};

    const auto build = [&](const std::vector<Tensor>& p, Tape& tape) {
        const Var qp = tape.leaf(p[0]);
        const Var qc = tape.leaf(q_const);
        const Var lt = tape.leaf(p[1]);
        ObjectiveConfig cfg;
        cfg.lambda_reg = 0.01;
        return build_loss_graph(tape, qp, tape.sub(qp, qc), lt, tu, tk, cfg).total;
    };
    const auto loss = [&](const std::vector<Tensor>& p) {
        Tape tape;
        return tape.value(build(p, tape)).v[0];
    };
    const auto grad = [&](const std::vector<Tensor>& p) {
        Tape tape;
        tape.backward(build(p, tape));
        return std::vector<Tensor>{tape.grad({0}), tape.grad({2})};
    };
    CHECK(finite_difference_check(loss, grad, params, 1e-6) < 1e-4);
}
