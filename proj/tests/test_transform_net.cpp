#include <doctest.h>

#include <cmath>

#include "retailopt/rng.hpp"
#include "retailopt/transform_net.hpp"
#include "test_util.hpp"

using namespace retailopt;
using namespace retailopt::testutil;

namespace {

RelativeTrajectory line_traj(std::size_t t_len) {
    RelativeTrajectory q;
    q.dt = 0.5;
    for (std::size_t i = 0; i < t_len; ++i)
        q.points.push_back({0.07 * static_cast<double>(i), 0.02 * static_cast<double>(i)});
    return q;
}

Tensor random_anchors(int n, std::uint64_t seed) {
    Rng rng(seed);
    Tensor x(n, 2);
    for (auto& v : x.v) v = rng.uniform();
    return x;
}

}  // namespace

TEST_CASE("init yields the identity transform and tau = 100") {
    const TransformNetParams params = init_params(kDefaultAttentionDim, 7);
    CHECK(params.tau() == doctest::Approx(100.0).epsilon(1e-14));

    const RelativeTrajectory q = line_traj(9);
    Tape tape;
    const NetGraph net =
        build_net_graph(tape, params, trajectory_matrix(q), random_anchors(3, 1));
    for (double v : tape.value(net.delta).v) CHECK(v == 0.0);
    const Tensor& qp = tape.value(net.q_prime);
    for (std::size_t i = 0; i < q.length(); ++i) {
        CHECK(qp.at(static_cast<int>(i), 0) == q.points[i].x);
        CHECK(qp.at(static_cast<int>(i), 1) == q.points[i].y);
    }
}

TEST_CASE("same seed gives identical parameters") {
    const TransformNetParams a = init_params(kDefaultAttentionDim, 42);
    const TransformNetParams b = init_params(kDefaultAttentionDim, 42);
    const auto ta = a.tensors(), tb = b.tensors();
    REQUIRE(ta.size() == tb.size());
    for (std::size_t i = 0; i < ta.size(); ++i) CHECK(ta[i]->v == tb[i]->v);
    const TransformNetParams c = init_params(kDefaultAttentionDim, 43);
    CHECK(a.Wq.v != c.Wq.v);
}

TEST_CASE("attention rows sum to one") {
    const TransformNetParams params = init_params(kDefaultAttentionDim, 3);
    Tape tape;
    const NetGraph net =
        build_net_graph(tape, params, trajectory_matrix(line_traj(12)), random_anchors(5, 2));
    const Tensor& att = tape.value(net.attention);
    REQUIRE(att.rows == 12);
    REQUIRE(att.cols == 5);
    for (int t = 0; t < att.rows; ++t) {
        double sum = 0.0;
        for (int j = 0; j < att.cols; ++j) sum += att.at(t, j);
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("single anchor gets weight exactly one") {
    const TransformNetParams params = init_params(kDefaultAttentionDim, 3);
    Tape tape;
    const NetGraph net =
        build_net_graph(tape, params, trajectory_matrix(line_traj(6)), random_anchors(1, 4));
    for (double v : tape.value(net.attention).v) CHECK(v == 1.0);
}

TEST_CASE("H is invariant under anchor permutation") {
    TransformNetParams params = init_params(kDefaultAttentionDim, 9);
    // Non-zero output head so a difference anywhere would surface in delta too.
    Rng rng(31);
    for (auto& v : params.W3.v) v = rng.uniform(-0.1, 0.1);

    const Tensor q = trajectory_matrix(line_traj(8));
    const Tensor anchors = random_anchors(4, 5);
    Tensor permuted(4, 2);
    const int perm[4] = {2, 0, 3, 1};
    for (int i = 0; i < 4; ++i) {
        permuted.at(i, 0) = anchors.at(perm[i], 0);
        permuted.at(i, 1) = anchors.at(perm[i], 1);
    }

    const auto h_of = [&](const Tensor& x) {
        Tape tape;
        const NetGraph net = build_net_graph(tape, params, q, x);
        Tensor xwv(x.rows, params.d);
        gemm(x, false, params.Wv, false, xwv, false);
        Tensor h(q.rows, params.d);
        gemm(tape.value(net.attention), false, xwv, false, h, false);
        return std::make_pair(h, tape.value(net.delta));
    };
    const auto [h1, d1] = h_of(anchors);
    const auto [h2, d2] = h_of(permuted);
    for (std::size_t i = 0; i < h1.v.size(); ++i) CHECK(h1.v[i] == doctest::Approx(h2.v[i]).epsilon(1e-12));
    for (std::size_t i = 0; i < d1.v.size(); ++i) CHECK(d1.v[i] == doctest::Approx(d2.v[i]).epsilon(1e-12));
}

TEST_CASE("zero W_v removes anchor influence") {
    TransformNetParams params = init_params(kDefaultAttentionDim, 11);
    Rng rng(33);
    for (auto& v : params.W3.v) v = rng.uniform(-0.1, 0.1);
    std::fill(params.Wv.v.begin(), params.Wv.v.end(), 0.0);

    const Tensor q = trajectory_matrix(line_traj(7));
    Tape t1, t2;
    const NetGraph n1 = build_net_graph(t1, params, q, random_anchors(3, 6));
    const NetGraph n2 = build_net_graph(t2, params, q, random_anchors(5, 7));
    CHECK(t1.value(n1.delta).v == t2.value(n2.delta).v);
}

TEST_CASE("output length matches input length") {
    const TransformNetParams params = init_params(kDefaultAttentionDim, 1);
    for (int t_len : {2, 3, 17, 50}) {
        Tape tape;
        const NetGraph net = build_net_graph(
            tape, params, trajectory_matrix(line_traj(static_cast<std::size_t>(t_len))),
            random_anchors(2, 8));
        CHECK(tape.value(net.delta).rows == t_len);
        CHECK(tape.value(net.delta).cols == 2);
    }
}

TEST_CASE("empty anchor matrix is rejected") {
    const TransformNetParams params = init_params(kDefaultAttentionDim, 1);
    Tape tape;
    CHECK_THROWS(build_net_graph(tape, params, trajectory_matrix(line_traj(4)), Tensor(0, 2)));
}

TEST_CASE("anchor_matrix stacks TU rows before TK rows") {
    const std::vector<TimeUnknownAnchor> tu = {{{0.1, 0.2}}, {{0.3, 0.4}}};
    const std::vector<TimeKnownAnchor> tk = {{{0.5, 0.6}, 1}};
    const Tensor x = anchor_matrix(tu, tk);
    REQUIRE(x.rows == 3);
    CHECK(x.at(0, 0) == 0.1);
    CHECK(x.at(1, 1) == 0.4);
    CHECK(x.at(2, 0) == 0.5);
}
