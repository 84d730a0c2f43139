#include "retailopt/transform_net.hpp"

#include <cmath>
#include <stdexcept>

#include "retailopt/rng.hpp"

namespace retailopt {

double TransformNetParams::tau() const { return std::exp(log_tau.v[0]); }

std::vector<Tensor*> TransformNetParams::tensors() {
    return {&Wq, &Wk, &Wv, &W1, &b1, &W2, &b2, &W3, &b3, &log_tau};
}

std::vector<const Tensor*> TransformNetParams::tensors() const {
    return {&Wq, &Wk, &Wv, &W1, &b1, &W2, &b2, &W3, &b3, &log_tau};
}

namespace {

Tensor uniform_init(int rows, int cols, Rng& rng) {
    Tensor t(rows, cols);
    const double bound = std::sqrt(1.0 / rows);  // fan_in = rows for x^T W layouts
    for (auto& x : t.v) x = rng.uniform(-bound, bound);
    return t;
}

}  // namespace

TransformNetParams init_params(int d, std::uint64_t rng_seed) {
    if (d < 1) throw std::invalid_argument("init_params: d must be >= 1");
    Rng rng(rng_seed);
    TransformNetParams p;
    p.d = d;
    p.Wq = uniform_init(2, d, rng);
    p.Wk = uniform_init(2, d, rng);
    p.Wv = uniform_init(2, d, rng);
    const int z_dim = 2 + d + 1;
    p.W1 = uniform_init(z_dim, kHidden1, rng);
    p.b1 = Tensor(1, kHidden1);
    p.W2 = uniform_init(kHidden1, kHidden2, rng);
    p.b2 = Tensor(1, kHidden2);
    p.W3 = Tensor(kHidden2, 2);  // zero output head: identity transform at start
    p.b3 = Tensor(1, 2);
    p.log_tau = Tensor::scalar(std::log(100.0));
    return p;
}

Tensor anchor_matrix(const std::vector<TimeUnknownAnchor>& tu,
                     const std::vector<TimeKnownAnchor>& tk) {
    Tensor x(static_cast<int>(tu.size() + tk.size()), 2);
    int i = 0;
    for (const auto& a : tu) {
        x.at(i, 0) = a.location.x;
        x.at(i, 1) = a.location.y;
        ++i;
    }
    for (const auto& a : tk) {
        x.at(i, 0) = a.location.x;
        x.at(i, 1) = a.location.y;
        ++i;
    }
    return x;
}

Tensor trajectory_matrix(const RelativeTrajectory& q) {
    Tensor t(static_cast<int>(q.length()), 2);
    for (int i = 0; i < t.rows; ++i) {
        t.at(i, 0) = q.points[i].x;
        t.at(i, 1) = q.points[i].y;
    }
    return t;
}

NetGraph build_net_graph(Tape& tape, const TransformNetParams& params, const Tensor& q,
                         const Tensor& anchors) {
    if (anchors.rows < 1) throw std::invalid_argument("build_net_graph: empty anchor matrix");
    if (q.rows < 2) throw std::invalid_argument("build_net_graph: trajectory must have T >= 2");

    NetGraph g;
    for (const Tensor* t : params.tensors()) g.param_leaves.push_back(tape.leaf(*t));
    const Var wq = g.param_leaves[0], wk = g.param_leaves[1], wv = g.param_leaves[2];
    const Var w1 = g.param_leaves[3], b1 = g.param_leaves[4];
    const Var w2 = g.param_leaves[5], b2 = g.param_leaves[6];
    const Var w3 = g.param_leaves[7], b3 = g.param_leaves[8];
    g.log_tau = g.param_leaves[9];

    g.q_leaf = tape.leaf(q);
    const Var x_leaf = tape.leaf(anchors);

    // H = attn(Q Wq, X Wk, X Wv)
    const Var queries = tape.matmul(g.q_leaf, wq);
    const Var keys = tape.matmul(x_leaf, wk);
    const Var values = tape.matmul(x_leaf, wv);
    const Var scores =
        tape.affine(tape.matmul(queries, keys, /*trans_b=*/true), 1.0 / std::sqrt(params.d), 0.0);
    g.attention = tape.softmax_rows(scores);
    const Var h = tape.matmul(g.attention, values);

    // z_t = cat(q_t, h_t, t_norm), t_norm = (t-1)/(T-1)
    Tensor tcol(q.rows, 1);
    for (int i = 0; i < q.rows; ++i) tcol.v[i] = static_cast<double>(i) / (q.rows - 1);
    const Var z = tape.concat_cols({g.q_leaf, h, tape.leaf(std::move(tcol))});

    const Var a1 = tape.relu(tape.add_row(tape.matmul(z, w1), b1));
    const Var a2 = tape.relu(tape.add_row(tape.matmul(a1, w2), b2));
    g.delta = tape.add_row(tape.matmul(a2, w3), b3);
    g.q_prime = tape.add(g.q_leaf, g.delta);
    return g;
}

}  // namespace retailopt
