#include "retailopt/objective.hpp"

#include <cmath>
#include <stdexcept>

namespace retailopt {

Tensor match_weights(const std::vector<PlanePoint>& q_prime,
                     const std::vector<TimeUnknownAnchor>& tu,
                     const std::vector<TimeKnownAnchor>& tk, double tau) {
    if (tau <= 0.0) throw std::invalid_argument("match_weights: tau must be > 0");
    const int t_len = static_cast<int>(q_prime.size());
    const int j_len = static_cast<int>(tu.size());
    Tensor w(t_len, j_len + static_cast<int>(tk.size()));

    for (int j = 0; j < j_len; ++j) {
        const PlanePoint x = tu[j].location.as_plane();
        double best = 0.0;
        std::vector<double> neg(t_len);
        for (int t = 0; t < t_len; ++t) {
            neg[t] = -q_prime[t].sqdist(x) / tau;
            if (t == 0 || neg[t] > best) best = neg[t];
        }
        double sum = 0.0;
        for (int t = 0; t < t_len; ++t) {
            neg[t] = std::exp(neg[t] - best);
            sum += neg[t];
        }
        for (int t = 0; t < t_len; ++t) w.at(t, j) = neg[t] / sum;
    }
    for (std::size_t k = 0; k < tk.size(); ++k) {
        w.at(tk[k].timestep - 1, j_len + static_cast<int>(k)) = 1.0;
    }
    return w;
}

LossGraph build_loss_graph(Tape& tape, Var q_prime, Var delta, Var log_tau,
                           const std::vector<TimeUnknownAnchor>& tu,
                           const std::vector<TimeKnownAnchor>& tk, const ObjectiveConfig& cfg) {
    if (tu.empty() && tk.empty())
        throw std::invalid_argument("build_loss_graph: at least one anchor required");
    const int t_len = tape.value(q_prime).rows;

    // Matching term: per-timestep max over anchors of confidence * sq-distance.
    std::vector<Var> products;
    if (!tu.empty()) {
        Tensor x_tu(static_cast<int>(tu.size()), 2);
        for (std::size_t j = 0; j < tu.size(); ++j) {
            x_tu.at(static_cast<int>(j), 0) = tu[j].location.x;
            x_tu.at(static_cast<int>(j), 1) = tu[j].location.y;
        }
        const Var dist2 = tape.pairwise_sqdist(q_prime, std::move(x_tu));
        // -1/tau with tau = exp(log_tau); gradient flows through both the
        // numerator and the normalizing sum of the softmax.
        const Var neg_inv_tau = tape.affine(tape.exp(tape.affine(log_tau, -1.0, 0.0)), -1.0, 0.0);
        const Var weights = tape.softmax_cols(tape.scale_by(dist2, neg_inv_tau));
        products.push_back(tape.mul(weights, dist2));
    }
    if (!tk.empty()) {
        Tensor x_tk(static_cast<int>(tk.size()), 2);
        Tensor mask(t_len, static_cast<int>(tk.size()));
        for (std::size_t k = 0; k < tk.size(); ++k) {
            x_tk.at(static_cast<int>(k), 0) = tk[k].location.x;
            x_tk.at(static_cast<int>(k), 1) = tk[k].location.y;
            mask.at(tk[k].timestep - 1, static_cast<int>(k)) = 1.0;
        }
        const Var dist2 = tape.pairwise_sqdist(q_prime, std::move(x_tk));
        products.push_back(tape.mul_const(dist2, std::move(mask)));
    }
    const Var all = products.size() == 1 ? products[0] : tape.concat_cols(products);

    LossGraph g;
    g.match = tape.sum_all(tape.max_rows(all));

    // Boundary: max over t of ||ReLU(-q'_t) + ReLU(q'_t - 1)||^2.
    const Var below = tape.relu(tape.affine(q_prime, -1.0, 0.0));
    const Var above = tape.relu(tape.affine(q_prime, 1.0, -1.0));
    g.bound = tape.max_all(tape.row_sum(tape.square(tape.add(below, above))));

    // Velocity regularizer: sum over t of ||delta_t - delta_{t-1}||_2.
    // A single-step trajectory has no velocity change to penalize.
    g.reg = t_len >= 2 ? tape.sum_all(tape.row_l2norm(tape.time_diff(delta)))
                       : tape.leaf(Tensor::scalar(0.0));

    g.total = tape.add(g.match, tape.add(g.bound, tape.affine(g.reg, cfg.lambda_reg, 0.0)));
    return g;
}

}  // namespace retailopt
