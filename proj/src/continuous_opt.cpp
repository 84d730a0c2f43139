#include "retailopt/continuous_opt.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace retailopt {

void adam_step(std::vector<Tensor*> params, const std::vector<Tensor>& grads, AdamState& state,
               const OptimizerConfig& cfg) {
    if (state.m.empty()) {
        for (const Tensor* p : params) {
            state.m.emplace_back(p->rows, p->cols);
            state.v.emplace_back(p->rows, p->cols);
        }
    }
    if (grads.size() != params.size())
        throw std::invalid_argument("adam_step: parameter/gradient count mismatch");

    ++state.step;
    const double bc1 = 1.0 - std::pow(cfg.adam_beta1, state.step);
    const double bc2 = 1.0 - std::pow(cfg.adam_beta2, state.step);
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& p = *params[i];
        const Tensor& g = grads[i];
        if (!p.same_shape(g)) throw std::invalid_argument("adam_step: gradient shape mismatch");
        Tensor& m = state.m[i];
        Tensor& v = state.v[i];
        for (std::size_t k = 0; k < p.size(); ++k) {
            m.v[k] = cfg.adam_beta1 * m.v[k] + (1.0 - cfg.adam_beta1) * g.v[k];
            v.v[k] = cfg.adam_beta2 * v.v[k] + (1.0 - cfg.adam_beta2) * g.v[k] * g.v[k];
            const double mhat = m.v[k] / bc1;
            const double vhat = v.v[k] / bc2;
            p.v[k] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
        }
    }
}

ContinuousResult optimize_transform(const Session& session, int attention_dim,
                                    const ObjectiveConfig& obj_cfg, const OptimizerConfig& cfg) {
    if (session.anchors_tu.empty() && session.anchors_tk.empty())
        throw std::invalid_argument("optimize_transform: session has no anchors");
    if (cfg.iterations < 1) throw std::invalid_argument("optimize_transform: iterations >= 1");

    const Tensor q = trajectory_matrix(session.relative);
    const Tensor anchors = anchor_matrix(session.anchors_tu, session.anchors_tk);
    if (cfg.tau0 <= 0.0) throw std::invalid_argument("optimize_transform: tau0 must be > 0");
    TransformNetParams params = init_params(attention_dim, cfg.rng_seed);
    params.log_tau.v[0] = std::log(cfg.tau0);
    AdamState adam;

    OptimizationTrace trace;
    trace.loss.reserve(cfg.iterations);
    Tensor q_prime_value;

    for (int it = 0; it < cfg.iterations; ++it) {
        Tape tape;
        NetGraph net = build_net_graph(tape, params, q, anchors);
        LossGraph loss = build_loss_graph(tape, net.q_prime, net.delta, net.log_tau,
                                          session.anchors_tu, session.anchors_tk, obj_cfg);
        const double value = tape.value(loss.total).v[0];
        if (!std::isfinite(value) || value > 1e6)
            throw InfeasibleError("optimize_transform: loss diverged at iteration " +
                                     std::to_string(it + 1) + " (loss=" + std::to_string(value) +
                                     ")");
        trace.loss.push_back(value);

        tape.backward(loss.total);
        std::vector<Tensor> grads;
        grads.reserve(net.param_leaves.size());
        for (Var leaf : net.param_leaves) grads.push_back(tape.grad(leaf));
        adam_step(params.tensors(), grads, adam, cfg);

        if (it + 1 == cfg.iterations) {
            // Report Q' from the final parameters, not the last pre-update pass.
            Tape final_tape;
            NetGraph final_net = build_net_graph(final_tape, params, q, anchors);
            q_prime_value = final_tape.value(final_net.q_prime);
        }
    }

    ContinuousResult result;
    result.q_prime.reserve(q.rows);
    for (int t = 0; t < q_prime_value.rows; ++t)
        result.q_prime.push_back({q_prime_value.at(t, 0), q_prime_value.at(t, 1)});
    trace.final_tau = params.tau();
    trace.final_params = std::move(params);
    result.trace = std::move(trace);
    return result;
}

}  // namespace retailopt
