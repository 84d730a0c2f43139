#pragma once

#include <cstdint>
#include <vector>

#include "retailopt/tape.hpp"
#include "retailopt/types.hpp"

namespace retailopt {

// Attention feature width; MLP hidden sizes are fixed at 64 and 128.
inline constexpr int kDefaultAttentionDim = 32;
inline constexpr int kHidden1 = 64;
inline constexpr int kHidden2 = 128;

// The optimizable state: attention projections, MLP weights, and the
// log-parameterized matching temperature (tau = exp(log_tau) > 0).
struct TransformNetParams {
    int d = kDefaultAttentionDim;
    Tensor Wq, Wk, Wv;  // 2 x d
    Tensor W1, b1;      // (2+d+1) x 64
    Tensor W2, b2;      // 64 x 128
    Tensor W3, b3;      // 128 x 2, zero-initialized so the net starts at identity
    Tensor log_tau;     // 1 x 1

    double tau() const;

    // Fixed traversal order shared with the optimizer state.
    std::vector<Tensor*> tensors();
    std::vector<const Tensor*> tensors() const;
};

// Attention/hidden weights uniform in +-sqrt(1/fan_in); output head zero;
// tau starts at 100.
TransformNetParams init_params(int d, std::uint64_t rng_seed);

// Stacks TU anchor locations first, then TK, as rows of a (J+K) x 2 matrix.
Tensor anchor_matrix(const std::vector<TimeUnknownAnchor>& tu,
                     const std::vector<TimeKnownAnchor>& tk);

Tensor trajectory_matrix(const RelativeTrajectory& q);

struct NetGraph {
    std::vector<Var> param_leaves;  // same order as TransformNetParams::tensors()
    Var q_leaf;
    Var attention;  // T x (J+K), rows sum to 1
    Var delta;      // T x 2
    Var q_prime;    // T x 2
    Var log_tau;    // alias of the log_tau leaf
};

// Builds the forward graph on the tape: scaled dot-product attention over
// anchors, then MLP(cat(q_t, h_t, t_norm)) -> delta_t, q'_t = q_t + delta_t.
// Anchor matrix must be non-empty.
NetGraph build_net_graph(Tape& tape, const TransformNetParams& params, const Tensor& q,
                         const Tensor& anchors);

}  // namespace retailopt
