#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace retailopt {

// Dense row-major matrix of doubles. Scalars are 1x1.
struct Tensor {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Tensor() = default;
    Tensor(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}

    static Tensor scalar(double x) {
        Tensor t(1, 1);
        t.v[0] = x;
        return t;
    }

    double& at(int i, int j) { return v[static_cast<std::size_t>(i) * cols + j]; }
    double at(int i, int j) const { return v[static_cast<std::size_t>(i) * cols + j]; }
    std::size_t size() const { return v.size(); }
    bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
};

// C (+)= op(A) * op(B); plain triple loops with cache-friendly orderings.
void gemm(const Tensor& a, bool trans_a, const Tensor& b, bool trans_b, Tensor& c,
          bool accumulate);

struct Var {
    int idx = -1;
};

// Reverse-mode tape over Tensor-valued nodes. Rebuilt every forward pass;
// node creation order is the topological order used by backward().
class Tape {
  public:
    Var leaf(Tensor value);

    Var add(Var a, Var b);
    Var add_row(Var m, Var row);  // broadcast a 1xC row over all rows of m
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);                   // elementwise
    Var mul_const(Var a, Tensor weights);    // elementwise by a constant tensor
    Var scale_by(Var m, Var scalar);         // matrix times scalar node
    Var affine(Var a, double mul, double shift);
    Var matmul(Var a, Var b, bool trans_b = false);
    Var relu(Var a);
    Var exp(Var a);
    Var square(Var a);
    Var sqrt(Var a);
    Var softmax_rows(Var a);  // softmax over columns, per row
    Var softmax_cols(Var a);  // softmax over rows, per column
    Var row_sum(Var a);       // TxC -> Tx1
    Var sum_all(Var a);       // -> scalar
    Var l1_norm_rows(Var a);  // TxC -> Tx1, sum of |x| per row
    Var max_rows(Var a);      // per-row max over columns; first-index tie-break
    Var max_all(Var a);       // global max; first-index tie-break
    Var row_l2norm(Var a);    // TxC -> Tx1; gradient 0 at zero rows
    Var concat_cols(const std::vector<Var>& parts);
    Var time_diff(Var a);     // TxC -> (T-1)xC, forward differences over rows
    Var pairwise_sqdist(Var a, Tensor targets);  // Tx2 vs Jx2 -> TxJ

    const Tensor& value(Var v) const { return nodes_[v.idx].val; }
    const Tensor& grad(Var v) const { return nodes_[v.idx].grad; }

    // Accumulates d(root)/d(node) into every node's grad. Root must be scalar.
    void backward(Var root);

    std::size_t num_nodes() const { return nodes_.size(); }

  private:
    enum class Op {
        Leaf, Add, AddRow, Sub, Mul, MulConst, ScaleBy, Affine, MatMul, Relu, Exp,
        Square, Sqrt, SoftmaxRows, SoftmaxCols, RowSum, SumAll, L1NormRows, MaxRows,
        MaxAll, RowL2Norm, ConcatCols, TimeDiff, PairwiseSqDist,
    };

    struct Node {
        Op op = Op::Leaf;
        Tensor val;
        Tensor grad;
        std::vector<int> parents;
        double aux_a = 0.0;
        double aux_b = 0.0;
        bool trans_b = false;
        Tensor aux_t;             // constants for MulConst / PairwiseSqDist
        std::vector<int> argmax;  // MaxRows / MaxAll
    };

    int push(Node n);
    const Tensor& val_of(Var v) const;

    std::vector<Node> nodes_;
};

// Max over checked coordinates of |analytic - numeric| / max(1, |numeric|),
// with numeric gradients from central differences of `loss` at `step`.
// `coords` restricts the check to (param, flat index) pairs; empty checks all.
double finite_difference_check(
    const std::function<double(const std::vector<Tensor>&)>& loss,
    const std::function<std::vector<Tensor>(const std::vector<Tensor>&)>& analytic_grad,
    std::vector<Tensor> params, double step,
    const std::vector<std::pair<int, int>>& coords = {});

}  // namespace retailopt
