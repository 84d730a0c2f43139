#include "retailopt/tape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace retailopt {

namespace {

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
    throw std::invalid_argument(std::string("tape: shape mismatch in ") + op + ": " +
                                std::to_string(a.rows) + "x" + std::to_string(a.cols) + " vs " +
                                std::to_string(b.rows) + "x" + std::to_string(b.cols));
}

}  // namespace

void gemm(const Tensor& a, bool trans_a, const Tensor& b, bool trans_b, Tensor& c,
          bool accumulate) {
    const int m = trans_a ? a.cols : a.rows;
    const int k = trans_a ? a.rows : a.cols;
    const int kb = trans_b ? b.cols : b.rows;
    const int n = trans_b ? b.rows : b.cols;
    if (k != kb) shape_error("gemm", a, b);
    if (c.rows != m || c.cols != n) {
        c = Tensor(m, n);
    } else if (!accumulate) {
        std::fill(c.v.begin(), c.v.end(), 0.0);
    }

    if (!trans_a && !trans_b) {
        for (int i = 0; i < m; ++i) {
            const double* arow = &a.v[static_cast<std::size_t>(i) * k];
            double* crow = &c.v[static_cast<std::size_t>(i) * n];
            for (int l = 0; l < k; ++l) {
                const double av = arow[l];
                if (av == 0.0) continue;
                const double* brow = &b.v[static_cast<std::size_t>(l) * n];
                for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
            }
        }
    } else if (!trans_a && trans_b) {
        for (int i = 0; i < m; ++i) {
            const double* arow = &a.v[static_cast<std::size_t>(i) * k];
            double* crow = &c.v[static_cast<std::size_t>(i) * n];
            for (int j = 0; j < n; ++j) {
                const double* brow = &b.v[static_cast<std::size_t>(j) * k];
                double s = 0.0;
                for (int l = 0; l < k; ++l) s += arow[l] * brow[l];
                crow[j] += s;
            }
        }
    } else if (trans_a && !trans_b) {
        for (int l = 0; l < k; ++l) {
            const double* arow = &a.v[static_cast<std::size_t>(l) * m];
            const double* brow = &b.v[static_cast<std::size_t>(l) * n];
            for (int i = 0; i < m; ++i) {
                const double av = arow[i];
                if (av == 0.0) continue;
                double* crow = &c.v[static_cast<std::size_t>(i) * n];
                for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
            }
        }
    } else {
        for (int i = 0; i < m; ++i) {
            double* crow = &c.v[static_cast<std::size_t>(i) * n];
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < k; ++l) s += a.at(l, i) * b.at(j, l);
                crow[j] += s;
            }
        }
    }
}

int Tape::push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

const Tensor& Tape::val_of(Var v) const { return nodes_[v.idx].val; }

Var Tape::leaf(Tensor value) {
    Node n;
    n.op = Op::Leaf;
    n.val = std::move(value);
    return {push(std::move(n))};
}

Var Tape::add(Var a, Var b) {
    const Tensor& ta = val_of(a);
    const Tensor& tb = val_of(b);
    if (!ta.same_shape(tb)) shape_error("add", ta, tb);
    Node n;
    n.op = Op::Add;
    n.parents = {a.idx, b.idx};
    n.val = ta;
    for (std::size_t i = 0; i < n.val.size(); ++i) n.val.v[i] += tb.v[i];
    return {push(std::move(n))};
}

Var Tape::add_row(Var m, Var row) {
    const Tensor& tm = val_of(m);
    const Tensor& tr = val_of(row);
    if (tr.rows != 1 || tr.cols != tm.cols) shape_error("add_row", tm, tr);
    Node n;
    n.op = Op::AddRow;
    n.parents = {m.idx, row.idx};
    n.val = tm;
    for (int i = 0; i < tm.rows; ++i)
        for (int j = 0; j < tm.cols; ++j) n.val.at(i, j) += tr.v[j];
    return {push(std::move(n))};
}

Var Tape::sub(Var a, Var b) {
    const Tensor& ta = val_of(a);
    const Tensor& tb = val_of(b);
    if (!ta.same_shape(tb)) shape_error("sub", ta, tb);
    Node n;
    n.op = Op::Sub;
    n.parents = {a.idx, b.idx};
    n.val = ta;
    for (std::size_t i = 0; i < n.val.size(); ++i) n.val.v[i] -= tb.v[i];
    return {push(std::move(n))};
}

Var Tape::mul(Var a, Var b) {
    const Tensor& ta = val_of(a);
    const Tensor& tb = val_of(b);
    if (!ta.same_shape(tb)) shape_error("mul", ta, tb);
    Node n;
    n.op = Op::Mul;
    n.parents = {a.idx, b.idx};
    n.val = ta;
    for (std::size_t i = 0; i < n.val.size(); ++i) n.val.v[i] *= tb.v[i];
    return {push(std::move(n))};
}

Var Tape::mul_const(Var a, Tensor weights) {
    const Tensor& ta = val_of(a);
    if (!ta.same_shape(weights)) shape_error("mul_const", ta, weights);
    Node n;
    n.op = Op::MulConst;
    n.parents = {a.idx};
    n.val = ta;
    for (std::size_t i = 0; i < n.val.size(); ++i) n.val.v[i] *= weights.v[i];
    n.aux_t = std::move(weights);
    return {push(std::move(n))};
}

Var Tape::scale_by(Var m, Var scalar) {
    const Tensor& tm = val_of(m);
    const Tensor& ts = val_of(scalar);
    if (ts.size() != 1) shape_error("scale_by", tm, ts);
    Node n;
    n.op = Op::ScaleBy;
    n.parents = {m.idx, scalar.idx};
    n.val = tm;
    const double s = ts.v[0];
    for (std::size_t i = 0; i < n.val.size(); ++i) n.val.v[i] *= s;
    return {push(std::move(n))};
}

Var Tape::affine(Var a, double mul, double shift) {
    Node n;
    n.op = Op::Affine;
    n.parents = {a.idx};
    n.val = val_of(a);
    n.aux_a = mul;
    n.aux_b = shift;
    for (std::size_t i = 0; i < n.val.size(); ++i) n.val.v[i] = mul * n.val.v[i] + shift;
    return {push(std::move(n))};
}

Var Tape::matmul(Var a, Var b, bool trans_b) {
    Node n;
    n.op = Op::MatMul;
    n.parents = {a.idx, b.idx};
    n.trans_b = trans_b;
    gemm(val_of(a), false, val_of(b), trans_b, n.val, false);
    return {push(std::move(n))};
}

Var Tape::relu(Var a) {
    Node n;
    n.op = Op::Relu;
    n.parents = {a.idx};
    n.val = val_of(a);
    for (auto& x : n.val.v) x = x > 0.0 ? x : 0.0;
    return {push(std::move(n))};
}

Var Tape::exp(Var a) {
    Node n;
    n.op = Op::Exp;
    n.parents = {a.idx};
    n.val = val_of(a);
    for (auto& x : n.val.v) x = std::exp(x);
    return {push(std::move(n))};
}

Var Tape::square(Var a) {
    Node n;
    n.op = Op::Square;
    n.parents = {a.idx};
    n.val = val_of(a);
    for (auto& x : n.val.v) x = x * x;
    return {push(std::move(n))};
}

Var Tape::sqrt(Var a) {
    Node n;
    n.op = Op::Sqrt;
    n.parents = {a.idx};
    n.val = val_of(a);
    for (auto& x : n.val.v) x = std::sqrt(x);
    return {push(std::move(n))};
}

Var Tape::softmax_rows(Var a) {
    Node n;
    n.op = Op::SoftmaxRows;
    n.parents = {a.idx};
    n.val = val_of(a);
    for (int i = 0; i < n.val.rows; ++i) {
        double mx = n.val.at(i, 0);
        for (int j = 1; j < n.val.cols; ++j) mx = std::max(mx, n.val.at(i, j));
        double sum = 0.0;
        for (int j = 0; j < n.val.cols; ++j) {
            const double e = std::exp(n.val.at(i, j) - mx);
            n.val.at(i, j) = e;
            sum += e;
        }
        for (int j = 0; j < n.val.cols; ++j) n.val.at(i, j) /= sum;
    }
    return {push(std::move(n))};
}

Var Tape::softmax_cols(Var a) {
    Node n;
    n.op = Op::SoftmaxCols;
    n.parents = {a.idx};
    n.val = val_of(a);
    for (int j = 0; j < n.val.cols; ++j) {
        double mx = n.val.at(0, j);
        for (int i = 1; i < n.val.rows; ++i) mx = std::max(mx, n.val.at(i, j));
        double sum = 0.0;
        for (int i = 0; i < n.val.rows; ++i) {
            const double e = std::exp(n.val.at(i, j) - mx);
            n.val.at(i, j) = e;
            sum += e;
        }
        for (int i = 0; i < n.val.rows; ++i) n.val.at(i, j) /= sum;
    }
    return {push(std::move(n))};
}

Var Tape::row_sum(Var a) {
    const Tensor& ta = val_of(a);
    Node n;
    n.op = Op::RowSum;
    n.parents = {a.idx};
    n.val = Tensor(ta.rows, 1);
    for (int i = 0; i < ta.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < ta.cols; ++j) s += ta.at(i, j);
        n.val.v[i] = s;
    }
    return {push(std::move(n))};
}

Var Tape::sum_all(Var a) {
    const Tensor& ta = val_of(a);
    Node n;
    n.op = Op::SumAll;
    n.parents = {a.idx};
    double s = 0.0;
    for (double x : ta.v) s += x;
    n.val = Tensor::scalar(s);
    return {push(std::move(n))};
}

Var Tape::l1_norm_rows(Var a) {
    const Tensor& ta = val_of(a);
    Node n;
    n.op = Op::L1NormRows;
    n.parents = {a.idx};
    n.val = Tensor(ta.rows, 1);
    for (int i = 0; i < ta.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < ta.cols; ++j) s += std::abs(ta.at(i, j));
        n.val.v[i] = s;
    }
    return {push(std::move(n))};
}

Var Tape::max_rows(Var a) {
    const Tensor& ta = val_of(a);
    Node n;
    n.op = Op::MaxRows;
    n.parents = {a.idx};
    n.val = Tensor(ta.rows, 1);
    n.argmax.resize(ta.rows);
    for (int i = 0; i < ta.rows; ++i) {
        int best = 0;
        double bv = ta.at(i, 0);
        for (int j = 1; j < ta.cols; ++j) {
            if (ta.at(i, j) > bv) {
                bv = ta.at(i, j);
                best = j;
            }
        }
        n.val.v[i] = bv;
        n.argmax[i] = best;
    }
    return {push(std::move(n))};
}

Var Tape::max_all(Var a) {
    const Tensor& ta = val_of(a);
    Node n;
    n.op = Op::MaxAll;
    n.parents = {a.idx};
    int best = 0;
    double bv = ta.v[0];
    for (std::size_t i = 1; i < ta.size(); ++i) {
        if (ta.v[i] > bv) {
            bv = ta.v[i];
            best = static_cast<int>(i);
        }
    }
    n.val = Tensor::scalar(bv);
    n.argmax = {best};
    return {push(std::move(n))};
}

Var Tape::row_l2norm(Var a) {
    const Tensor& ta = val_of(a);
    Node n;
    n.op = Op::RowL2Norm;
    n.parents = {a.idx};
    n.val = Tensor(ta.rows, 1);
    for (int i = 0; i < ta.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < ta.cols; ++j) s += ta.at(i, j) * ta.at(i, j);
        n.val.v[i] = std::sqrt(s);
    }
    return {push(std::move(n))};
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw std::invalid_argument("tape: concat_cols of nothing");
    int rows = val_of(parts[0]).rows;
    int cols = 0;
    for (Var p : parts) {
        if (val_of(p).rows != rows) shape_error("concat_cols", val_of(parts[0]), val_of(p));
        cols += val_of(p).cols;
    }
    Node n;
    n.op = Op::ConcatCols;
    n.val = Tensor(rows, cols);
    int off = 0;
    for (Var p : parts) {
        n.parents.push_back(p.idx);
        const Tensor& tp = val_of(p);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < tp.cols; ++j) n.val.at(i, off + j) = tp.at(i, j);
        off += tp.cols;
    }
    return {push(std::move(n))};
}

Var Tape::time_diff(Var a) {
    const Tensor& ta = val_of(a);
    if (ta.rows < 2) throw std::invalid_argument("tape: time_diff needs >= 2 rows");
    Node n;
    n.op = Op::TimeDiff;
    n.parents = {a.idx};
    n.val = Tensor(ta.rows - 1, ta.cols);
    for (int i = 0; i + 1 < ta.rows; ++i)
        for (int j = 0; j < ta.cols; ++j) n.val.at(i, j) = ta.at(i + 1, j) - ta.at(i, j);
    return {push(std::move(n))};
}

Var Tape::pairwise_sqdist(Var a, Tensor targets) {
    const Tensor& ta = val_of(a);
    if (ta.cols != targets.cols) shape_error("pairwise_sqdist", ta, targets);
    Node n;
    n.op = Op::PairwiseSqDist;
    n.parents = {a.idx};
    n.val = Tensor(ta.rows, targets.rows);
    for (int i = 0; i < ta.rows; ++i) {
        for (int j = 0; j < targets.rows; ++j) {
            double s = 0.0;
            for (int c = 0; c < ta.cols; ++c) {
                const double d = ta.at(i, c) - targets.at(j, c);
                s += d * d;
            }
            n.val.at(i, j) = s;
        }
    }
    n.aux_t = std::move(targets);
    return {push(std::move(n))};
}

void Tape::backward(Var root) {
    Node& r = nodes_[root.idx];
    if (r.val.size() != 1) throw std::invalid_argument("tape: backward root must be scalar");

    for (auto& n : nodes_) {
        n.grad = Tensor(n.val.rows, n.val.cols);
    }
    r.grad.v[0] = 1.0;

    for (int i = root.idx; i >= 0; --i) {
        Node& n = nodes_[i];
        const Tensor& g = n.grad;
        switch (n.op) {
            case Op::Leaf:
                break;
            case Op::Add: {
                Tensor& ga = nodes_[n.parents[0]].grad;
                Tensor& gb = nodes_[n.parents[1]].grad;
                for (std::size_t k = 0; k < g.size(); ++k) {
                    ga.v[k] += g.v[k];
                    gb.v[k] += g.v[k];
                }
                break;
            }
            case Op::AddRow: {
                Tensor& gm = nodes_[n.parents[0]].grad;
                Tensor& gr = nodes_[n.parents[1]].grad;
                for (int r2 = 0; r2 < g.rows; ++r2)
                    for (int c = 0; c < g.cols; ++c) {
                        gm.at(r2, c) += g.at(r2, c);
                        gr.v[c] += g.at(r2, c);
                    }
                break;
            }
            case Op::Sub: {
                Tensor& ga = nodes_[n.parents[0]].grad;
                Tensor& gb = nodes_[n.parents[1]].grad;
                for (std::size_t k = 0; k < g.size(); ++k) {
                    ga.v[k] += g.v[k];
                    gb.v[k] -= g.v[k];
                }
                break;
            }
            case Op::Mul: {
                Tensor& ga = nodes_[n.parents[0]].grad;
                Tensor& gb = nodes_[n.parents[1]].grad;
                const Tensor& va = nodes_[n.parents[0]].val;
                const Tensor& vb = nodes_[n.parents[1]].val;
                for (std::size_t k = 0; k < g.size(); ++k) {
                    ga.v[k] += g.v[k] * vb.v[k];
                    gb.v[k] += g.v[k] * va.v[k];
                }
                break;
            }
            case Op::MulConst: {
                Tensor& ga = nodes_[n.parents[0]].grad;
                for (std::size_t k = 0; k < g.size(); ++k) ga.v[k] += g.v[k] * n.aux_t.v[k];
                break;
            }
            case Op::ScaleBy: {
                Tensor& gm = nodes_[n.parents[0]].grad;
                Tensor& gs = nodes_[n.parents[1]].grad;
                const Tensor& vm = nodes_[n.parents[0]].val;
                const double s = nodes_[n.parents[1]].val.v[0];
                for (std::size_t k = 0; k < g.size(); ++k) {
                    gm.v[k] += g.v[k] * s;
                    gs.v[0] += g.v[k] * vm.v[k];
                }
                break;
            }
            case Op::Affine: {
                Tensor& ga = nodes_[n.parents[0]].grad;
                for (std::size_t k = 0; k < g.size(); ++k) ga.v[k] += g.v[k] * n.aux_a;
                break;
            }
            case Op::MatMul: {
                Node& pa = nodes_[n.parents[0]];
                Node& pb = nodes_[n.parents[1]];
                if (!n.trans_b) {
                    gemm(g, false, pb.val, true, pa.grad, true);   // dA += dC B^T
                    gemm(pa.val, true, g, false, pb.grad, true);   // dB += A^T dC
                } else {
                    gemm(g, false, pb.val, false, pa.grad, true);  // dA += dC B
                    gemm(g, true, pa.val, false, pb.grad, true);   // dB += dC^T A
                }
                break;
            }
            case Op::Relu: {
                Tensor& ga = nodes_[n.parents[0]].grad;
                const Tensor& va = nodes_[n.parents[0]].val;
                for (std::size_t k = 0; k < g.size(); ++k)
                    if (va.v[k] > 0.0) ga.v[k] += g.v[k];
                break;
            }
            case Op::Exp: {
                Tensor& ga = nodes_[n.parents[0]].grad;
                for (std::size_t k = 0; k < g.size(); ++k) ga.v[k] += g.v[k] * n.val.v[k];
                break;
            }
            case Op::Square: {
                Tensor& ga = nodes_[n.parents[0]].grad;
                const Tensor& va = nodes_[n.parents[0]].val;
                for (std::size_t k = 0; k < g.size(); ++k) ga.v[k] += 2.0 * g.v[k] * va.v[k];
                break;
            }
            case Op::Sqrt: {
                Tensor& ga = nodes_[n.parents[0]].grad;
                for (std::size_t k = 0; k < g.size(); ++k)
                    if (n.val.v[k] > 0.0) ga.v[k] += 0.5 * g.v[k] / n.val.v[k];
                break;
            }
            case Op::SoftmaxRows: {
                Tensor& ga = nodes_[n.parents[0]].grad;
                for (int r2 = 0; r2 < g.rows; ++r2) {
                    double dot = 0.0;
                    for (int c = 0; c < g.cols; ++c) dot += g.at(r2, c) * n.val.at(r2, c);
                    for (int c = 0; c < g.cols; ++c)
                        ga.at(r2, c) += n.val.at(r2, c) * (g.at(r2, c) - dot);
                }
                break;
            }
            case Op::SoftmaxCols: {
                Tensor& ga = nodes_[n.parents[0]].grad;
                for (int c = 0; c < g.cols; ++c) {
                    double dot = 0.0;
                    for (int r2 = 0; r2 < g.rows; ++r2) dot += g.at(r2, c) * n.val.at(r2, c);
                    for (int r2 = 0; r2 < g.rows; ++r2)
                        ga.at(r2, c) += n.val.at(r2, c) * (g.at(r2, c) - dot);
                }
                break;
            }
            case Op::RowSum: {
                Tensor& ga = nodes_[n.parents[0]].grad;
                for (int r2 = 0; r2 < ga.rows; ++r2)
                    for (int c = 0; c < ga.cols; ++c) ga.at(r2, c) += g.v[r2];
                break;
            }
            case Op::SumAll: {
                Tensor& ga = nodes_[n.parents[0]].grad;
                for (std::size_t k = 0; k < ga.size(); ++k) ga.v[k] += g.v[0];
                break;
            }
            case Op::L1NormRows: {
                Tensor& ga = nodes_[n.parents[0]].grad;
                const Tensor& va = nodes_[n.parents[0]].val;
                for (int r2 = 0; r2 < ga.rows; ++r2)
                    for (int c = 0; c < ga.cols; ++c) {
                        const double x = va.at(r2, c);
                        if (x > 0.0)
                            ga.at(r2, c) += g.v[r2];
                        else if (x < 0.0)
                            ga.at(r2, c) -= g.v[r2];
                    }
                break;
            }
            case Op::MaxRows: {
                Tensor& ga = nodes_[n.parents[0]].grad;
                for (int r2 = 0; r2 < ga.rows; ++r2) ga.at(r2, n.argmax[r2]) += g.v[r2];
                break;
            }
            case Op::MaxAll: {
                Tensor& ga = nodes_[n.parents[0]].grad;
                ga.v[n.argmax[0]] += g.v[0];
                break;
            }
            case Op::RowL2Norm: {
                Tensor& ga = nodes_[n.parents[0]].grad;
                const Tensor& va = nodes_[n.parents[0]].val;
                for (int r2 = 0; r2 < ga.rows; ++r2) {
                    const double norm = n.val.v[r2];
                    if (norm == 0.0) continue;  // subgradient 0 at zero rows
                    for (int c = 0; c < ga.cols; ++c)
                        ga.at(r2, c) += g.v[r2] * va.at(r2, c) / norm;
                }
                break;
            }
            case Op::ConcatCols: {
                int off = 0;
                for (int pi : n.parents) {
                    Tensor& gp = nodes_[pi].grad;
                    for (int r2 = 0; r2 < gp.rows; ++r2)
                        for (int c = 0; c < gp.cols; ++c) gp.at(r2, c) += g.at(r2, off + c);
                    off += gp.cols;
                }
                break;
            }
            case Op::TimeDiff: {
                Tensor& ga = nodes_[n.parents[0]].grad;
                for (int r2 = 0; r2 < g.rows; ++r2)
                    for (int c = 0; c < g.cols; ++c) {
                        ga.at(r2 + 1, c) += g.at(r2, c);
                        ga.at(r2, c) -= g.at(r2, c);
                    }
                break;
            }
            case Op::PairwiseSqDist: {
                Tensor& ga = nodes_[n.parents[0]].grad;
                const Tensor& va = nodes_[n.parents[0]].val;
                for (int r2 = 0; r2 < va.rows; ++r2)
                    for (int j = 0; j < n.aux_t.rows; ++j) {
                        const double gj = g.at(r2, j);
                        if (gj == 0.0) continue;
                        for (int c = 0; c < va.cols; ++c)
                            ga.at(r2, c) += 2.0 * gj * (va.at(r2, c) - n.aux_t.at(j, c));
                    }
                break;
            }
        }
    }
}

double finite_difference_check(
    const std::function<double(const std::vector<Tensor>&)>& loss,
    const std::function<std::vector<Tensor>(const std::vector<Tensor>&)>& analytic_grad,
    std::vector<Tensor> params, double step,
    const std::vector<std::pair<int, int>>& coords) {
    const std::vector<Tensor> grads = analytic_grad(params);

    std::vector<std::pair<int, int>> all;
    const std::vector<std::pair<int, int>>* use = &coords;
    if (coords.empty()) {
        for (int p = 0; p < static_cast<int>(params.size()); ++p)
            for (int k = 0; k < static_cast<int>(params[p].size()); ++k) all.emplace_back(p, k);
        use = &all;
    }

    double worst = 0.0;
    for (const auto& [p, k] : *use) {
        const double orig = params[p].v[k];
        params[p].v[k] = orig + step;
        const double lp = loss(params);
        params[p].v[k] = orig - step;
        const double lm = loss(params);
        params[p].v[k] = orig;
        const double numeric = (lp - lm) / (2.0 * step);
        const double analytic = grads[p].v[k];
        const double err = std::abs(analytic - numeric) / std::max(1.0, std::abs(numeric));
        worst = std::max(worst, err);
    }
    return worst;
}

}  // namespace retailopt
