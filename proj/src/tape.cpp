#include "hienet/tape.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hienet {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EMap = Eigen::Map<EMat>;
using ECMap = Eigen::Map<const EMat>;

ECMap as_mat(const Tensor& t) {
    if (t.ndim() != 2) shape_error("as_mat", t);
    return ECMap(t.data.data(), t.rows(), t.cols());
}

EMap as_mat(Tensor& t) { return EMap(t.data.data(), t.rows(), t.cols()); }

void require_finite(const char* op, const Tensor& t) {
    if (!t.all_finite())
        throw std::runtime_error(std::string(op) + ": non-finite values in result");
}

}  // namespace

int Tape::push(Tensor value, bool requires_grad, std::function<void()> back) {
    Node n;
    n.grad = Tensor(value.shape);
    n.value = std::move(value);
    n.back = std::move(back);
    n.requires_grad = requires_grad;
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

void Tape::check_ids(const std::vector<int>& ids) const {
    for (int id : ids)
        if (id < 0 || id >= size()) throw std::out_of_range("tape: bad node id");
}

int Tape::constant(Tensor v) {
    require_finite("constant", v);
    return push(std::move(v), false, {});
}

int Tape::param(Tensor v) {
    require_finite("param", v);
    return push(std::move(v), true, {});
}

int Tape::matmul(int a, int b) {
    check_ids({a, b});
    const Tensor& A = v(a);
    const Tensor& B = v(b);
    if (A.ndim() != 2 || B.ndim() != 2 || A.cols() != B.rows()) shape_error("matmul", A, B);
    Tensor out({A.rows(), B.cols()});
    as_mat(out) = as_mat(A) * as_mat(B);
    require_finite("matmul", out);
    int id = push(std::move(out), rg(a) || rg(b), {});
    nodes_[id].back = [this, a, b, id]() {
        const Tensor& go = g(id);
        if (rg(a)) as_mat(g(a)) += as_mat(go) * as_mat(v(b)).transpose();
        if (rg(b)) as_mat(g(b)) += as_mat(v(a)).transpose() * as_mat(go);
    };
    return id;
}

int Tape::add(int a, int b) {
    check_ids({a, b});
    const Tensor& A = v(a);
    const Tensor& B = v(b);
    if (!A.same_shape(B)) shape_error("add", A, B);
    Tensor out(A.shape);
    for (int i = 0; i < A.numel(); ++i) out[i] = A[i] + B[i];
    require_finite("add", out);
    int id = push(std::move(out), rg(a) || rg(b), {});
    nodes_[id].back = [this, a, b, id]() {
        const Tensor& go = g(id);
        if (rg(a))
            for (int i = 0; i < go.numel(); ++i) g(a)[i] += go[i];
        if (rg(b))
            for (int i = 0; i < go.numel(); ++i) g(b)[i] += go[i];
    };
    return id;
}

int Tape::mul(int a, int b) {
    check_ids({a, b});
    const Tensor& A = v(a);
    const Tensor& B = v(b);
    if (!A.same_shape(B)) shape_error("mul", A, B);
    Tensor out(A.shape);
    for (int i = 0; i < A.numel(); ++i) out[i] = A[i] * B[i];
    require_finite("mul", out);
    int id = push(std::move(out), rg(a) || rg(b), {});
    nodes_[id].back = [this, a, b, id]() {
        const Tensor& go = g(id);
        if (rg(a))
            for (int i = 0; i < go.numel(); ++i) g(a)[i] += go[i] * v(b)[i];
        if (rg(b))
            for (int i = 0; i < go.numel(); ++i) g(b)[i] += go[i] * v(a)[i];
    };
    return id;
}

int Tape::scale(int a, double s) {
    check_ids({a});
    Tensor out(v(a).shape);
    for (int i = 0; i < out.numel(); ++i) out[i] = v(a)[i] * s;
    require_finite("scale", out);
    int id = push(std::move(out), rg(a), {});
    nodes_[id].back = [this, a, s, id]() {
        if (!rg(a)) return;
        const Tensor& go = g(id);
        for (int i = 0; i < go.numel(); ++i) g(a)[i] += go[i] * s;
    };
    return id;
}

int Tape::add_scalar(int a, double c) {
    check_ids({a});
    Tensor out(v(a).shape);
    for (int i = 0; i < out.numel(); ++i) out[i] = v(a)[i] + c;
    require_finite("add_scalar", out);
    int id = push(std::move(out), rg(a), {});
    nodes_[id].back = [this, a, id]() {
        if (!rg(a)) return;
        const Tensor& go = g(id);
        for (int i = 0; i < go.numel(); ++i) g(a)[i] += go[i];
    };
    return id;
}

int Tape::log(int a) {
    check_ids({a});
    Tensor out(v(a).shape);
    for (int i = 0; i < out.numel(); ++i) {
        if (v(a)[i] <= 0.0) throw std::domain_error("log: non-positive input");
        out[i] = std::log(v(a)[i]);
    }
    require_finite("log", out);
    int id = push(std::move(out), rg(a), {});
    nodes_[id].back = [this, a, id]() {
        if (!rg(a)) return;
        const Tensor& go = g(id);
        for (int i = 0; i < go.numel(); ++i) g(a)[i] += go[i] / v(a)[i];
    };
    return id;
}

int Tape::relu(int a) {
    check_ids({a});
    Tensor out(v(a).shape);
    for (int i = 0; i < out.numel(); ++i) out[i] = v(a)[i] > 0.0 ? v(a)[i] : 0.0;
    int id = push(std::move(out), rg(a), {});
    nodes_[id].back = [this, a, id]() {
        if (!rg(a)) return;
        const Tensor& go = g(id);
        // subgradient 0 at the kink
        for (int i = 0; i < go.numel(); ++i)
            if (v(a)[i] > 0.0) g(a)[i] += go[i];
    };
    return id;
}

int Tape::tanh(int a) {
    check_ids({a});
    Tensor out(v(a).shape);
    for (int i = 0; i < out.numel(); ++i) out[i] = std::tanh(v(a)[i]);
    int id = push(std::move(out), rg(a), {});
    nodes_[id].back = [this, a, id]() {
        if (!rg(a)) return;
        const Tensor& go = g(id);
        const Tensor& y = v(id);
        for (int i = 0; i < go.numel(); ++i) g(a)[i] += go[i] * (1.0 - y[i] * y[i]);
    };
    return id;
}

int Tape::sigmoid(int a) {
    check_ids({a});
    Tensor out(v(a).shape);
    for (int i = 0; i < out.numel(); ++i) {
        const double x = v(a)[i];
        out[i] = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                          : std::exp(x) / (1.0 + std::exp(x));
    }
    int id = push(std::move(out), rg(a), {});
    nodes_[id].back = [this, a, id]() {
        if (!rg(a)) return;
        const Tensor& go = g(id);
        const Tensor& y = v(id);
        for (int i = 0; i < go.numel(); ++i) g(a)[i] += go[i] * y[i] * (1.0 - y[i]);
    };
    return id;
}

int Tape::softmax_rows(int a) {
    check_ids({a});
    const Tensor& A = v(a);
    if (A.ndim() != 2) shape_error("softmax_rows", A);
    Tensor out(A.shape);
    for (int r = 0; r < A.rows(); ++r) {
        double mx = A.at(r, 0);
        for (int c = 1; c < A.cols(); ++c) mx = std::max(mx, A.at(r, c));
        double sum = 0.0;
        for (int c = 0; c < A.cols(); ++c) {
            out.at(r, c) = std::exp(A.at(r, c) - mx);
            sum += out.at(r, c);
        }
        for (int c = 0; c < A.cols(); ++c) out.at(r, c) /= sum;
    }
    require_finite("softmax_rows", out);
    int id = push(std::move(out), rg(a), {});
    nodes_[id].back = [this, a, id]() {
        if (!rg(a)) return;
        const Tensor& go = g(id);
        const Tensor& y = v(id);
        for (int r = 0; r < y.rows(); ++r) {
            double dot = 0.0;
            for (int c = 0; c < y.cols(); ++c) dot += go.at(r, c) * y.at(r, c);
            for (int c = 0; c < y.cols(); ++c)
                g(a).at(r, c) += y.at(r, c) * (go.at(r, c) - dot);
        }
    };
    return id;
}

int Tape::transpose(int a) {
    check_ids({a});
    const Tensor& A = v(a);
    if (A.ndim() != 2) shape_error("transpose", A);
    Tensor out({A.cols(), A.rows()});
    as_mat(out) = as_mat(A).transpose();
    int id = push(std::move(out), rg(a), {});
    nodes_[id].back = [this, a, id]() {
        if (rg(a)) as_mat(g(a)) += as_mat(g(id)).transpose();
    };
    return id;
}

int Tape::concat(const std::vector<int>& ids, int axis) {
    if (ids.empty()) throw std::invalid_argument("concat: no inputs");
    check_ids(ids);
    if (axis != 0 && axis != 1) throw std::invalid_argument("concat: axis must be 0 or 1");
    const Tensor& first = v(ids[0]);
    if (first.ndim() != 2) shape_error("concat", first);
    int rows = first.rows(), cols = first.cols();
    bool any_rg = false;
    for (int id : ids) {
        const Tensor& t = v(id);
        if (t.ndim() != 2) shape_error("concat", t);
        if (axis == 0) {
            if (t.cols() != cols) shape_error("concat", first, t);
        } else if (t.rows() != rows) {
            shape_error("concat", first, t);
        }
        any_rg = any_rg || rg(id);
    }
    int total = 0;
    for (int id : ids) total += (axis == 0 ? v(id).rows() : v(id).cols());
    Tensor out(axis == 0 ? std::vector<int>{total, cols} : std::vector<int>{rows, total});
    int off = 0;
    for (int id : ids) {
        const Tensor& t = v(id);
        if (axis == 0) {
            std::copy(t.data.begin(), t.data.end(), out.data.begin() +
                      static_cast<std::size_t>(off) * cols);
            off += t.rows();
        } else {
            for (int r = 0; r < rows; ++r)
                std::copy(t.data.begin() + static_cast<std::size_t>(r) * t.cols(),
                          t.data.begin() + static_cast<std::size_t>(r + 1) * t.cols(),
                          out.data.begin() + static_cast<std::size_t>(r) * total + off);
            off += t.cols();
        }
    }
    std::vector<int> in = ids;
    int id = push(std::move(out), any_rg, {});
    nodes_[id].back = [this, in, axis, id]() {
        const Tensor& go = g(id);
        int off2 = 0;
        for (int src : in) {
            Tensor& gi = g(src);
            const Tensor& t = v(src);
            if (axis == 0) {
                if (rg(src))
                    for (int i = 0; i < t.numel(); ++i)
                        gi[i] += go.data[static_cast<std::size_t>(off2) * t.cols() + i];
                off2 += t.rows();
            } else {
                if (rg(src))
                    for (int r = 0; r < t.rows(); ++r)
                        for (int c = 0; c < t.cols(); ++c)
                            gi.at(r, c) += go.at(r, off2 + c);
                off2 += t.cols();
            }
        }
    };
    return id;
}

int Tape::slice(int a, int axis, int start, int len) {
    check_ids({a});
    const Tensor& A = v(a);
    if (A.ndim() != 2) shape_error("slice", A);
    if (axis != 0 && axis != 1) throw std::invalid_argument("slice: axis must be 0 or 1");
    const int dim = axis == 0 ? A.rows() : A.cols();
    if (start < 0 || len <= 0 || start + len > dim)
        throw std::out_of_range("slice: range [" + std::to_string(start) + "," +
                                std::to_string(start + len) + ") exceeds dim " +
                                std::to_string(dim));
    Tensor out(axis == 0 ? std::vector<int>{len, A.cols()} : std::vector<int>{A.rows(), len});
    if (axis == 0) {
        std::copy(A.data.begin() + static_cast<std::size_t>(start) * A.cols(),
                  A.data.begin() + static_cast<std::size_t>(start + len) * A.cols(),
                  out.data.begin());
    } else {
        for (int r = 0; r < A.rows(); ++r)
            for (int c = 0; c < len; ++c) out.at(r, c) = A.at(r, start + c);
    }
    int id = push(std::move(out), rg(a), {});
    nodes_[id].back = [this, a, axis, start, id]() {
        if (!rg(a)) return;
        const Tensor& go = g(id);
        if (axis == 0) {
            for (int r = 0; r < go.rows(); ++r)
                for (int c = 0; c < go.cols(); ++c) g(a).at(start + r, c) += go.at(r, c);
        } else {
            for (int r = 0; r < go.rows(); ++r)
                for (int c = 0; c < go.cols(); ++c) g(a).at(r, start + c) += go.at(r, c);
        }
    };
    return id;
}

namespace {

// im2col over rows: x [N,d], window k -> [N-k+1, d*k]
Tensor im2col_rows(const Tensor& x, int k) {
    const int n_out = x.rows() - k + 1;
    Tensor col({n_out, x.cols() * k});
    for (int i = 0; i < n_out; ++i)
        for (int j = 0; j < k; ++j)
            std::copy(x.data.begin() + static_cast<std::size_t>(i + j) * x.cols(),
                      x.data.begin() + static_cast<std::size_t>(i + j + 1) * x.cols(),
                      col.data.begin() + static_cast<std::size_t>(i) * col.cols() +
                          static_cast<std::size_t>(j) * x.cols());
    return col;
}

}  // namespace

int Tape::conv1d(int x, int w, int b, int k) {
    check_ids({x, w, b});
    const Tensor& X = v(x);
    const Tensor& W = v(w);
    const Tensor& B = v(b);
    if (X.ndim() != 2 || W.ndim() != 2 || B.ndim() != 1) shape_error("conv1d", X, W);
    if (k < 1 || W.cols() != X.cols() * k || B.shape[0] != W.rows())
        throw std::invalid_argument("conv1d: filter " + W.shape_str() + " incompatible with input " +
                                    X.shape_str() + " at window " + std::to_string(k));
    if (X.rows() < k)
        throw std::invalid_argument("conv1d: input length " + std::to_string(X.rows()) +
                                    " shorter than window " + std::to_string(k));
    Tensor col = im2col_rows(X, k);
    Tensor out({col.rows(), W.rows()});
    as_mat(out) = as_mat(col) * as_mat(W).transpose();
    for (int r = 0; r < out.rows(); ++r)
        for (int c = 0; c < out.cols(); ++c) out.at(r, c) += B[c];
    require_finite("conv1d", out);
    int id = push(std::move(out), rg(x) || rg(w) || rg(b), {});
    nodes_[id].back = [this, x, w, b, k, id]() {
        const Tensor& go = g(id);
        Tensor col = im2col_rows(v(x), k);
        if (rg(w)) as_mat(g(w)) += as_mat(go).transpose() * as_mat(col);
        if (rg(b))
            for (int r = 0; r < go.rows(); ++r)
                for (int c = 0; c < go.cols(); ++c) g(b)[c] += go.at(r, c);
        if (rg(x)) {
            Tensor dcol(col.shape);
            as_mat(dcol) = as_mat(go) * as_mat(v(w));
            const int d = v(x).cols();
            for (int i = 0; i < dcol.rows(); ++i)
                for (int j = 0; j < k; ++j)
                    for (int c = 0; c < d; ++c)
                        g(x).at(i + j, c) += dcol.at(i, j * d + c);
        }
    };
    return id;
}

int Tape::max_over_axis(int a, int axis) {
    check_ids({a});
    const Tensor& A = v(a);
    if (A.ndim() != 2) shape_error("max_over_axis", A);
    if (axis != 0 && axis != 1) throw std::invalid_argument("max_over_axis: axis must be 0 or 1");
    const int out_len = axis == 0 ? A.cols() : A.rows();
    Tensor out({out_len});
    std::vector<int> argmax(out_len, 0);
    if (axis == 0) {
        for (int c = 0; c < A.cols(); ++c) {
            int best = 0;
            for (int r = 1; r < A.rows(); ++r)
                if (A.at(r, c) > A.at(best, c)) best = r;  // strict: ties keep lowest
            argmax[c] = best;
            out[c] = A.at(best, c);
        }
    } else {
        for (int r = 0; r < A.rows(); ++r) {
            int best = 0;
            for (int c = 1; c < A.cols(); ++c)
                if (A.at(r, c) > A.at(r, best)) best = c;
            argmax[r] = best;
            out[r] = A.at(r, best);
        }
    }
    int id = push(std::move(out), rg(a), {});
    nodes_[id].back = [this, a, axis, argmax, id]() {
        if (!rg(a)) return;
        const Tensor& go = g(id);
        for (int i = 0; i < go.numel(); ++i) {
            if (axis == 0)
                g(a).at(argmax[i], i) += go[i];
            else
                g(a).at(i, argmax[i]) += go[i];
        }
    };
    return id;
}

int Tape::mean_all(int a) {
    check_ids({a});
    const int n = v(a).numel();
    if (n == 0) shape_error("mean_all", v(a));
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += v(a)[i];
    int id = push(Tensor::scalar(sum / n), rg(a), {});
    nodes_[id].back = [this, a, n, id]() {
        if (!rg(a)) return;
        const double go = g(id)[0] / n;
        for (int i = 0; i < n; ++i) g(a)[i] += go;
    };
    return id;
}

int Tape::sum_all(int a) {
    check_ids({a});
    const int n = v(a).numel();
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += v(a)[i];
    int id = push(Tensor::scalar(sum), rg(a), {});
    nodes_[id].back = [this, a, n, id]() {
        if (!rg(a)) return;
        const double go = g(id)[0];
        for (int i = 0; i < n; ++i) g(a)[i] += go;
    };
    return id;
}

int Tape::bias_add_rows(int a, int bias) {
    check_ids({a, bias});
    const Tensor& A = v(a);
    const Tensor& B = v(bias);
    if (A.ndim() != 2 || B.ndim() != 1 || B.shape[0] != A.cols()) shape_error("bias_add_rows", A, B);
    Tensor out(A.shape);
    for (int r = 0; r < A.rows(); ++r)
        for (int c = 0; c < A.cols(); ++c) out.at(r, c) = A.at(r, c) + B[c];
    require_finite("bias_add_rows", out);
    int id = push(std::move(out), rg(a) || rg(bias), {});
    nodes_[id].back = [this, a, bias, id]() {
        const Tensor& go = g(id);
        if (rg(a))
            for (int i = 0; i < go.numel(); ++i) g(a)[i] += go[i];
        if (rg(bias))
            for (int r = 0; r < go.rows(); ++r)
                for (int c = 0; c < go.cols(); ++c) g(bias)[c] += go.at(r, c);
    };
    return id;
}

int Tape::embed_rows(int table, const std::vector<int>& ids) {
    check_ids({table});
    const Tensor& T = v(table);
    if (T.ndim() != 2) shape_error("embed_rows", T);
    for (int t : ids)
        if (t >= T.rows() || t < -1)
            throw std::out_of_range("embed_rows: token id " + std::to_string(t) +
                                    " outside vocabulary of size " + std::to_string(T.rows()));
    Tensor out({static_cast<int>(ids.size()), T.cols()});
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 0) continue;  // pad -> zero row
        std::copy(T.data.begin() + static_cast<std::size_t>(ids[i]) * T.cols(),
                  T.data.begin() + static_cast<std::size_t>(ids[i] + 1) * T.cols(),
                  out.data.begin() + i * T.cols());
    }
    std::vector<int> captured = ids;
    int id = push(std::move(out), rg(table), {});
    nodes_[id].back = [this, table, captured, id]() {
        if (!rg(table)) return;
        const Tensor& go = g(id);
        for (std::size_t i = 0; i < captured.size(); ++i) {
            if (captured[i] < 0) continue;
            for (int c = 0; c < go.cols(); ++c)
                g(table).at(captured[i], c) += go.at(static_cast<int>(i), c);
        }
    };
    return id;
}

int Tape::rows_blend(int p, int src_row, const std::vector<int>& dst_rows, double lambda) {
    check_ids({p});
    const Tensor& P = v(p);
    if (P.ndim() != 2) shape_error("rows_blend", P);
    if (src_row < 0 || src_row >= P.rows()) throw std::out_of_range("rows_blend: bad source row");
    for (int j : dst_rows) {
        if (j < 0 || j >= P.rows()) throw std::out_of_range("rows_blend: bad destination row");
        if (j == src_row) throw std::invalid_argument("rows_blend: source row in destinations");
    }
    Tensor out = P;
    for (int j : dst_rows)
        for (int c = 0; c < P.cols(); ++c)
            out.at(j, c) = lambda * P.at(src_row, c) + (1.0 - lambda) * P.at(j, c);
    std::vector<int> dst = dst_rows;
    int id = push(std::move(out), rg(p), {});
    nodes_[id].back = [this, p, src_row, dst, lambda, id]() {
        if (!rg(p)) return;
        const Tensor& go = g(id);
        std::vector<char> is_dst(go.rows(), 0);
        for (int j : dst) is_dst[j] = 1;
        for (int r = 0; r < go.rows(); ++r) {
            const double w = is_dst[r] ? (1.0 - lambda) : 1.0;
            for (int c = 0; c < go.cols(); ++c) g(p).at(r, c) += w * go.at(r, c);
        }
        for (int j : dst)
            for (int c = 0; c < go.cols(); ++c) g(p).at(src_row, c) += lambda * go.at(j, c);
    };
    return id;
}

int Tape::clamp(int a, double lo, double hi) {
    check_ids({a});
    Tensor out(v(a).shape);
    for (int i = 0; i < out.numel(); ++i) out[i] = std::min(hi, std::max(lo, v(a)[i]));
    int id = push(std::move(out), rg(a), {});
    nodes_[id].back = [this, a, lo, hi, id]() {
        if (!rg(a)) return;
        const Tensor& go = g(id);
        for (int i = 0; i < go.numel(); ++i)
            if (v(a)[i] > lo && v(a)[i] < hi) g(a)[i] += go[i];
    };
    return id;
}

void Tape::backward(int id) {
    check_ids({id});
    if (backward_done_) throw std::logic_error("tape: backward already run");
    if (v(id).numel() != 1) throw std::invalid_argument("backward: node is not a scalar");
    backward_done_ = true;
    g(id)[0] = 1.0;
    for (int i = id; i >= 0; --i)
        if (nodes_[i].requires_grad && nodes_[i].back) nodes_[i].back();
}

double grad_check(const std::function<int(Tape&, const std::vector<int>&)>& build,
                  const std::vector<Tensor>& params, double eps) {
    auto eval = [&](const std::vector<Tensor>& ps) {
        Tape t;
        std::vector<int> ids;
        ids.reserve(ps.size());
        for (const auto& p : ps) ids.push_back(t.param(p));
        int out = build(t, ids);
        if (t.val(out).numel() != 1) throw std::invalid_argument("grad_check: output not scalar");
        const double y = t.val(out)[0];
        if (!std::isfinite(y)) throw std::runtime_error("grad_check: non-finite objective");
        return y;
    };

    Tape t;
    std::vector<int> ids;
    for (const auto& p : params) ids.push_back(t.param(p));
    int out = build(t, ids);
    if (t.val(out).numel() != 1) throw std::invalid_argument("grad_check: output not scalar");
    if (!std::isfinite(t.val(out)[0])) throw std::runtime_error("grad_check: non-finite objective");
    t.backward(out);

    double max_rel = 0.0;
    std::vector<Tensor> work = params;
    for (std::size_t p = 0; p < params.size(); ++p) {
        for (int i = 0; i < params[p].numel(); ++i) {
            const double orig = work[p][i];
            work[p][i] = orig + eps;
            const double fp = eval(work);
            work[p][i] = orig - eps;
            const double fm = eval(work);
            work[p][i] = orig;
            const double numeric = (fp - fm) / (2.0 * eps);
            const double analytic = t.grad(ids[p])[i];
            const double rel = std::abs(analytic - numeric) /
                               std::max({1.0, std::abs(analytic), std::abs(numeric)});
            max_rel = std::max(max_rel, rel);
        }
    }
    return max_rel;
}

void adam_step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads,
               AdamState& state, const AdamConfig& cfg) {
    if (params.size() != grads.size())
        throw std::invalid_argument("adam_step: param/grad count mismatch");
    if (state.m.empty()) {
        for (const Tensor* p : params) {
            state.m.emplace_back(p->shape);
            state.v.emplace_back(p->shape);
        }
    }
    if (state.m.size() != params.size())
        throw std::invalid_argument("adam_step: state size mismatch");
    state.t += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (std::size_t p = 0; p < params.size(); ++p) {
        Tensor& w = *params[p];
        const Tensor& gr = *grads[p];
        if (!w.same_shape(gr)) shape_error("adam_step", w, gr);
        Tensor& m = state.m[p];
        Tensor& v = state.v[p];
        for (int i = 0; i < w.numel(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gr[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gr[i] * gr[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            w[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
        }
    }
}

Tensor dropout_mask(const std::vector<int>& shape, double rate, Rng& rng) {
    if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout: rate must be in [0,1)");
    Tensor m(shape);
    const double keep = 1.0 - rate;
    for (auto& x : m.data) x = rng.uniform() < rate ? 0.0 : 1.0 / keep;
    return m;
}

}  // namespace hienet
