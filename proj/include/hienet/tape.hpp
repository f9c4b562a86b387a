#pragma once

#include <functional>
#include <vector>

#include "hienet/tensor.hpp"

namespace hienet {

// Reverse-mode tape over dense Tensors. Nodes are appended in execution
// order, so the node index order is already topological; backward() walks it
// once in reverse. No implicit broadcasting: every op states its exact shape
// contract and throws on mismatch.
class Tape {
public:
    // Leaf whose gradient is not tracked.
    int constant(Tensor v);
    // Leaf that accumulates gradient during backward().
    int param(Tensor v);

    const Tensor& val(int id) const { return nodes_[id].value; }
    const Tensor& grad(int id) const { return nodes_[id].grad; }
    int size() const { return static_cast<int>(nodes_.size()); }

    // [m,k] x [k,n] -> [m,n]
    int matmul(int a, int b);
    // same shape, elementwise
    int add(int a, int b);
    int mul(int a, int b);
    // x * s for a compile-time constant scalar
    int scale(int a, double s);
    // x + c elementwise
    int add_scalar(int a, double c);
    // elementwise natural log; inputs must be > 0
    int log(int a);
    int relu(int a);
    int tanh(int a);
    int sigmoid(int a);
    // row-wise softmax of a [r,c] tensor
    int softmax_rows(int a);
    int transpose(int a);
    // concatenate rank-2 tensors along axis 0 (rows) or 1 (cols)
    int concat(const std::vector<int>& ids, int axis);
    // contiguous slice of rows (axis 0) or cols (axis 1)
    int slice(int a, int axis, int start, int len);
    // valid 1-D convolution over rows: x [N,d], w [f, d*k], b [f] -> [N-k+1, f]
    int conv1d(int x, int w, int b, int k);
    // max over rows (axis 0 -> [cols]) or cols (axis 1 -> [rows]); ties route
    // the gradient to the lowest index
    int max_over_axis(int a, int axis);
    int mean_all(int a);
    int sum_all(int a);
    // a [r,c] + bias [c] added to every row
    int bias_add_rows(int a, int bias);
    // rows gathered from table [V,d]; id -1 selects a zero row (padding)
    int embed_rows(int table, const std::vector<int>& ids);
    // out = p except rows j in dst: out_j = lambda*p_src + (1-lambda)*p_j
    int rows_blend(int p, int src_row, const std::vector<int>& dst_rows, double lambda);
    // clamp to [lo, hi]; gradient is zero where the value was clamped
    int clamp(int a, double lo, double hi);

    // Seeds d(out)/d(out) = 1 on a scalar node and accumulates gradients into
    // every param leaf reachable from it. One backward pass per tape.
    void backward(int id);

private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::function<void()> back;  // empty for leaves
        bool requires_grad = false;
    };

    int push(Tensor value, bool requires_grad, std::function<void()> back);
    Tensor& g(int id) { return nodes_[id].grad; }
    const Tensor& v(int id) const { return nodes_[id].value; }
    bool rg(int id) const { return nodes_[id].requires_grad; }
    void check_ids(const std::vector<int>& ids) const;

    std::vector<Node> nodes_;
    bool backward_done_ = false;
};

// Central-difference gradient checker. `build` constructs a scalar-valued
// computation over the given parameters (registered as tape params in order)
// and returns the scalar node id. Returns the max over all parameter
// coordinates of |analytic - numeric| / max(1, |analytic|, |numeric|).
double grad_check(const std::function<int(Tape&, const std::vector<int>&)>& build,
                  const std::vector<Tensor>& params, double eps = 1e-5);

struct AdamState {
    std::vector<Tensor> m, v;
    long t = 0;
};

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Standard Adam with bias correction. `state` is lazily initialized to the
// parameter shapes on first use.
void adam_step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads,
               AdamState& state, const AdamConfig& cfg);

// Inverted-dropout mask: entries are 0 with probability rate, else 1/(1-rate).
Tensor dropout_mask(const std::vector<int>& shape, double rate, Rng& rng);

}  // namespace hienet
