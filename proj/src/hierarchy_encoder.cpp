#include "hienet/hierarchy_encoder.hpp"

#include <cmath>
#include <stdexcept>

namespace hienet {

BprParams BprParams::init(int d_e, Rng& rng) {
    const double s = 1.0 / std::sqrt(static_cast<double>(d_e));
    BprParams p;
    p.Wq = Tensor::randn({d_e, d_e}, rng, s);
    p.Wk = Tensor::randn({d_e, d_e}, rng, s);
    p.Wv = Tensor::randn({d_e, d_e}, rng, s);
    p.Wo = Tensor::randn({d_e, d_e}, rng, s);
    p.W1 = Tensor::randn({d_e, d_e}, rng, s);
    p.W2 = Tensor::randn({d_e, d_e}, rng, s);
    p.b1 = Tensor({d_e});
    p.b2 = Tensor({d_e});
    p.D1 = Tensor::randn({d_e, d_e}, rng, s);
    p.D2 = Tensor::randn({d_e, d_e}, rng, s);
    p.db1 = Tensor({d_e});
    p.db2 = Tensor({d_e});
    return p;
}

std::vector<std::pair<std::string, Tensor*>> BprParams::up_entries() {
    return {{"bpr.Wq", &Wq}, {"bpr.Wk", &Wk}, {"bpr.Wv", &Wv}, {"bpr.Wo", &Wo},
            {"bpr.W1", &W1}, {"bpr.W2", &W2}, {"bpr.b1", &b1}, {"bpr.b2", &b2}};
}

std::vector<std::pair<std::string, Tensor*>> BprParams::down_entries() {
    return {{"bpr.D1", &D1}, {"bpr.D2", &D2}, {"bpr.db1", &db1}, {"bpr.db2", &db2}};
}

std::vector<std::pair<std::string, Tensor*>> BprParams::entries() {
    auto e = up_entries();
    for (auto& d : down_entries()) e.push_back(d);
    return e;
}

BprParamNodes register_bpr_params(Tape& t, BprParams& p, bool as_params) {
    auto reg = [&](Tensor& x) { return as_params ? t.param(x) : t.constant(x); };
    BprParamNodes n{};
    n.Wq = reg(p.Wq);
    n.Wk = reg(p.Wk);
    n.Wv = reg(p.Wv);
    n.Wo = reg(p.Wo);
    n.W1 = reg(p.W1);
    n.W2 = reg(p.W2);
    n.b1 = reg(p.b1);
    n.b2 = reg(p.b2);
    n.D1 = reg(p.D1);
    n.D2 = reg(p.D2);
    n.db1 = reg(p.db1);
    n.db2 = reg(p.db2);
    return n;
}

namespace {

// One self-attention + FFN block over a set of row vectors, residual wired.
int up_block(Tape& t, int u, const BprParamNodes& p, int d_e) {
    int q = t.matmul(u, p.Wq);
    int k = t.matmul(u, p.Wk);
    int v = t.matmul(u, p.Wv);
    int attn = t.softmax_rows(t.scale(t.matmul(q, t.transpose(k)), 1.0 / std::sqrt(d_e)));
    int h = t.add(u, t.matmul(t.matmul(attn, v), p.Wo));
    int ff = t.bias_add_rows(t.matmul(t.relu(t.bias_add_rows(t.matmul(h, p.W1), p.b1)), p.W2),
                             p.b2);
    return t.add(h, ff);
}

}  // namespace

BprNodes build_bpr_graph(Tape& t, const CodeTree& tree, int inits, int positions,
                         const BprParamNodes& p, int d_e) {
    const int L = tree.num_labels();
    if (L == 0) throw std::invalid_argument("bpr: tree has no codes");
    if (t.val(inits).shape != std::vector<int>{L, d_e} ||
        t.val(positions).shape != std::vector<int>{L, d_e})
        throw std::invalid_argument("bpr: inits/positions must be [L, d_e]");

    BprNodes out;
    int pi = t.add(positions, inits);  // per-code input vectors

    // Up pass: encode each internal node's children set jointly.
    std::vector<std::pair<int, int>> up_row(L, {-1, -1});  // (node id, row)
    for (int idx = 0; idx < tree.num_nodes(); ++idx) {
        const CodeNode& node = tree.node(idx);
        if (node.children.empty()) continue;
        std::vector<int> child_labels;
        for (int c : node.children) child_labels.push_back(tree.label_index(tree.node(c).code));
        int u = t.embed_rows(pi, child_labels);
        int enc = up_block(t, u, p, d_e);
        for (std::size_t m = 0; m < child_labels.size(); ++m)
            up_row[child_labels[m]] = {enc, static_cast<int>(m)};
        if (idx == 0) {
            // root has no sibling group; pool its children's outputs
            const int m = static_cast<int>(child_labels.size());
            Tensor ones({1, m});
            for (auto& x : ones.data) x = 1.0 / m;
            out.root_up = t.matmul(t.constant(std::move(ones)), enc);
        }
    }
    std::vector<int> rows;
    rows.reserve(L);
    for (int l = 0; l < L; ++l) {
        auto [node_id, row] = up_row[l];
        if (node_id < 0) throw std::logic_error("bpr: label missing from up pass");
        rows.push_back(t.slice(node_id, 0, row, 1));
    }
    out.i_up = rows.size() == 1 ? rows[0] : t.concat(rows, 0);
    out.root_down = out.root_up;

    // Down pass: encode (parent position + own init) for every code.
    std::vector<int> parent_rows(L);
    for (int l = 0; l < L; ++l) {
        const CodeNode& node = tree.node(tree.labels()[l]);
        const int pidx = node.parent;
        parent_rows[l] = pidx > 0 ? tree.label_index(tree.node(pidx).code) : -1;  // root -> zero
    }
    int x_down = t.add(t.embed_rows(positions, parent_rows), inits);
    int h = t.tanh(t.bias_add_rows(t.matmul(x_down, p.D1), p.db1));
    out.i_down = t.bias_add_rows(t.matmul(h, p.D2), p.db2);

    out.loss = bpr_loss_node(t, out.i_up, out.i_down);
    out.vt = t.scale(t.add(out.i_up, out.i_down), 0.5);
    return out;
}

int bpr_loss_node(Tape& t, int up_reps, int down_reps) {
    const Tensor& u = t.val(up_reps);
    const Tensor& d = t.val(down_reps);
    if (u.ndim() != 2 || !u.same_shape(d)) shape_error("bpr_loss", u, d);
    const int L = u.rows();
    int pu = t.softmax_rows(up_reps);
    int pd = t.softmax_rows(down_reps);
    int lu = t.log(t.add_scalar(pu, 1e-8));
    int ld = t.log(t.add_scalar(pd, 1e-8));
    int kl1 = t.scale(t.sum_all(t.mul(pu, t.add(lu, t.scale(ld, -1.0)))), 1.0 / L);
    int kl2 = t.scale(t.sum_all(t.mul(pd, t.add(ld, t.scale(lu, -1.0)))), 1.0 / L);
    int diff = t.add(kl1, t.scale(kl2, -1.0));
    return t.add(t.add(kl1, kl2), t.mul(diff, diff));
}

double bpr_loss_value(const Tensor& up, const Tensor& down) {
    Tape t;
    return t.val(bpr_loss_node(t, t.constant(up), t.constant(down)))[0];
}

Tensor up_pass(const CodeTree& tree, const Tensor& inits, const Tensor& positions, BprParams& p,
               Tensor* root_up) {
    Tape t;
    auto nodes = register_bpr_params(t, p, false);
    BprNodes b = build_bpr_graph(t, tree, t.constant(inits), t.constant(positions), nodes,
                                 inits.cols());
    if (root_up) *root_up = t.val(b.root_up);
    return t.val(b.i_up);
}

Tensor down_pass(const CodeTree& tree, const Tensor& inits, const Tensor& positions,
                 BprParams& p) {
    Tape t;
    auto nodes = register_bpr_params(t, p, false);
    BprNodes b = build_bpr_graph(t, tree, t.constant(inits), t.constant(positions), nodes,
                                 inits.cols());
    return t.val(b.i_down);
}

Tensor code_inits(const CodeTree& tree, const Vocab& vocab, const Tensor& e_code) {
    const int L = tree.num_labels();
    const int d_e = e_code.cols();
    Tensor out({L, d_e});
    for (int l = 0; l < L; ++l) {
        const CodeNode& node = tree.node(tree.labels()[l]);
        if (node.desc_words.empty()) continue;
        for (const auto& w : node.desc_words) {
            const int id = vocab.id(w);
            for (int c = 0; c < d_e; ++c) out.at(l, c) += e_code.at(id, c);
        }
        const double inv = 1.0 / static_cast<double>(node.desc_words.size());
        for (int c = 0; c < d_e; ++c) out.at(l, c) *= inv;
    }
    return out;
}

BprTrainResult train_bpr(const CodeTree& tree, const Tensor& inits, const Tensor& positions,
                         BprParams& p, const BprTrainConfig& cfg) {
    const int d_e = inits.cols();
    AdamState up_state, down_state;
    AdamConfig adam;
    adam.lr = cfg.lr;

    BprTrainResult res;
    for (int epoch = 0; epoch <= cfg.max_epochs; ++epoch) {
        Tape t;
        auto nodes = register_bpr_params(t, p, true);
        BprNodes b = build_bpr_graph(t, tree, t.constant(inits), t.constant(positions), nodes,
                                     d_e);
        res.final_loss = t.val(b.loss)[0];
        res.epochs = epoch;
        if (res.final_loss < cfg.stop_loss) {
            res.converged = true;
            res.vt = t.val(b.vt);
            return res;
        }
        if (epoch == cfg.max_epochs) {
            res.vt = t.val(b.vt);
            return res;
        }
        t.backward(b.loss);

        const bool update_up = (epoch % 2) == 0;
        auto group = update_up ? p.up_entries() : p.down_entries();
        std::vector<int> ids;
        if (update_up)
            ids = {nodes.Wq, nodes.Wk, nodes.Wv, nodes.Wo, nodes.W1, nodes.W2, nodes.b1, nodes.b2};
        else
            ids = {nodes.D1, nodes.D2, nodes.db1, nodes.db2};
        std::vector<Tensor*> params;
        std::vector<const Tensor*> grads;
        for (std::size_t i = 0; i < group.size(); ++i) {
            params.push_back(group[i].second);
            grads.push_back(&t.grad(ids[i]));
        }
        adam_step(params, grads, update_up ? up_state : down_state, adam);
    }
    return res;
}

Tensor combine(const Tensor& vt, const Tensor& vp) {
    if (!vt.same_shape(vp)) shape_error("combine", vt, vp);
    Tensor out(vt.shape);
    for (int i = 0; i < out.numel(); ++i) out[i] = vt[i] + vp[i];
    return out;
}

}  // namespace hienet
