#include "hienet/model_head.hpp"

#include <cmath>
#include <stdexcept>

namespace hienet {

int code_wise_attention(Tape& t, int H, int w_a, int b_a, int vpt_rows, int* attn_out) {
    int m = t.tanh(t.bias_add_rows(t.matmul(H, w_a), b_a));       // [N, d_e]
    int scores = t.matmul(m, t.transpose(vpt_rows));              // [N, L]
    int attn = t.softmax_rows(t.transpose(scores));               // [L, N]
    if (attn_out) *attn_out = attn;
    return t.matmul(attn, m);                                     // [L, d_e]
}

int ppr_branch_node(Tape& t, int araw, int k_ppr_const) {
    return t.matmul(k_ppr_const, araw);
}

Tensor ppr_branch(const Tensor& araw, const CoocGraph& g, const PprConfig& cfg, bool iterate) {
    return iterate ? ppr_iterate(g, cfg, araw).Z : ppr_closed_form(g, cfg, araw);
}

AggregateNodes aggregate_nodes(Tape& t, int p, int ppr, int w_fc, int score_w, int score_b) {
    AggregateNodes a;
    a.p3r = t.concat({p, ppr}, 1);                       // [L, 2*d_e]
    a.f = t.matmul(a.p3r, t.transpose(w_fc));            // [L, d_e]
    const int d_e = t.val(a.f).cols();
    int ones = t.constant(Tensor::full({d_e, 1}, 1.0));
    a.logits = t.add(t.matmul(t.mul(a.f, score_w), ones), score_b);  // [L, 1]
    a.probs = t.sigmoid(a.logits);
    return a;
}

int bce_loss_node(Tape& t, int probs, const std::vector<std::uint8_t>& gold) {
    const Tensor& p = t.val(probs);
    const int L = p.rows();
    if (p.ndim() != 2 || p.cols() != 1 || static_cast<int>(gold.size()) != L)
        throw std::invalid_argument("bce: probs must be [L,1] matching gold length");
    Tensor y({L, 1}), ny({L, 1});
    for (int l = 0; l < L; ++l) {
        y.at(l, 0) = gold[l] ? 1.0 : 0.0;
        ny.at(l, 0) = gold[l] ? 0.0 : 1.0;
    }
    int pc = t.clamp(probs, 1e-7, 1.0 - 1e-7);
    int one_minus = t.add_scalar(t.scale(pc, -1.0), 1.0);
    int pos = t.mul(t.constant(std::move(y)), t.log(pc));
    int neg = t.mul(t.constant(std::move(ny)), t.log(one_minus));
    return t.scale(t.sum_all(t.add(pos, neg)), -1.0);
}

void aggregate_plain(const Tensor& p, const Tensor& ppr, const ModelParams& params,
                     std::vector<double>* logits, std::vector<double>* probs) {
    Tape t;
    AggregateNodes a = aggregate_nodes(t, t.constant(p), t.constant(ppr),
                                       t.constant(params.w_fc), t.constant(params.score_w),
                                       t.constant(params.score_b));
    if (logits) *logits = t.val(a.logits).data;
    if (probs) *probs = t.val(a.probs).data;
}

double bce_loss(const std::vector<double>& probs, const std::vector<std::uint8_t>& gold) {
    Tape t;
    Tensor p({static_cast<int>(probs.size()), 1});
    p.data = probs;
    return t.val(bce_loss_node(t, t.constant(p), gold))[0];
}

namespace {

// Progressive blending inside the graph: score with the live aggregate path,
// confirm the argmax above tau, blend into unconfirmed neighbors.
int pm_in_graph(Tape& t, int araw, int ppr, int w_fc, int score_w, int score_b,
                const std::vector<std::vector<int>>& neighbors,
                const std::vector<std::uint8_t>* gold, const PmConfig& pm, PmTrace* trace) {
    pm.validate();
    const int L = t.val(araw).rows();
    int p = araw;
    std::vector<char> confirmed(L, 0);
    for (int round = 0; round < pm.rounds; ++round) {
        AggregateNodes a = aggregate_nodes(t, p, ppr, w_fc, score_w, score_b);
        const Tensor& pr = t.val(a.probs);
        int best = -1;
        for (int l = 0; l < L; ++l) {
            if (confirmed[l]) continue;
            if (best < 0 || pr.at(l, 0) > pr.at(best, 0)) best = l;
        }
        if (best < 0 || pr.at(best, 0) < pm.tau) break;
        confirmed[best] = 1;

        PmEvent ev;
        ev.round = round;
        ev.code = best;
        ev.gold_known = gold != nullptr;
        ev.was_correct = gold ? (*gold)[best] != 0 : false;
        const bool wrong = gold && (*gold)[best] == 0;
        if (!wrong) {
            std::vector<int> dst;
            for (int j : neighbors[best])
                if (j != best && !confirmed[j]) dst.push_back(j);
            ev.affected = dst;
            if (!dst.empty()) p = t.rows_blend(p, best, dst, pm.lambda);
        }
        if (trace) trace->events.push_back(std::move(ev));
        if (wrong) break;
    }
    return p;
}

}  // namespace

DocGraph build_doc_graph(Tape& t, ModelParams& params, const TrainConfig& cfg,
                         const RunContext& ctx, const std::vector<int>& tokens,
                         const ForwardOpts& opts) {
    cfg.validate();
    const bool train = opts.training;
    DocGraph g;

    auto reg = [&](Tensor& x, bool trainable) {
        const int id = trainable && train ? t.param(x) : t.constant(x);
        if (trainable && train) g.trainables.emplace_back(&x, id);
        return id;
    };

    int e_doc = reg(params.e_doc, true);
    std::vector<int> conv_w, conv_b;
    for (std::size_t i = 0; i < params.conv_w.size(); ++i) {
        conv_w.push_back(reg(params.conv_w[i], true));
        conv_b.push_back(reg(params.conv_b[i], true));
    }
    int w_a = reg(params.w_a, true);
    int b_a = reg(params.b_a, true);
    int w_fc = reg(params.w_fc, true);
    int score_w = reg(params.score_w, true);
    int score_b = reg(params.score_b, true);

    // Code representations per mode.
    if (cfg.mode == Mode::NoBhpe) {
        g.vpt = t.constant(ctx.inits);
    } else {
        int vt = reg(params.vt, cfg.finetune_vt);
        int vp;
        if (cfg.pos_trainable) {
            int proj = reg(params.pos_proj, true);
            vp = t.matmul(t.constant(ctx.raw_pos), t.transpose(proj));
        } else {
            vp = t.constant(ctx.vp_rows);
        }
        g.vpt = t.add(vt, vp);
    }

    // Document features.
    const int pad_len = std::max(cfg.enc.max_len, cfg.enc.max_filter());
    std::vector<int> padded = pad_tokens(tokens, pad_len);
    int mask = -1;
    if (train && opts.dropout > 0.0) {
        if (!opts.dropout_rng) throw std::invalid_argument("forward: dropout requires an rng");
        mask = t.constant(dropout_mask({pad_len, cfg.enc.d_e}, opts.dropout, *opts.dropout_rng));
    }
    g.enc = doc_encoder_forward(t, cfg.enc, e_doc, conv_w, conv_b, padded, mask);

    g.araw = code_wise_attention(t, g.enc.H, w_a, b_a, g.vpt, &g.attn);

    g.ppr = cfg.mode == Mode::NoPp ? g.araw : ppr_branch_node(t, g.araw, t.constant(ctx.k_ppr));

    const bool pm_on = cfg.mode != Mode::NoPm && opts.apply_pm && cfg.pm.rounds > 0;
    g.p = pm_on ? pm_in_graph(t, g.araw, g.ppr, w_fc, score_w, score_b, ctx.pm_neighbors,
                              opts.pm_gold, cfg.pm, opts.trace)
                : g.araw;

    g.agg = aggregate_nodes(t, g.p, g.ppr, w_fc, score_w, score_b);
    if (opts.gold) g.loss = bce_loss_node(t, g.agg.probs, *opts.gold);
    return g;
}

}  // namespace hienet
