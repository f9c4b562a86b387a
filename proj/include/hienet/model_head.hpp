#pragma once

#include <cstdint>
#include <vector>

#include "hienet/config.hpp"
#include "hienet/doc_encoder.hpp"
#include "hienet/model.hpp"
#include "hienet/progressive.hpp"
#include "hienet/tape.hpp"

namespace hienet {

// s_l = softmax over positions of tanh(H*W_a + b_a) . v_l, pooled over the
// projected map: a_l = s_l^T * tanh(H*W_a + b_a). Returns the [L, d_e]
// attended features; attn_out (optional) receives the [L, N] attention rows.
int code_wise_attention(Tape& t, int H, int w_a, int b_a, int vpt_rows, int* attn_out = nullptr);

// Propagated features: k_ppr_const is the precomputed [L, L] matrix.
int ppr_branch_node(Tape& t, int araw, int k_ppr_const);

// Non-tape propagation through the graph (same fixed point).
Tensor ppr_branch(const Tensor& araw, const CoocGraph& g, const PprConfig& cfg,
                  bool iterate = false);

struct AggregateNodes {
    int p3r = -1;    // [L, 2*d_e]
    int f = -1;      // [L, d_e]
    int logits = -1; // [L, 1]
    int probs = -1;  // [L, 1]
};

// Per code l: F_l = W_fc * [P_l ; PPR_l], logit_l = score_w[l].F_l + b_l,
// prob_l = sigmoid(logit_l).
AggregateNodes aggregate_nodes(Tape& t, int p, int ppr, int w_fc, int score_w, int score_b);

// -sum_l [ y_l log p_l + (1-y_l) log(1-p_l) ] with probs clamped to
// [1e-7, 1-1e-7].
int bce_loss_node(Tape& t, int probs, const std::vector<std::uint8_t>& gold);

// Plain wrappers (tape with constants under the hood, so values match the
// training graph bit for bit).
void aggregate_plain(const Tensor& p, const Tensor& ppr, const ModelParams& params,
                     std::vector<double>* logits, std::vector<double>* probs);
double bce_loss(const std::vector<double>& probs, const std::vector<std::uint8_t>& gold);

struct ForwardOpts {
    bool training = false;
    double dropout = 0.0;       // applied to the embedded document when training
    Rng* dropout_rng = nullptr;
    const std::vector<std::uint8_t>* gold = nullptr;     // builds the loss node
    const std::vector<std::uint8_t>* pm_gold = nullptr;  // gold-aware PM stop
    bool apply_pm = false;
    PmTrace* trace = nullptr;
};

struct DocGraph {
    DocEncNodes enc;
    int vpt = -1;     // [L, d_e]
    int attn = -1;    // [L, N]
    int araw = -1;    // [L, d_e]
    int p = -1;       // [L, d_e] after the progressive mechanism
    int ppr = -1;     // [L, d_e]
    AggregateNodes agg;
    int loss = -1;    // scalar; -1 when no gold given
    std::vector<std::pair<Tensor*, int>> trainables;  // (owner, tape node)
};

// Builds the full per-document computation graph in the configured mode.
DocGraph build_doc_graph(Tape& t, ModelParams& params, const TrainConfig& cfg,
                         const RunContext& ctx, const std::vector<int>& tokens,
                         const ForwardOpts& opts);

}  // namespace hienet
