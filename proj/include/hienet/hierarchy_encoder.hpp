#pragma once

#include <utility>
#include <vector>

#include "hienet/code_tree.hpp"
#include "hienet/synth_data.hpp"
#include "hienet/tape.hpp"

namespace hienet {

// Parameters of the two hierarchy encoders. The up encoder is a single
// self-attention block plus feed-forward over a node's children set (no
// positional encoding, so it is permutation-equivariant); the down encoder is
// a two-layer MLP over (parent position + own init). Linear weights are
// stored [in, out] and applied by right-multiplication.
struct BprParams {
    Tensor Wq, Wk, Wv, Wo;  // [d_e, d_e]
    Tensor W1, W2;          // FFN [d_e, d_e]
    Tensor b1, b2;          // [d_e]
    Tensor D1, D2;          // down MLP [d_e, d_e]
    Tensor db1, db2;        // [d_e]

    static BprParams init(int d_e, Rng& rng);
    std::vector<std::pair<std::string, Tensor*>> up_entries();
    std::vector<std::pair<std::string, Tensor*>> down_entries();
    std::vector<std::pair<std::string, Tensor*>> entries();
};

struct BprParamNodes {
    int Wq, Wk, Wv, Wo, W1, W2, b1, b2, D1, D2, db1, db2;
};

BprParamNodes register_bpr_params(Tape& t, BprParams& p, bool as_params);

// Node ids of the hierarchy-encoder outputs over the whole tree.
struct BprNodes {
    int i_up = -1;    // [L, d_e]
    int i_down = -1;  // [L, d_e]
    int root_up = -1;    // [1, d_e]; the root copies this into its i_down
    int root_down = -1;  // == root_up
    int loss = -1;    // symmetric KL alignment loss (scalar)
    int vt = -1;      // (i_up + i_down) / 2, [L, d_e]
};

// Builds the bidirectional pass. `inits` and `positions` are [L, d_e] nodes
// (rows in label order). For each internal node the children's
// (position + init) vectors are encoded jointly and each child receives its
// contextual up representation; the root pools its children's outputs. The
// down representation of a non-root node encodes (parent position + own
// init); the root's down representation is a copy of its up representation.
BprNodes build_bpr_graph(Tape& t, const CodeTree& tree, int inits, int positions,
                         const BprParamNodes& p, int d_e);

// Scalar alignment loss on already-computed representations: rows are
// softmax-normalized, then L1 + L2 + (L1-L2)^2 with L1/L2 the two mean KLs
// (1e-8 floor inside the logs).
int bpr_loss_node(Tape& t, int up_reps, int down_reps);
double bpr_loss_value(const Tensor& up, const Tensor& down);

// Plain-value wrappers over the tape graph (parameters as constants).
Tensor up_pass(const CodeTree& tree, const Tensor& inits, const Tensor& positions,
               BprParams& p, Tensor* root_up = nullptr);
Tensor down_pass(const CodeTree& tree, const Tensor& inits, const Tensor& positions,
                 BprParams& p);

// Mean of the description-token embeddings per code; empty description gives
// the zero vector. Returns [L, d_e].
Tensor code_inits(const CodeTree& tree, const Vocab& vocab, const Tensor& e_code);

struct BprTrainConfig {
    double lr = 0.01;
    int max_epochs = 500;
    double stop_loss = 0.01;
};

struct BprTrainResult {
    Tensor vt;  // [L, d_e]
    bool converged = false;
    double final_loss = 0.0;
    int epochs = 0;
};

// Alternating Adam steps (even epochs update the up encoder, odd epochs the
// down encoder) until the loss drops below stop_loss or epochs run out.
BprTrainResult train_bpr(const CodeTree& tree, const Tensor& inits, const Tensor& positions,
                         BprParams& p, const BprTrainConfig& cfg);

// Elementwise Vt + Vp (shape-checked).
Tensor combine(const Tensor& vt, const Tensor& vp);

}  // namespace hienet
