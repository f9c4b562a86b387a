#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hienet/code_tree.hpp"
#include "hienet/config.hpp"
#include "hienet/cooc_graph.hpp"
#include "hienet/hierarchy_encoder.hpp"
#include "hienet/synth_data.hpp"
#include "hienet/tensor.hpp"

namespace hienet {

// Every trainable tensor in the model. Linear weights follow the [in, out]
// right-multiplication convention except where noted.
struct ModelParams {
    Tensor e_doc;    // [V, d_e] document token embeddings
    Tensor e_code;   // [V, d_e] description embeddings (seeded, fixed)
    std::vector<Tensor> conv_w;  // per channel [d_c, d_e*k]
    std::vector<Tensor> conv_b;  // per channel [d_c]
    Tensor w_a;      // [d_h, d_e] attention projection
    Tensor b_a;      // [d_e]
    Tensor w_fc;     // [d_e, 2*d_e] aggregation map, applied as x * w_fc^T
    Tensor score_w;  // [L, d_e] per-code scoring vectors
    Tensor score_b;  // [L, 1]
    Tensor vt;       // [L, d_e] hierarchy representations from the BPR phase
    Tensor pos_proj; // [d_e, n*k]
    BprParams bpr;

    static ModelParams init(const EncoderConfig& enc, int vocab_size, int num_labels, int d_pos,
                            std::uint64_t seed);

    std::vector<std::pair<std::string, Tensor*>> entries();
    std::vector<std::pair<std::string, const Tensor*>> entries() const;
};

// Versioned binary record of named tensors. Loading rejects shape mismatches.
void save_checkpoint(const std::string& path,
                     const std::vector<std::pair<std::string, const Tensor*>>& items);
std::map<std::string, Tensor> load_checkpoint(const std::string& path);
void load_params(const std::string& path, ModelParams& params);

// Everything derived from (config, tree, vocab, training split) that stays
// fixed during a run.
struct RunContext {
    int num_labels = 0;
    int pos_n = 0, pos_k = 0;
    CoocGraph graph;                  // built from the training split
    Tensor k_ppr;                     // [L, L] propagation matrix
    std::vector<std::vector<int>> pm_neighbors;
    Tensor raw_pos;                   // [L, n*k]
    Tensor vp_rows;                   // [L, d_e] projected positions (row layout)
    Tensor inits;                     // [L, d_e] description-mean inits
    std::vector<std::vector<std::uint8_t>> fold_gold;  // unused placeholder
};

// Resolve position capacities from config or tree; capacity overflow is a
// hard error.
std::pair<int, int> resolve_position_caps(const TrainConfig& cfg, const CodeTree& tree);

RunContext build_context(const TrainConfig& cfg, const CodeTree& tree, const Vocab& vocab,
                         const Dataset& train, const ModelParams& params);

std::vector<std::uint8_t> gold_vector(const CodeTree& tree,
                                      const std::vector<std::string>& labels);

}  // namespace hienet
