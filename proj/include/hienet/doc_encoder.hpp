#pragma once

#include <vector>

#include "hienet/tape.hpp"

namespace hienet {

struct EncoderConfig {
    int d_e = 100;
    std::vector<int> filter_sizes = {1, 3, 5, 7, 10};
    int d_c = 128;
    int max_len = 96;

    int d_h() const { return static_cast<int>(filter_sizes.size()) * d_c; }
    int max_filter() const;
    void validate() const;
};

// Tape node ids of the encoder outputs. H keeps the per-position feature map
// (rows = positions, cols = l*d_c) for code-wise attention; pooled is the
// channel-concatenated max over positions.
struct DocEncNodes {
    int X = -1;       // [N, d_e]
    int H = -1;       // [N, d_h]
    int pooled = -1;  // [d_h]
};

// Truncate/pad a token sequence to len; pad positions are -1 (zero embedding).
std::vector<int> pad_tokens(const std::vector<int>& tokens, int len);

// Multi-channel 1-D convolution over the embedded document. Each channel
// right-pads its input by k-1 zero rows so all channels produce one feature
// row per position. dropout_mask_node < 0 disables dropout.
DocEncNodes doc_encoder_forward(Tape& t, const EncoderConfig& cfg, int e_doc_node,
                                const std::vector<int>& conv_w_nodes,
                                const std::vector<int>& conv_b_nodes,
                                const std::vector<int>& padded_tokens,
                                int dropout_mask_node = -1);

}  // namespace hienet
