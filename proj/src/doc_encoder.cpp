#include "hienet/doc_encoder.hpp"

#include <algorithm>
#include <stdexcept>

namespace hienet {

int EncoderConfig::max_filter() const {
    int m = 0;
    for (int k : filter_sizes) m = std::max(m, k);
    return m;
}

void EncoderConfig::validate() const {
    if (d_e < 1 || d_c < 1 || max_len < 1)
        throw std::invalid_argument("encoder config: dimensions must be positive");
    if (filter_sizes.empty()) throw std::invalid_argument("encoder config: no filter sizes");
    int mn = filter_sizes[0];
    for (int k : filter_sizes) {
        if (k < 1) throw std::invalid_argument("encoder config: filter size must be >= 1");
        mn = std::min(mn, k);
    }
    if (mn > max_len)
        throw std::invalid_argument("encoder config: min filter size exceeds max_len");
}

std::vector<int> pad_tokens(const std::vector<int>& tokens, int len) {
    std::vector<int> out(tokens.begin(),
                         tokens.begin() + std::min<std::size_t>(tokens.size(), len));
    out.resize(len, -1);
    return out;
}

DocEncNodes doc_encoder_forward(Tape& t, const EncoderConfig& cfg, int e_doc_node,
                                const std::vector<int>& conv_w_nodes,
                                const std::vector<int>& conv_b_nodes,
                                const std::vector<int>& padded_tokens, int dropout_mask_node) {
    cfg.validate();
    if (conv_w_nodes.size() != cfg.filter_sizes.size() ||
        conv_b_nodes.size() != cfg.filter_sizes.size())
        throw std::invalid_argument("doc_encoder: one filter/bias pair per channel required");
    const int n = static_cast<int>(padded_tokens.size());
    if (n < cfg.max_filter())
        throw std::invalid_argument("doc_encoder: document length " + std::to_string(n) +
                                    " below largest filter size " +
                                    std::to_string(cfg.max_filter()));

    DocEncNodes out;
    out.X = t.embed_rows(e_doc_node, padded_tokens);
    int x = out.X;
    if (dropout_mask_node >= 0) x = t.mul(x, dropout_mask_node);

    std::vector<int> channels;
    for (std::size_t c = 0; c < cfg.filter_sizes.size(); ++c) {
        const int k = cfg.filter_sizes[c];
        int xin = x;
        if (k > 1) {
            int zeros = t.constant(Tensor({k - 1, cfg.d_e}));
            xin = t.concat({x, zeros}, 0);
        }
        channels.push_back(t.relu(t.conv1d(xin, conv_w_nodes[c], conv_b_nodes[c], k)));
    }
    out.H = channels.size() == 1 ? channels[0] : t.concat(channels, 1);
    out.pooled = t.max_over_axis(out.H, 0);
    return out;
}

}  // namespace hienet
