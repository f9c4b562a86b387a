#include "hienet/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>
#include <stdexcept>

#include "hienet/tree_position.hpp"

namespace hienet {

ModelParams ModelParams::init(const EncoderConfig& enc, int vocab_size, int num_labels,
                              int d_pos, std::uint64_t seed) {
    enc.validate();
    if (vocab_size < 1 || num_labels < 1 || d_pos < 1)
        throw std::invalid_argument("model init: sizes must be positive");
    Rng root(seed);
    Rng r_embed = root.split("embed");
    Rng r_conv = root.split("conv");
    Rng r_head = root.split("head");
    Rng r_bpr = root.split("bpr");

    ModelParams p;
    p.e_doc = Tensor::randn({vocab_size, enc.d_e}, r_embed, 0.1);
    p.e_code = Tensor::randn({vocab_size, enc.d_e}, r_embed, 0.1);
    for (int k : enc.filter_sizes) {
        const double s = std::sqrt(2.0 / (enc.d_e * k));
        p.conv_w.push_back(Tensor::randn({enc.d_c, enc.d_e * k}, r_conv, s));
        p.conv_b.push_back(Tensor({enc.d_c}));
    }
    p.w_a = Tensor::randn({enc.d_h(), enc.d_e}, r_head, 1.0 / std::sqrt(enc.d_h()));
    p.b_a = Tensor({enc.d_e});
    p.w_fc = Tensor::randn({enc.d_e, 2 * enc.d_e}, r_head, 1.0 / std::sqrt(2.0 * enc.d_e));
    p.score_w = Tensor::randn({num_labels, enc.d_e}, r_head, 1.0 / std::sqrt(enc.d_e));
    p.score_b = Tensor({num_labels, 1});
    p.vt = Tensor({num_labels, enc.d_e});
    p.pos_proj = PosProjection::orthonormal(enc.d_e, d_pos, root.split("pos").seed()).matrix;
    p.bpr = BprParams::init(enc.d_e, r_bpr);
    return p;
}

std::vector<std::pair<std::string, Tensor*>> ModelParams::entries() {
    std::vector<std::pair<std::string, Tensor*>> e = {
        {"e_doc", &e_doc},     {"e_code", &e_code},   {"w_a", &w_a},
        {"b_a", &b_a},         {"w_fc", &w_fc},       {"score_w", &score_w},
        {"score_b", &score_b}, {"vt", &vt},           {"pos_proj", &pos_proj},
    };
    for (std::size_t i = 0; i < conv_w.size(); ++i) {
        e.emplace_back("conv_w." + std::to_string(i), &conv_w[i]);
        e.emplace_back("conv_b." + std::to_string(i), &conv_b[i]);
    }
    for (auto& [name, t] : bpr.entries()) e.emplace_back(name, t);
    std::sort(e.begin(), e.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return e;
}

std::vector<std::pair<std::string, const Tensor*>> ModelParams::entries() const {
    auto mut = const_cast<ModelParams*>(this)->entries();
    std::vector<std::pair<std::string, const Tensor*>> e;
    e.reserve(mut.size());
    for (auto& [n, t] : mut) e.emplace_back(n, t);
    return e;
}

namespace {

constexpr char kCkptMagic[] = "HIENETCKPT";
constexpr std::uint32_t kCkptVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("checkpoint: truncated file");
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path,
                     const std::vector<std::pair<std::string, const Tensor*>>& items) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out.write(kCkptMagic, sizeof(kCkptMagic) - 1);
    write_pod(out, kCkptVersion);
    write_pod(out, static_cast<std::uint32_t>(items.size()));
    for (const auto& [name, t] : items) {
        write_pod(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_pod(out, static_cast<std::uint32_t>(t->shape.size()));
        for (int d : t->shape) write_pod(out, static_cast<std::int32_t>(d));
        out.write(reinterpret_cast<const char*>(t->data.data()),
                  static_cast<std::streamsize>(t->data.size() * sizeof(double)));
    }
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

std::map<std::string, Tensor> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[sizeof(kCkptMagic) - 1];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCkptMagic, sizeof(magic)) != 0)
        throw std::runtime_error(path + ": not a checkpoint file");
    const auto version = read_pod<std::uint32_t>(in);
    if (version != kCkptVersion)
        throw std::runtime_error(path + ": unsupported checkpoint version " +
                                 std::to_string(version));
    const auto count = read_pod<std::uint32_t>(in);
    std::map<std::string, Tensor> items;
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto name_len = read_pod<std::uint32_t>(in);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        const auto ndim = read_pod<std::uint32_t>(in);
        std::vector<int> shape;
        for (std::uint32_t d = 0; d < ndim; ++d) shape.push_back(read_pod<std::int32_t>(in));
        Tensor t(shape);
        in.read(reinterpret_cast<char*>(t.data.data()),
                static_cast<std::streamsize>(t.data.size() * sizeof(double)));
        if (!in) throw std::runtime_error(path + ": truncated tensor '" + name + "'");
        items.emplace(std::move(name), std::move(t));
    }
    return items;
}

void load_params(const std::string& path, ModelParams& params) {
    auto items = load_checkpoint(path);
    for (auto& [name, t] : params.entries()) {
        auto it = items.find(name);
        if (it == items.end())
            throw std::runtime_error(path + ": missing tensor '" + name + "'");
        if (it->second.shape != t->shape)
            throw std::runtime_error(path + ": shape mismatch for '" + name + "': file has " +
                                     it->second.shape_str() + ", model expects " +
                                     t->shape_str());
        *t = it->second;
    }
}

std::pair<int, int> resolve_position_caps(const TrainConfig& cfg, const CodeTree& tree) {
    const int n = cfg.pos_n > 0 ? cfg.pos_n : std::max(1, tree.max_branching());
    const int k = cfg.pos_k > 0 ? cfg.pos_k : std::max(1, tree.max_depth());
    if (n < tree.max_branching() || k < tree.max_depth())
        throw std::invalid_argument("position capacity (n=" + std::to_string(n) +
                                    ", k=" + std::to_string(k) + ") below tree requirements (" +
                                    std::to_string(tree.max_branching()) + ", " +
                                    std::to_string(tree.max_depth()) + ")");
    return {n, k};
}

std::vector<std::uint8_t> gold_vector(const CodeTree& tree,
                                      const std::vector<std::string>& labels) {
    std::vector<std::uint8_t> y(tree.num_labels(), 0);
    for (const auto& l : labels) y[tree.label_index(l)] = 1;
    return y;
}

RunContext build_context(const TrainConfig& cfg, const CodeTree& tree, const Vocab& vocab,
                         const Dataset& train, const ModelParams& params) {
    cfg.validate();
    const int L = tree.num_labels();
    if (L == 0) throw std::invalid_argument("context: tree has no codes");

    RunContext ctx;
    ctx.num_labels = L;
    std::tie(ctx.pos_n, ctx.pos_k) = resolve_position_caps(cfg, tree);

    std::vector<std::set<int>> label_sets;
    label_sets.reserve(train.docs.size());
    for (const auto& doc : train.docs) {
        std::set<int> s;
        for (const auto& l : doc.labels) {
            if (!tree.contains(l))
                throw std::invalid_argument("dataset: label '" + l + "' not in tree (doc " +
                                            std::to_string(doc.doc_id) + ")");
            s.insert(tree.label_index(l));
        }
        label_sets.push_back(std::move(s));
    }
    ctx.graph = CoocGraph::build(L, label_sets, cfg.cooc_binarize);

    // Propagation matrix: closed form by default, or derived by running the
    // fixed-point iteration on the identity.
    Tensor eye({L, L});
    for (int i = 0; i < L; ++i) eye.at(i, i) = 1.0;
    ctx.k_ppr = cfg.ppr_iterate_mode ? ppr_iterate(ctx.graph, cfg.ppr, eye).Z
                                     : ppr_closed_form(ctx.graph, cfg.ppr, eye);

    ctx.pm_neighbors = resolve_neighbors(ctx.graph, tree, cfg.pm.neighbor_source);

    ctx.raw_pos = encode_all_raw(tree, ctx.pos_n, ctx.pos_k);
    if (params.pos_proj.shape != std::vector<int>{cfg.enc.d_e, ctx.pos_n * ctx.pos_k})
        throw std::invalid_argument("context: pos_proj " + params.pos_proj.shape_str() +
                                    " does not match position width " +
                                    std::to_string(ctx.pos_n * ctx.pos_k));
    PosProjection proj;
    proj.matrix = params.pos_proj;
    Tensor vp = project_all(tree, proj, ctx.pos_n, ctx.pos_k);  // [d_e, L]
    ctx.vp_rows = Tensor({L, cfg.enc.d_e});
    for (int l = 0; l < L; ++l)
        for (int c = 0; c < cfg.enc.d_e; ++c) ctx.vp_rows.at(l, c) = vp.at(c, l);

    ctx.inits = code_inits(tree, vocab, params.e_code);
    return ctx;
}

}  // namespace hienet
