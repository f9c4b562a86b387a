#include "hienet/trainer.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace hienet {

namespace {

void validate_dataset(const CodeTree& tree, const Dataset& ds, int vocab_size) {
    for (const auto& doc : ds.docs) {
        for (const auto& l : doc.labels)
            if (!tree.contains(l))
                throw std::invalid_argument("dataset: label '" + l + "' not in tree (doc " +
                                            std::to_string(doc.doc_id) + ")");
        for (int t : doc.tokens)
            if (t < 0 || t >= vocab_size)
                throw std::invalid_argument("dataset: token id " + std::to_string(t) +
                                            " outside vocabulary (doc " +
                                            std::to_string(doc.doc_id) + ")");
    }
}

}  // namespace

EvalOutput evaluate_model(ModelParams& params, const TrainConfig& cfg, const RunContext& ctx,
                          const CodeTree& tree, const Dataset& ds, bool keep_caches,
                          std::vector<PmTrace>* traces) {
    EvalOutput out;
    out.probs.reserve(ds.docs.size());
    out.gold.reserve(ds.docs.size());
    for (const auto& doc : ds.docs) {
        Tape t;
        ForwardOpts opts;
        opts.training = false;
        opts.apply_pm = true;  // inference-time PM; mode gates it inside
        PmTrace trace;
        if (traces) opts.trace = &trace;
        DocGraph g = build_doc_graph(t, params, cfg, ctx, doc.tokens, opts);
        out.probs.push_back(t.val(g.agg.probs).data);
        out.gold.push_back(gold_vector(tree, doc.labels));
        if (keep_caches) {
            out.araw.push_back(t.val(g.araw));
            out.ppr.push_back(t.val(g.ppr));
        }
        if (traces) traces->push_back(std::move(trace));
    }
    out.metrics = evaluate_all(out.probs, out.gold);
    return out;
}

TrainOutput train_model(const TrainConfig& cfg, const CodeTree& tree, const Vocab& vocab,
                        const Dataset& train, const Dataset& val, const std::string& out_dir) {
    cfg.validate();
    validate_dataset(tree, train, vocab.size());
    validate_dataset(tree, val, vocab.size());
    if (tree.num_labels() == 0) throw std::invalid_argument("train: tree has no codes");

    TrainOutput out;
    auto [n, k] = resolve_position_caps(cfg, tree);
    out.params = ModelParams::init(cfg.enc, vocab.size(), tree.num_labels(), n * k, cfg.seed);
    RunContext ctx = build_context(cfg, tree, vocab, train, out.params);

    // Phase 1: align the hierarchy encoders, then freeze Vt (the main loss
    // fine-tunes it only when finetune_vt is set).
    if (cfg.mode != Mode::NoBhpe && cfg.bpr_max_epochs > 0) {
        BprTrainConfig bcfg;
        bcfg.lr = cfg.bpr_lr;
        bcfg.max_epochs = cfg.bpr_max_epochs;
        bcfg.stop_loss = cfg.bpr_stop;
        BprTrainResult bres = train_bpr(tree, ctx.inits, ctx.vp_rows, out.params.bpr, bcfg);
        out.params.vt = bres.vt;
        out.bpr_converged = bres.converged;
        out.bpr_final_loss = bres.final_loss;
        out.bpr_epochs = bres.epochs;
    }

    // Phase 2: minibatch Adam on the multi-label BCE.
    Rng rng(cfg.seed);
    Rng rng_shuffle = rng.split("shuffle");
    Rng rng_dropout = rng.split("dropout");
    AdamState adam_state;
    AdamConfig adam;
    adam.lr = cfg.lr;

    std::vector<std::vector<std::uint8_t>> train_gold;
    train_gold.reserve(train.docs.size());
    for (const auto& doc : train.docs) train_gold.push_back(gold_vector(tree, doc.labels));

    ModelParams best = out.params;
    int stale = 0;
    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        std::vector<int> order(train.docs.size());
        std::iota(order.begin(), order.end(), 0);
        for (int i = static_cast<int>(order.size()) - 1; i > 0; --i)
            std::swap(order[i], order[rng_shuffle.uniform_int(i + 1)]);

        double epoch_loss = 0.0;
        std::size_t cursor = 0;
        while (cursor < order.size()) {
            const std::size_t batch_end =
                std::min(order.size(), cursor + static_cast<std::size_t>(cfg.batch_size));
            const double inv_batch = 1.0 / static_cast<double>(batch_end - cursor);

            std::vector<Tensor*> batch_params;
            std::vector<Tensor> batch_grads;
            for (; cursor < batch_end; ++cursor) {
                const auto& doc = train.docs[order[cursor]];
                Tape t;
                ForwardOpts opts;
                opts.training = true;
                opts.dropout = cfg.dropout;
                opts.dropout_rng = &rng_dropout;
                opts.gold = &train_gold[order[cursor]];
                opts.apply_pm = cfg.pm.train_mode;
                opts.pm_gold = cfg.pm.train_mode ? &train_gold[order[cursor]] : nullptr;
                DocGraph g = build_doc_graph(t, out.params, cfg, ctx, doc.tokens, opts);
                epoch_loss += t.val(g.loss)[0];
                t.backward(g.loss);
                if (batch_params.empty()) {
                    for (auto& [owner, node] : g.trainables) {
                        batch_params.push_back(owner);
                        batch_grads.emplace_back(owner->shape);
                    }
                }
                for (std::size_t i = 0; i < g.trainables.size(); ++i) {
                    const Tensor& gr = t.grad(g.trainables[i].second);
                    for (int j = 0; j < gr.numel(); ++j) batch_grads[i][j] += inv_batch * gr[j];
                }
            }
            std::vector<const Tensor*> grad_ptrs;
            for (const auto& g2 : batch_grads) grad_ptrs.push_back(&g2);
            adam_step(batch_params, grad_ptrs, adam_state, adam);
        }

        EpochLog row;
        row.epoch = epoch;
        row.train_loss = epoch_loss / static_cast<double>(train.docs.size());
        row.bpr_loss = out.bpr_final_loss;
        row.val = evaluate_model(out.params, cfg, ctx, tree, val).metrics;
        out.log.push_back(row);
        out.epochs_run = epoch + 1;

        if (out.best_epoch < 0 || row.val.f1_micro > out.best_val_micro_f1) {
            out.best_val_micro_f1 = row.val.f1_micro;
            out.best_epoch = epoch;
            best = out.params;
            stale = 0;
        } else if (++stale >= cfg.patience) {
            out.early_stopped = true;
            break;
        }
        if (cfg.stop_at_micro_f1 > 0.0 && out.best_val_micro_f1 >= cfg.stop_at_micro_f1) break;
    }
    out.params = best;

    if (!out_dir.empty()) {
        save_checkpoint(out_dir + "/checkpoint.bin",
                        static_cast<const ModelParams&>(out.params).entries());
        write_train_log_csv(out_dir + "/train_log.csv", out.log);
    }
    return out;
}

std::vector<std::pair<double, EvalResult>> lambda_sweep(ModelParams& params,
                                                        const TrainConfig& cfg,
                                                        const RunContext& ctx,
                                                        const CodeTree& tree, const Dataset& ds,
                                                        const std::vector<double>& lambdas) {
    // One PM-free pass collects the frozen features.
    TrainConfig base = cfg;
    base.mode = cfg.mode == Mode::Full || cfg.mode == Mode::NoPm ? Mode::NoPm : cfg.mode;
    base.pm.rounds = 0;
    EvalOutput frozen = evaluate_model(params, base, ctx, tree, ds, /*keep_caches=*/true);

    std::vector<std::pair<double, EvalResult>> rows;
    for (double lam : lambdas) {
        PmConfig pm = cfg.pm;
        pm.lambda = lam;
        ProbMatrix probs(ds.docs.size());
        for (std::size_t d = 0; d < ds.docs.size(); ++d) {
            PmScorer scorer = [&](const Tensor& p) {
                std::vector<double> logits;
                aggregate_plain(p, frozen.ppr[d], params, &logits, nullptr);
                return logits;
            };
            Tensor p = pm_apply(frozen.araw[d], scorer, ctx.pm_neighbors, nullptr, pm);
            aggregate_plain(p, frozen.ppr[d], params, nullptr, &probs[d]);
        }
        rows.emplace_back(lam, evaluate_all(probs, frozen.gold));
    }
    return rows;
}

void write_sweep_csv(const std::string& path,
                     const std::vector<std::pair<double, EvalResult>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "lambda," << eval_csv_header() << "\n";
    char buf[32];
    for (const auto& [lam, r] : rows) {
        std::snprintf(buf, sizeof(buf), "%.12g", lam);
        out << buf << "," << eval_csv_row(r) << "\n";
    }
}

std::vector<std::pair<std::string, EvalResult>> ablate(const TrainConfig& base,
                                                       const CodeTree& tree, const Vocab& vocab,
                                                       const Dataset& train, const Dataset& val,
                                                       const Dataset& test,
                                                       const std::string& out_dir) {
    std::vector<std::pair<std::string, EvalResult>> rows;
    for (Mode mode : {Mode::Full, Mode::NoPm, Mode::NoBhpe, Mode::NoPp}) {
        TrainConfig cfg = base;
        cfg.mode = mode;
        const std::string mode_dir =
            out_dir.empty() ? "" : out_dir + "/" + mode_to_string(mode);
        if (!mode_dir.empty()) std::filesystem::create_directories(mode_dir);
        TrainOutput t = train_model(cfg, tree, vocab, train, val, mode_dir);
        RunContext ctx = build_context(cfg, tree, vocab, train, t.params);
        rows.emplace_back(mode_to_string(mode),
                          evaluate_model(t.params, cfg, ctx, tree, test).metrics);
    }
    return rows;
}

void write_ablation_csv(const std::string& path,
                        const std::vector<std::pair<std::string, EvalResult>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "mode," << eval_csv_header() << "\n";
    for (const auto& [mode, r] : rows) out << mode << "," << eval_csv_row(r) << "\n";
}

void write_train_log_csv(const std::string& path, const std::vector<EpochLog>& log) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "epoch,train_loss,bpr_loss," << eval_csv_header() << "\n";
    char buf[64];
    for (const auto& row : log) {
        std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,", row.epoch, row.train_loss,
                      row.bpr_loss);
        out << buf << eval_csv_row(row.val) << "\n";
    }
}

std::vector<std::pair<std::string, double>> primitive_grad_checks(std::uint64_t seed,
                                                                  int trials) {
    Rng rng(seed);
    auto rand_t = [&](std::vector<int> shape, double lo, double hi) {
        Tensor t(std::move(shape));
        for (auto& x : t.data) x = rng.uniform(lo, hi);
        return t;
    };
    // Keep relu/clamp/max inputs away from kinks and ties.
    auto rand_away = [&](std::vector<int> shape) {
        Tensor t(std::move(shape));
        for (auto& x : t.data) {
            const double u = rng.uniform(0.1, 1.0);
            x = rng.uniform() < 0.5 ? -u : u;
        }
        return t;
    };
    // Fixed cotangent per trial so the objective is deterministic across the
    // checker's re-evaluations: loss = sum(out * C).
    auto cot = [&](std::vector<int> shape) { return rand_t(std::move(shape), -1.0, 1.0); };
    auto scalarize = [](Tape& t, int out, const Tensor& c) {
        return t.sum_all(t.mul(out, t.constant(c)));
    };

    struct Case {
        std::string name;
        std::function<double()> run;
    };
    std::vector<Case> cases;
    auto add = [&](const std::string& name, std::function<double()> run) {
        cases.push_back({name, std::move(run)});
    };

    add("matmul", [&] {
        Tensor c = cot({3, 2});
        return grad_check(
            [&, c](Tape& t, const std::vector<int>& p) {
                return scalarize(t, t.matmul(p[0], p[1]), c);
            },
            {rand_t({3, 4}, -1, 1), rand_t({4, 2}, -1, 1)});
    });
    add("add", [&] {
        Tensor c = cot({3, 4});
        return grad_check(
            [&, c](Tape& t, const std::vector<int>& p) {
                return scalarize(t, t.add(p[0], p[1]), c);
            },
            {rand_t({3, 4}, -1, 1), rand_t({3, 4}, -1, 1)});
    });
    add("mul", [&] {
        Tensor c = cot({3, 4});
        return grad_check(
            [&, c](Tape& t, const std::vector<int>& p) {
                return scalarize(t, t.mul(p[0], p[1]), c);
            },
            {rand_t({3, 4}, -1, 1), rand_t({3, 4}, -1, 1)});
    });
    add("scale", [&] {
        Tensor c = cot({3, 4});
        return grad_check(
            [&, c](Tape& t, const std::vector<int>& p) {
                return scalarize(t, t.scale(p[0], -1.7), c);
            },
            {rand_t({3, 4}, -1, 1)});
    });
    add("add_scalar", [&] {
        Tensor c = cot({3, 4});
        return grad_check(
            [&, c](Tape& t, const std::vector<int>& p) {
                return scalarize(t, t.add_scalar(p[0], 0.35), c);
            },
            {rand_t({3, 4}, -1, 1)});
    });
    add("log", [&] {
        Tensor c = cot({3, 4});
        return grad_check(
            [&, c](Tape& t, const std::vector<int>& p) {
                return scalarize(t, t.log(p[0]), c);
            },
            {rand_t({3, 4}, 0.2, 2.0)});
    });
    add("relu", [&] {
        Tensor c = cot({3, 4});
        return grad_check(
            [&, c](Tape& t, const std::vector<int>& p) {
                return scalarize(t, t.relu(p[0]), c);
            },
            {rand_away({3, 4})});
    });
    add("tanh", [&] {
        Tensor c = cot({3, 4});
        return grad_check(
            [&, c](Tape& t, const std::vector<int>& p) {
                return scalarize(t, t.tanh(p[0]), c);
            },
            {rand_t({3, 4}, -2, 2)});
    });
    add("sigmoid", [&] {
        Tensor c = cot({3, 4});
        return grad_check(
            [&, c](Tape& t, const std::vector<int>& p) {
                return scalarize(t, t.sigmoid(p[0]), c);
            },
            {rand_t({3, 4}, -2, 2)});
    });
    add("softmax_rows", [&] {
        Tensor c = cot({3, 5});
        return grad_check(
            [&, c](Tape& t, const std::vector<int>& p) {
                return scalarize(t, t.softmax_rows(p[0]), c);
            },
            {rand_t({3, 5}, -2, 2)});
    });
    add("transpose", [&] {
        Tensor c = cot({4, 3});
        return grad_check(
            [&, c](Tape& t, const std::vector<int>& p) {
                return scalarize(t, t.transpose(p[0]), c);
            },
            {rand_t({3, 4}, -1, 1)});
    });
    add("concat_rows", [&] {
        Tensor c = cot({6, 3});
        return grad_check(
            [&, c](Tape& t, const std::vector<int>& p) {
                return scalarize(t, t.concat({p[0], p[1]}, 0), c);
            },
            {rand_t({2, 3}, -1, 1), rand_t({4, 3}, -1, 1)});
    });
    add("concat_cols", [&] {
        Tensor c = cot({3, 6});
        return grad_check(
            [&, c](Tape& t, const std::vector<int>& p) {
                return scalarize(t, t.concat({p[0], p[1]}, 1), c);
            },
            {rand_t({3, 2}, -1, 1), rand_t({3, 4}, -1, 1)});
    });
    add("slice_rows", [&] {
        Tensor c = cot({2, 3});
        return grad_check(
            [&, c](Tape& t, const std::vector<int>& p) {
                return scalarize(t, t.slice(p[0], 0, 1, 2), c);
            },
            {rand_t({4, 3}, -1, 1)});
    });
    add("slice_cols", [&] {
        Tensor c = cot({3, 3});
        return grad_check(
            [&, c](Tape& t, const std::vector<int>& p) {
                return scalarize(t, t.slice(p[0], 1, 1, 3), c);
            },
            {rand_t({3, 5}, -1, 1)});
    });
    add("conv1d", [&] {
        Tensor c = cot({5, 2});
        return grad_check(
            [&, c](Tape& t, const std::vector<int>& p) {
                return scalarize(t, t.conv1d(p[0], p[1], p[2], 3), c);
            },
            {rand_t({7, 4}, -1, 1), rand_t({2, 12}, -1, 1), rand_t({2}, -1, 1)});
    });
    add("max_over_rows", [&] {
        Tensor c = cot({3});
        return grad_check(
            [&, c](Tape& t, const std::vector<int>& p) {
                return scalarize(t, t.max_over_axis(p[0], 0), c);
            },
            {rand_t({4, 3}, -1, 1)});
    });
    add("max_over_cols", [&] {
        Tensor c = cot({4});
        return grad_check(
            [&, c](Tape& t, const std::vector<int>& p) {
                return scalarize(t, t.max_over_axis(p[0], 1), c);
            },
            {rand_t({4, 3}, -1, 1)});
    });
    add("mean_all", [&] {
        return grad_check(
            [](Tape& t, const std::vector<int>& p) {
                int m = t.mean_all(p[0]);
                return t.mul(m, m);
            },
            {rand_t({3, 4}, -1, 1)});
    });
    add("sum_all", [&] {
        return grad_check(
            [](Tape& t, const std::vector<int>& p) {
                int s = t.sum_all(p[0]);
                return t.mul(s, s);
            },
            {rand_t({3, 4}, -1, 1)});
    });
    add("bias_add_rows", [&] {
        Tensor c = cot({3, 4});
        return grad_check(
            [&, c](Tape& t, const std::vector<int>& p) {
                return scalarize(t, t.bias_add_rows(p[0], p[1]), c);
            },
            {rand_t({3, 4}, -1, 1), rand_t({4}, -1, 1)});
    });
    add("embed_rows", [&] {
        Tensor c = cot({4, 3});
        return grad_check(
            [&, c](Tape& t, const std::vector<int>& p) {
                return scalarize(t, t.embed_rows(p[0], {2, 0, -1, 2}), c);
            },
            {rand_t({4, 3}, -1, 1)});
    });
    add("rows_blend", [&] {
        Tensor c = cot({4, 3});
        return grad_check(
            [&, c](Tape& t, const std::vector<int>& p) {
                return scalarize(t, t.rows_blend(p[0], 1, {0, 3}, 0.3), c);
            },
            {rand_t({4, 3}, -1, 1)});
    });
    add("clamp", [&] {
        Tensor c = cot({3, 4});
        return grad_check(
            [&, c](Tape& t, const std::vector<int>& p) {
                return scalarize(t, t.clamp(p[0], -0.8, 0.8), c);
            },
            {rand_away({3, 4})});
    });
    add("dropout_mask_mul", [&] {
        Rng mask_rng = rng.split("mask");
        Tensor mask = dropout_mask({3, 4}, 0.2, mask_rng);
        Tensor c = cot({3, 4});
        return grad_check(
            [&, mask, c](Tape& t, const std::vector<int>& p) {
                return scalarize(t, t.mul(p[0], t.constant(mask)), c);
            },
            {rand_t({3, 4}, -1, 1)});
    });

    std::vector<std::pair<std::string, double>> results;
    for (auto& c : cases) {
        double worst = 0.0;
        for (int i = 0; i < trials; ++i) worst = std::max(worst, c.run());
        results.emplace_back(c.name, worst);
    }
    return results;
}

namespace {

struct ToyInstance {
    CodeTree tree;
    Vocab vocab;
    Dataset train;
    TrainConfig cfg;
    ModelParams params;
    RunContext ctx;
    std::vector<std::uint8_t> gold;
    std::vector<int> tokens;
};

// L=6 labels, N=16 tokens, d_e=8, all branches active (PM in the loss graph
// at lambda 0.3, PPR on, hierarchy representations trainable).
ToyInstance make_toy(std::uint64_t seed) {
    ToyInstance toy;
    std::vector<std::pair<std::string, std::string>> codes = {
        {"100", "w0 w1"},   {"100.0", "w2 w3"}, {"100.1", "w4 w5"},
        {"101", "w6 w7"},   {"101.0", "w8 w9"}, {"101.1", "w10 w11"},
    };
    toy.tree = CodeTree::build(codes);
    std::vector<std::string> words;
    for (int i = 0; i < 20; ++i) words.push_back("w" + std::to_string(i));
    toy.vocab = Vocab::from_words(words);

    toy.cfg.seed = seed;
    toy.cfg.enc.d_e = 8;
    toy.cfg.enc.d_c = 4;
    toy.cfg.enc.filter_sizes = {1, 3};
    toy.cfg.enc.max_len = 16;
    toy.cfg.dropout = 0.0;
    toy.cfg.mode = Mode::Full;
    toy.cfg.pm.lambda = 0.3;
    toy.cfg.pm.rounds = 2;
    toy.cfg.pm.tau = 0.3;
    toy.cfg.pm.train_mode = true;
    toy.cfg.finetune_vt = true;
    toy.cfg.pos_trainable = true;

    LabeledDoc d1;
    d1.doc_id = 0;
    d1.tokens = {2, 3, 8, 9, 1, 14, 2, 9, 17, 5, 3, 8};
    d1.labels = {"100.0", "101.0"};
    LabeledDoc d2;
    d2.doc_id = 1;
    d2.tokens = {4, 5, 10, 11, 0, 15};
    d2.labels = {"100.1", "101.1"};
    LabeledDoc d3;
    d3.doc_id = 2;
    d3.tokens = {2, 3, 4, 5, 16};
    d3.labels = {"100.0", "100.1"};
    toy.train.docs = {d1, d2, d3};

    auto [n, k] = resolve_position_caps(toy.cfg, toy.tree);
    toy.params = ModelParams::init(toy.cfg.enc, toy.vocab.size(), toy.tree.num_labels(), n * k,
                                   seed);
    Rng vt_rng(seed ^ 0x5eedull);
    toy.params.vt = Tensor::randn({toy.tree.num_labels(), toy.cfg.enc.d_e}, vt_rng, 0.3);
    // Generic point for the check: zero conv biases put the padded windows
    // exactly at the relu kink, where central differences disagree with the
    // subgradient by construction.
    for (auto& b : toy.params.conv_b) b = Tensor::randn(b.shape, vt_rng, 0.1);
    toy.params.b_a = Tensor::randn(toy.params.b_a.shape, vt_rng, 0.1);
    toy.params.score_b = Tensor::randn(toy.params.score_b.shape, vt_rng, 0.1);
    toy.ctx = build_context(toy.cfg, toy.tree, toy.vocab, toy.train, toy.params);
    toy.gold = gold_vector(toy.tree, d1.labels);
    toy.tokens = d1.tokens;
    return toy;
}

}  // namespace

double full_model_grad_check(std::uint64_t seed) {
    ToyInstance toy = make_toy(seed);
    const double eps = 1e-5;

    auto loss_of = [&](ModelParams& params) {
        Tape t;
        ForwardOpts opts;
        opts.training = true;  // registers trainables; dropout stays off
        opts.gold = &toy.gold;
        opts.apply_pm = true;
        DocGraph g = build_doc_graph(t, params, toy.cfg, toy.ctx, toy.tokens, opts);
        return std::pair<double, DocGraph>(t.val(g.loss)[0], std::move(g));
    };

    Tape t;
    ForwardOpts opts;
    opts.training = true;
    opts.gold = &toy.gold;
    opts.apply_pm = true;
    DocGraph g = build_doc_graph(t, toy.params, toy.cfg, toy.ctx, toy.tokens, opts);
    t.backward(g.loss);

    double max_rel = 0.0;
    for (auto& [owner, node] : g.trainables) {
        for (int i = 0; i < owner->numel(); ++i) {
            const double orig = (*owner)[i];
            (*owner)[i] = orig + eps;
            const double fp = loss_of(toy.params).first;
            (*owner)[i] = orig - eps;
            const double fm = loss_of(toy.params).first;
            (*owner)[i] = orig;
            const double numeric = (fp - fm) / (2.0 * eps);
            const double analytic = t.grad(node)[i];
            const double rel = std::abs(analytic - numeric) /
                               std::max({1.0, std::abs(analytic), std::abs(numeric)});
            max_rel = std::max(max_rel, rel);
        }
    }
    return max_rel;
}

void write_predictions_jsonl(const std::string& path, const CodeTree& tree, const Dataset& ds,
                             const ProbMatrix& probs, int top_k) {
    if (ds.docs.size() != probs.size())
        throw std::invalid_argument("predictions: doc/prob count mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (std::size_t d = 0; d < ds.docs.size(); ++d) {
        const auto top = top_k_indices(probs[d], top_k);
        nlohmann::json preds = nlohmann::json::array();
        for (std::size_t r = 0; r < top.size(); ++r) {
            nlohmann::json e;
            e["code"] = tree.labels()[top[r]];
            e["prob"] = probs[d][top[r]];
            e["rank"] = r + 1;
            preds.push_back(std::move(e));
        }
        nlohmann::json j;
        j["doc_id"] = ds.docs[d].doc_id;
        j["predictions"] = std::move(preds);
        out << j.dump() << "\n";
    }
}

}  // namespace hienet
