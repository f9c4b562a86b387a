#include "hienet/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hienet/code_tree.hpp"
#include "hienet/config.hpp"
#include "hienet/cooc_graph.hpp"
#include "hienet/manifest.hpp"
#include "hienet/metrics.hpp"
#include "hienet/model.hpp"
#include "hienet/synth_data.hpp"
#include "hienet/trainer.hpp"
#include "hienet/tree_position.hpp"

namespace hienet {

namespace {

namespace fs = std::filesystem;

std::uint64_t env_default_seed(std::uint64_t builtin) {
    const char* env = std::getenv("HIENET_SEED");
    return env ? std::strtoull(env, nullptr, 10) : builtin;
}

struct DataDir {
    CodeTree tree;
    Vocab vocab;
    std::string codes_path, vocab_path;
};

DataDir load_data_dir(const std::string& dir) {
    DataDir d;
    d.codes_path = dir + "/codes.tsv";
    d.vocab_path = dir + "/vocab.txt";
    d.tree = CodeTree::build(read_codes_tsv(d.codes_path));
    d.vocab = read_vocab(d.vocab_path);
    return d;
}

std::string split_path(const std::string& dir, const std::string& split) {
    if (split != "train" && split != "val" && split != "test")
        throw std::runtime_error("unknown split '" + split + "' (train|val|test)");
    return dir + "/" + split + ".jsonl";
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream is(s);
    std::string cell;
    while (std::getline(is, cell, ',')) out.push_back(std::stod(cell));
    if (out.empty()) throw std::runtime_error("empty value list");
    return out;
}

int cmd_gen_data(const std::string& config_path, std::uint64_t seed_override, bool seed_given,
                 const std::string& out_dir) {
    GenConfig cfg = config_path.empty() ? GenConfig{} : parse_gen_config(config_path);
    if (seed_given) cfg.seed = seed_override;
    else if (config_path.empty()) cfg.seed = env_default_seed(cfg.seed);
    fs::create_directories(out_dir);
    SynthCorpus corpus = generate(cfg);

    write_codes_tsv(out_dir + "/codes.tsv", corpus.code_list);
    write_vocab(out_dir + "/vocab.txt", corpus.vocab);
    write_jsonl(out_dir + "/train.jsonl", corpus.train);
    write_jsonl(out_dir + "/val.jsonl", corpus.val);
    write_jsonl(out_dir + "/test.jsonl", corpus.test);
    std::ofstream planted(out_dir + "/planted.json");
    planted << planted_to_json(corpus.planted) << "\n";
    planted.close();
    write_gen_config(out_dir + "/gen.cfg", cfg);

    RunManifest m;
    m.command = "gen-data";
    m.seed = cfg.seed;
    if (!config_path.empty()) add_input(m, config_path);
    for (const char* f : {"codes.tsv", "vocab.txt", "train.jsonl", "val.jsonl", "test.jsonl",
                          "planted.json", "gen.cfg"})
        m.outputs.push_back(out_dir + "/" + f);
    write_manifest(out_dir + "/manifest.json", m);
    std::printf("generated %d codes, %zu/%zu/%zu docs -> %s\n", corpus.tree.num_labels(),
                corpus.train.docs.size(), corpus.val.docs.size(), corpus.test.docs.size(),
                out_dir.c_str());
    return 0;
}

int cmd_build_tree(const std::string& codes_path, const std::string& out_path) {
    CodeTree tree = CodeTree::build(read_codes_tsv(codes_path));
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << tree.to_json() << "\n";
    out.close();

    RunManifest m;
    m.command = "build-tree";
    add_input(m, codes_path);
    m.outputs.push_back(out_path);
    write_manifest(out_path + ".manifest.json", m);
    std::printf("tree: %d codes, max branching %d, max depth %d -> %s\n", tree.num_labels(),
                tree.max_branching(), tree.max_depth(), out_path.c_str());
    return 0;
}

int cmd_encode_positions(const std::string& tree_path, int n, int k,
                         const std::string& out_path) {
    std::ifstream in(tree_path);
    if (!in) throw std::runtime_error("cannot open " + tree_path);
    std::stringstream ss;
    ss << in.rdbuf();
    CodeTree tree = CodeTree::from_json(ss.str());
    if (n == 0) n = std::max(1, tree.max_branching());
    if (k == 0) k = std::max(1, tree.max_depth());
    write_positions_csv(out_path, tree, n, k);

    RunManifest m;
    m.command = "encode-positions";
    m.config = {{"n", std::to_string(n)}, {"k", std::to_string(k)}};
    add_input(m, tree_path);
    m.outputs.push_back(out_path);
    write_manifest(out_path + ".manifest.json", m);
    std::printf("positions: %d codes at n=%d k=%d -> %s\n", tree.num_labels(), n, k,
                out_path.c_str());
    return 0;
}

int cmd_build_graph(const std::string& dataset_path, const std::string& codes_path,
                    bool counts, const std::string& out_path) {
    CodeTree tree = CodeTree::build(read_codes_tsv(codes_path));
    Dataset ds = read_jsonl(dataset_path);
    std::vector<std::set<int>> sets;
    for (const auto& doc : ds.docs) {
        std::set<int> s;
        for (const auto& l : doc.labels) s.insert(tree.label_index(l));
        sets.push_back(std::move(s));
    }
    CoocGraph g = CoocGraph::build(tree.num_labels(), sets, !counts);
    g.write_edges_csv(out_path);

    RunManifest m;
    m.command = "build-graph";
    m.config = {{"binarize", counts ? "false" : "true"}};
    add_input(m, dataset_path);
    add_input(m, codes_path);
    m.outputs.push_back(out_path);
    write_manifest(out_path + ".manifest.json", m);

    int edges = 0;
    for (int i = 0; i < g.num_labels(); ++i)
        for (int j = i + 1; j < g.num_labels(); ++j)
            if (g.adjacency().at(i, j) > 0) ++edges;
    std::printf("graph: %d labels, %d edges -> %s\n", g.num_labels(), edges, out_path.c_str());
    return 0;
}

int cmd_ppr(const std::string& edges_path, double d, const std::string& in_path,
            const std::string& out_path, bool iterate, int max_iters, double tol) {
    CoocGraph g = CoocGraph::read_edges_csv(edges_path);
    Tensor x = read_matrix_csv(in_path);
    PprConfig cfg;
    cfg.d = d;
    cfg.max_iters = max_iters;
    cfg.tol = tol;
    Tensor z;
    if (iterate) {
        PprResult res = ppr_iterate(g, cfg, x);
        if (!res.converged)
            std::fprintf(stderr,
                         "warning: iteration hit max_iters=%d with residual %.3g\n",
                         res.iters, res.residual);
        z = res.Z;
    } else {
        z = ppr_closed_form(g, cfg, x);
    }
    write_matrix_csv(out_path, z);

    RunManifest m;
    m.command = "ppr";
    m.config = {{"d", std::to_string(d)},
                {"mode", iterate ? "iterate" : "closed"},
                {"max_iters", std::to_string(max_iters)},
                {"tol", std::to_string(tol)}};
    add_input(m, edges_path);
    add_input(m, in_path);
    m.outputs.push_back(out_path);
    write_manifest(out_path + ".manifest.json", m);
    std::printf("ppr: propagated %dx%d -> %s\n", z.rows(), z.cols(), out_path.c_str());
    return 0;
}

TrainConfig load_train_config(const std::string& config_path, std::uint64_t seed_override,
                              bool seed_given) {
    TrainConfig cfg =
        config_path.empty() ? TrainConfig{} : parse_train_config(config_path);
    if (seed_given) cfg.seed = seed_override;
    else if (config_path.empty()) cfg.seed = env_default_seed(cfg.seed);
    cfg.validate();
    return cfg;
}

int cmd_train(const std::string& config_path, std::uint64_t seed_override, bool seed_given,
              const std::string& data_dir, const std::string& out_dir) {
    TrainConfig cfg = load_train_config(config_path, seed_override, seed_given);
    DataDir d = load_data_dir(data_dir);
    Dataset train = read_jsonl(split_path(data_dir, "train"));
    Dataset val = read_jsonl(split_path(data_dir, "val"));
    fs::create_directories(out_dir);

    TrainOutput out = train_model(cfg, d.tree, d.vocab, train, val, out_dir);
    write_train_config(out_dir + "/train.cfg", cfg);

    RunManifest m;
    m.command = "train";
    m.seed = cfg.seed;
    m.config = config_items(cfg);
    if (!config_path.empty()) add_input(m, config_path);
    add_input(m, d.codes_path);
    add_input(m, d.vocab_path);
    add_input(m, split_path(data_dir, "train"));
    add_input(m, split_path(data_dir, "val"));
    m.outputs = {out_dir + "/checkpoint.bin", out_dir + "/train_log.csv",
                 out_dir + "/train.cfg"};
    write_manifest(out_dir + "/manifest.json", m);
    std::printf("train: %d epochs (best %d, val micro-F1 %.4f)%s -> %s\n", out.epochs_run,
                out.best_epoch, out.best_val_micro_f1,
                out.early_stopped ? " [early stop]" : "", out_dir.c_str());
    return 0;
}

struct LoadedModel {
    DataDir data;
    Dataset train;
    TrainConfig cfg;
    ModelParams params;
    RunContext ctx;
};

LoadedModel load_model(const std::string& config_path, const std::string& ckpt_path,
                       const std::string& data_dir) {
    LoadedModel lm;
    lm.cfg = load_train_config(config_path, 0, false);
    lm.data = load_data_dir(data_dir);
    lm.train = read_jsonl(split_path(data_dir, "train"));
    auto [n, k] = resolve_position_caps(lm.cfg, lm.data.tree);
    lm.params = ModelParams::init(lm.cfg.enc, lm.data.vocab.size(),
                                  lm.data.tree.num_labels(), n * k, lm.cfg.seed);
    load_params(ckpt_path, lm.params);
    lm.ctx = build_context(lm.cfg, lm.data.tree, lm.data.vocab, lm.train, lm.params);
    return lm;
}

int cmd_evaluate(const std::string& config_path, const std::string& ckpt_path,
                 const std::string& data_dir, const std::string& split, double lambda_override,
                 bool lambda_given, const std::string& mode_override,
                 const std::string& out_path) {
    LoadedModel lm = load_model(config_path, ckpt_path, data_dir);
    if (lambda_given) lm.cfg.pm.lambda = lambda_override;
    if (!mode_override.empty()) lm.cfg.mode = mode_from_string(mode_override);
    Dataset ds = read_jsonl(split_path(data_dir, split));
    EvalOutput out = evaluate_model(lm.params, lm.cfg, lm.ctx, lm.data.tree, ds);
    write_eval_csv(out_path, out.metrics);

    RunManifest m;
    m.command = "evaluate";
    m.seed = lm.cfg.seed;
    m.config = config_items(lm.cfg);
    m.config.emplace_back("split", split);
    if (!config_path.empty()) add_input(m, config_path);
    add_input(m, ckpt_path);
    add_input(m, split_path(data_dir, split));
    m.outputs.push_back(out_path);
    write_manifest(out_path + ".manifest.json", m);
    std::printf("evaluate[%s]: micro-F1 %.4f macro-F1 %.4f jaccard@20 %.4f -> %s\n",
                split.c_str(), out.metrics.f1_micro, out.metrics.f1_macro,
                out.metrics.jaccard_top20, out_path.c_str());
    if (out.metrics.jaccard_skipped > 0)
        std::fprintf(stderr, "note: %d docs with empty gold skipped in Jaccard\n",
                     out.metrics.jaccard_skipped);
    return 0;
}

int cmd_predict(const std::string& config_path, const std::string& ckpt_path,
                const std::string& data_dir, const std::string& split, int top_k,
                const std::string& out_path, const std::string& trace_path, bool trace_gold) {
    LoadedModel lm = load_model(config_path, ckpt_path, data_dir);
    Dataset ds = read_jsonl(split_path(data_dir, split));

    std::vector<PmTrace> traces;
    ProbMatrix probs;
    if (!trace_path.empty() && trace_gold) {
        // diagnostic pass: gold-aware PM termination, trace recorded
        probs.reserve(ds.docs.size());
        for (const auto& doc : ds.docs) {
            Tape t;
            ForwardOpts opts;
            opts.apply_pm = true;
            std::vector<std::uint8_t> gold = gold_vector(lm.data.tree, doc.labels);
            opts.pm_gold = &gold;
            PmTrace trace;
            opts.trace = &trace;
            DocGraph g = build_doc_graph(t, lm.params, lm.cfg, lm.ctx, doc.tokens, opts);
            probs.push_back(t.val(g.agg.probs).data);
            traces.push_back(std::move(trace));
        }
    } else {
        EvalOutput out = evaluate_model(lm.params, lm.cfg, lm.ctx, lm.data.tree, ds, false,
                                        trace_path.empty() ? nullptr : &traces);
        probs = std::move(out.probs);
    }
    write_predictions_jsonl(out_path, lm.data.tree, ds, probs, top_k);
    if (!trace_path.empty()) {
        std::ofstream tout(trace_path);
        if (!tout) throw std::runtime_error("cannot write " + trace_path);
        for (std::size_t i = 0; i < traces.size(); ++i) {
            nlohmann::json j;
            j["doc_id"] = ds.docs[i].doc_id;
            j["trace"] = nlohmann::json::parse(trace_to_json(traces[i], lm.data.tree.labels()));
            tout << j.dump() << "\n";
        }
    }

    RunManifest m;
    m.command = "predict";
    m.seed = lm.cfg.seed;
    m.config = config_items(lm.cfg);
    m.config.emplace_back("split", split);
    m.config.emplace_back("top_k", std::to_string(top_k));
    if (!config_path.empty()) add_input(m, config_path);
    add_input(m, ckpt_path);
    add_input(m, split_path(data_dir, split));
    m.outputs.push_back(out_path);
    if (!trace_path.empty()) m.outputs.push_back(trace_path);
    write_manifest(out_path + ".manifest.json", m);
    std::printf("predict[%s]: %zu docs -> %s\n", split.c_str(), ds.docs.size(),
                out_path.c_str());
    return 0;
}

int cmd_ablate(const std::string& config_path, std::uint64_t seed_override, bool seed_given,
               const std::string& data_dir, const std::string& out_dir) {
    TrainConfig cfg = load_train_config(config_path, seed_override, seed_given);
    DataDir d = load_data_dir(data_dir);
    Dataset train = read_jsonl(split_path(data_dir, "train"));
    Dataset val = read_jsonl(split_path(data_dir, "val"));
    Dataset test = read_jsonl(split_path(data_dir, "test"));
    fs::create_directories(out_dir);

    auto rows = ablate(cfg, d.tree, d.vocab, train, val, test, out_dir);
    write_ablation_csv(out_dir + "/ablation.csv", rows);

    RunManifest m;
    m.command = "ablate";
    m.seed = cfg.seed;
    m.config = config_items(cfg);
    if (!config_path.empty()) add_input(m, config_path);
    add_input(m, d.codes_path);
    add_input(m, split_path(data_dir, "train"));
    m.outputs.push_back(out_dir + "/ablation.csv");
    write_manifest(out_dir + "/manifest.json", m);
    for (const auto& [mode, r] : rows)
        std::printf("ablate %-8s macro-F1 %.4f micro-F1 %.4f jaccard@20 %.4f\n", mode.c_str(),
                    r.f1_macro, r.f1_micro, r.jaccard_top20);
    return 0;
}

int cmd_lambda_sweep(const std::string& config_path, const std::string& ckpt_path,
                     const std::string& data_dir, const std::string& split,
                     const std::string& values, const std::string& out_path) {
    LoadedModel lm = load_model(config_path, ckpt_path, data_dir);
    Dataset ds = read_jsonl(split_path(data_dir, split));
    std::vector<double> lambdas =
        values.empty()
            ? std::vector<double>{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}
            : parse_double_list(values);
    auto rows = lambda_sweep(lm.params, lm.cfg, lm.ctx, lm.data.tree, ds, lambdas);
    write_sweep_csv(out_path, rows);

    RunManifest m;
    m.command = "lambda-sweep";
    m.seed = lm.cfg.seed;
    m.config = config_items(lm.cfg);
    m.config.emplace_back("split", split);
    if (!config_path.empty()) add_input(m, config_path);
    add_input(m, ckpt_path);
    add_input(m, split_path(data_dir, split));
    m.outputs.push_back(out_path);
    write_manifest(out_path + ".manifest.json", m);
    std::printf("lambda-sweep[%s]: %zu values -> %s\n", split.c_str(), rows.size(),
                out_path.c_str());
    return 0;
}

int cmd_grad_check(std::uint64_t seed, int trials) {
    auto prims = primitive_grad_checks(seed, trials);
    bool ok = true;
    for (const auto& [name, err] : prims) {
        const bool pass = err <= 1e-6;
        ok = ok && pass;
        std::printf("primitive %-18s max rel err %.3e  %s\n", name.c_str(), err,
                    pass ? "ok" : "FAIL");
    }
    const double full = full_model_grad_check(seed);
    const bool full_ok = full <= 1e-4;
    ok = ok && full_ok;
    std::printf("full model loss        max rel err %.3e  %s\n", full, full_ok ? "ok" : "FAIL");
    return ok ? 0 : 1;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"hienet: hierarchical multi-label code prediction"};
    app.require_subcommand(1);

    // gen-data
    std::string gd_config, gd_out;
    std::uint64_t gd_seed = 0;
    auto* gen = app.add_subcommand("gen-data", "generate a synthetic corpus");
    gen->add_option("--config", gd_config, "generator key=value config");
    auto* gd_seed_opt = gen->add_option("--seed", gd_seed, "seed override");
    gen->add_option("--out", gd_out, "output directory")->required();

    // build-tree
    std::string bt_codes, bt_out;
    auto* bt = app.add_subcommand("build-tree", "parse a code list into a taxonomy");
    bt->add_option("--codes", bt_codes, "code TSV (code<TAB>description)")->required();
    bt->add_option("--out", bt_out, "tree JSON output")->required();

    // encode-positions
    std::string ep_tree, ep_out;
    int ep_n = 0, ep_k = 0;
    auto* ep = app.add_subcommand("encode-positions", "emit raw tree positions as CSV");
    ep->add_option("--tree", ep_tree, "tree JSON")->required();
    ep->add_option("--n", ep_n, "branching capacity (0 = derive)");
    ep->add_option("--k", ep_k, "depth capacity (0 = derive)");
    ep->add_option("--out", ep_out, "CSV output")->required();

    // build-graph
    std::string bg_dataset, bg_codes, bg_out;
    bool bg_counts = false;
    auto* bg = app.add_subcommand("build-graph", "build the label co-occurrence graph");
    bg->add_option("--dataset", bg_dataset, "JSONL dataset")->required();
    bg->add_option("--codes", bg_codes, "code TSV defining the label order")->required();
    bg->add_flag("--counts", bg_counts, "keep pair counts instead of binarizing");
    bg->add_option("--out", bg_out, "edge CSV output")->required();

    // ppr
    std::string ppr_edges, ppr_in, ppr_out;
    double ppr_d = 0.5, ppr_tol = 1e-10;
    int ppr_iters = 50;
    bool ppr_it = false;
    auto* pr = app.add_subcommand("ppr", "propagate a feature matrix over the graph");
    pr->add_option("--edges", ppr_edges, "edge CSV")->required();
    pr->add_option("--d", ppr_d, "teleport probability");
    pr->add_option("--in", ppr_in, "input matrix CSV")->required();
    pr->add_option("--out", ppr_out, "output matrix CSV")->required();
    pr->add_flag("--iterate", ppr_it, "use the fixed-point iteration");
    pr->add_option("--max-iters", ppr_iters, "iteration cap");
    pr->add_option("--tol", ppr_tol, "max-abs residual tolerance");

    // train
    std::string tr_config, tr_data, tr_out;
    std::uint64_t tr_seed = 0;
    auto* tr = app.add_subcommand("train", "train end to end");
    tr->add_option("--config", tr_config, "training key=value config");
    auto* tr_seed_opt = tr->add_option("--seed", tr_seed, "seed override");
    tr->add_option("--data-dir", tr_data, "directory with codes/vocab/splits")->required();
    tr->add_option("--out-dir", tr_out, "output directory")->required();

    // evaluate
    std::string ev_config, ev_ckpt, ev_data, ev_split = "test", ev_mode, ev_out;
    double ev_lambda = 0.0;
    auto* ev = app.add_subcommand("evaluate", "evaluate a checkpoint");
    ev->add_option("--config", ev_config, "training config used for the checkpoint");
    ev->add_option("--checkpoint", ev_ckpt, "checkpoint file")->required();
    ev->add_option("--data-dir", ev_data, "data directory")->required();
    ev->add_option("--split", ev_split, "train|val|test");
    auto* ev_lambda_opt = ev->add_option("--lambda", ev_lambda, "PM blend override");
    ev->add_option("--mode", ev_mode, "mode override (full|no_pm|no_bhpe|no_pp)");
    ev->add_option("--out", ev_out, "metrics CSV output")->required();

    // predict
    std::string pd_config, pd_ckpt, pd_data, pd_split = "test", pd_out, pd_trace;
    int pd_topk = 30;
    bool pd_trace_gold = false;
    auto* pd = app.add_subcommand("predict", "write ranked predictions");
    pd->add_option("--config", pd_config, "training config used for the checkpoint");
    pd->add_option("--checkpoint", pd_ckpt, "checkpoint file")->required();
    pd->add_option("--data-dir", pd_data, "data directory")->required();
    pd->add_option("--split", pd_split, "train|val|test");
    pd->add_option("--top-k", pd_topk, "predictions per document");
    pd->add_option("--trace", pd_trace, "progressive-mechanism trace JSONL output");
    pd->add_flag("--trace-gold", pd_trace_gold, "gold-aware PM termination in the trace");
    pd->add_option("--out", pd_out, "predictions JSONL output")->required();

    // ablate
    std::string ab_config, ab_data, ab_out;
    std::uint64_t ab_seed = 0;
    auto* ab = app.add_subcommand("ablate", "train and evaluate all component ablations");
    ab->add_option("--config", ab_config, "training config");
    auto* ab_seed_opt = ab->add_option("--seed", ab_seed, "seed override");
    ab->add_option("--data-dir", ab_data, "data directory")->required();
    ab->add_option("--out-dir", ab_out, "output directory")->required();

    // lambda-sweep
    std::string ls_config, ls_ckpt, ls_data, ls_split = "test", ls_values, ls_out;
    auto* ls = app.add_subcommand("lambda-sweep", "metrics at each PM blend factor");
    ls->add_option("--config", ls_config, "training config used for the checkpoint");
    ls->add_option("--checkpoint", ls_ckpt, "checkpoint file")->required();
    ls->add_option("--data-dir", ls_data, "data directory")->required();
    ls->add_option("--split", ls_split, "train|val|test");
    ls->add_option("--values", ls_values, "comma list (default 0,0.1,...,1.0)");
    ls->add_option("--out", ls_out, "sweep CSV output")->required();

    // grad-check
    std::uint64_t gc_seed = 0;
    bool gc_seed_given = false;
    int gc_trials = 20;
    auto* gc = app.add_subcommand("grad-check", "finite-difference gradient diagnostics");
    auto* gc_seed_opt = gc->add_option("--seed", gc_seed, "seed");
    gc->add_option("--trials", gc_trials, "random trials per primitive");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed())
            return cmd_gen_data(gd_config, gd_seed, gd_seed_opt->count() > 0, gd_out);
        if (bt->parsed()) return cmd_build_tree(bt_codes, bt_out);
        if (ep->parsed()) return cmd_encode_positions(ep_tree, ep_n, ep_k, ep_out);
        if (bg->parsed()) return cmd_build_graph(bg_dataset, bg_codes, bg_counts, bg_out);
        if (pr->parsed())
            return cmd_ppr(ppr_edges, ppr_d, ppr_in, ppr_out, ppr_it, ppr_iters, ppr_tol);
        if (tr->parsed())
            return cmd_train(tr_config, tr_seed, tr_seed_opt->count() > 0, tr_data, tr_out);
        if (ev->parsed())
            return cmd_evaluate(ev_config, ev_ckpt, ev_data, ev_split, ev_lambda,
                                ev_lambda_opt->count() > 0, ev_mode, ev_out);
        if (pd->parsed())
            return cmd_predict(pd_config, pd_ckpt, pd_data, pd_split, pd_topk, pd_out, pd_trace,
                               pd_trace_gold);
        if (ab->parsed())
            return cmd_ablate(ab_config, ab_seed, ab_seed_opt->count() > 0, ab_data, ab_out);
        if (ls->parsed())
            return cmd_lambda_sweep(ls_config, ls_ckpt, ls_data, ls_split, ls_values, ls_out);
        if (gc->parsed()) {
            gc_seed_given = gc_seed_opt->count() > 0;
            return cmd_grad_check(gc_seed_given ? gc_seed : env_default_seed(7), gc_trials);
        }
        return 2;
    } catch (const std::exception& e) {
        nlohmann::json err;
        err["error"] = e.what();
        std::cerr << err.dump() << "\n";
        return 1;
    }
}

}  // namespace hienet
