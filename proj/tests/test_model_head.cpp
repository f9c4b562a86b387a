#include <doctest.h>

#include <cmath>

#include "hienet/model_head.hpp"
#include "hienet/trainer.hpp"

using namespace hienet;

namespace {

// Shared toy world mirroring the trainer's internal toy: 6 labels in two
// branches, 20-word vocab, a couple of docs.
struct World {
    CodeTree tree;
    Vocab vocab;
    Dataset train;
    TrainConfig cfg;
    ModelParams params;
    RunContext ctx;

    explicit World(std::uint64_t seed, Mode mode = Mode::Full) {
        tree = CodeTree::build({{"100", "w0 w1"},
                                {"100.0", "w2 w3"},
                                {"100.1", "w4 w5"},
                                {"101", "w6 w7"},
                                {"101.0", "w8 w9"},
                                {"101.1", "w10 w11"}});
        std::vector<std::string> words;
        for (int i = 0; i < 20; ++i) words.push_back("w" + std::to_string(i));
        vocab = Vocab::from_words(words);
        cfg.seed = seed;
        cfg.enc.d_e = 8;
        cfg.enc.d_c = 4;
        cfg.enc.filter_sizes = {1, 3};
        cfg.enc.max_len = 12;
        cfg.dropout = 0.0;
        cfg.mode = mode;
        cfg.pm.rounds = 2;
        cfg.pm.tau = 0.3;
        cfg.pm.lambda = 0.3;
        LabeledDoc d1;
        d1.doc_id = 0;
        d1.tokens = {2, 3, 8, 9, 1, 14};
        d1.labels = {"100.0", "101.0"};
        LabeledDoc d2;
        d2.doc_id = 1;
        d2.tokens = {4, 5, 10, 11};
        d2.labels = {"100.1", "101.1"};
        train.docs = {d1, d2};
        auto [n, k] = resolve_position_caps(cfg, tree);
        params = ModelParams::init(cfg.enc, vocab.size(), tree.num_labels(), n * k, seed);
        Rng r(seed + 1);
        params.vt = Tensor::randn({tree.num_labels(), cfg.enc.d_e}, r, 0.3);
        ctx = build_context(cfg, tree, vocab, train, params);
    }
};

}  // namespace

TEST_CASE("single-position attention weight is exactly one") {
    Rng rng(1);
    Tape t;
    int h = t.constant(Tensor::randn({1, 5}, rng));   // N=1 position
    int w_a = t.constant(Tensor::randn({5, 4}, rng));
    int b_a = t.constant(Tensor::randn({4}, rng));
    int vpt = t.constant(Tensor::randn({3, 4}, rng));  // L=3 codes
    int attn;
    int araw = code_wise_attention(t, h, w_a, b_a, vpt, &attn);
    for (int l = 0; l < 3; ++l) CHECK(t.val(attn).at(l, 0) == 1.0);
    // a_l equals the single projected row
    Tape t2;
    int m = t2.tanh(t2.bias_add_rows(
        t2.matmul(t2.constant(t.val(h)), t2.constant(t.val(w_a))), t2.constant(t.val(b_a))));
    for (int l = 0; l < 3; ++l)
        for (int c = 0; c < 4; ++c)
            CHECK(t.val(araw).at(l, c) == doctest::Approx(t2.val(m).at(0, c)).epsilon(1e-14));
}

TEST_CASE("attention rows sum to one for random inputs") {
    Rng rng(2);
    Tape t;
    int h = t.constant(Tensor::randn({7, 6}, rng));
    int w_a = t.constant(Tensor::randn({6, 5}, rng));
    int b_a = t.constant(Tensor::randn({5}, rng));
    int vpt = t.constant(Tensor::randn({4, 5}, rng));
    int attn;
    code_wise_attention(t, h, w_a, b_a, vpt, &attn);
    for (int l = 0; l < 4; ++l) {
        double s = 0.0;
        for (int p = 0; p < 7; ++p) s += t.val(attn).at(l, p);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("2-position 2-code attention matches the hand oracle with identity projection") {
    Tape t;
    // H = M (identity W_a, zero bias, pre-tanh values chosen small)
    Tensor hmat = Tensor::from_rows(2, 2, {0.2, -0.1, 0.4, 0.3});
    Tensor vpt = Tensor::from_rows(2, 2, {1.0, 0.0, 0.0, 1.0});
    Tensor eye = Tensor::from_rows(2, 2, {1, 0, 0, 1});
    int attn;
    int araw = code_wise_attention(t, t.constant(hmat), t.constant(eye),
                                   t.constant(Tensor({2})), t.constant(vpt), &attn);
    // oracle
    double m[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m[i][j] = std::tanh(hmat.at(i, j));
    for (int l = 0; l < 2; ++l) {
        const double s0 = m[0][l], s1 = m[1][l];  // dot with one-hot v_l
        const double e0 = std::exp(s0), e1 = std::exp(s1);
        const double a0 = e0 / (e0 + e1), a1 = e1 / (e0 + e1);
        CHECK(t.val(attn).at(l, 0) == doctest::Approx(a0).epsilon(1e-12));
        for (int c = 0; c < 2; ++c)
            CHECK(t.val(araw).at(l, c) ==
                  doctest::Approx(a0 * m[0][c] + a1 * m[1][c]).epsilon(1e-12));
    }
}

TEST_CASE("ppr branch: edgeless graph passes araw through") {
    CoocGraph g = CoocGraph::build(4, {});
    Rng rng(3);
    Tensor araw = Tensor::randn({4, 3}, rng);
    PprConfig cfg;
    cfg.d = 0.5;
    CHECK(ppr_branch(araw, g, cfg).data == araw.data);
}

TEST_CASE("ppr branch: teleport-dominant limit approaches araw") {
    CoocGraph g = CoocGraph::build(3, {{0, 1, 2}});
    Rng rng(4);
    Tensor araw = Tensor::randn({3, 3}, rng);
    PprConfig cfg;
    cfg.d = 0.999;
    Tensor out = ppr_branch(araw, g, cfg);
    for (int i = 0; i < out.numel(); ++i)
        CHECK(out[i] == doctest::Approx(araw[i]).epsilon(5e-3));
}

TEST_CASE("ppr branch on a triangle matches the closed form and iterate") {
    CoocGraph g = CoocGraph::build(3, {{0, 1, 2}});
    Rng rng(5);
    Tensor araw = Tensor::randn({3, 4}, rng);
    PprConfig cfg;
    cfg.d = 0.5;
    Tensor closed = ppr_branch(araw, g, cfg, false);
    Tensor iter = ppr_branch(araw, g, cfg, true);
    for (int i = 0; i < closed.numel(); ++i)
        CHECK(closed[i] == doctest::Approx(iter[i]).epsilon(1e-9));
}

TEST_CASE("aggregate: zero features and bias give probability one half") {
    World w(6);
    Tensor zero({w.tree.num_labels(), w.cfg.enc.d_e});
    ModelParams p = w.params;
    p.score_b = Tensor({w.tree.num_labels(), 1});
    std::vector<double> probs;
    aggregate_plain(zero, zero, p, nullptr, &probs);
    for (double pr : probs) CHECK(pr == 0.5);
}

TEST_CASE("zeroed scoring vector makes that code's probability constant") {
    World w(7);
    for (int c = 0; c < w.cfg.enc.d_e; ++c) w.params.score_w.at(2, c) = 0.0;
    Rng rng(8);
    std::vector<double> p1, p2;
    aggregate_plain(Tensor::randn({6, 8}, rng), Tensor::randn({6, 8}, rng), w.params, nullptr,
                    &p1);
    aggregate_plain(Tensor::randn({6, 8}, rng), Tensor::randn({6, 8}, rng), w.params, nullptr,
                    &p2);
    CHECK(p1[2] == p2[2]);
}

TEST_CASE("aggregate hand case with two codes") {
    // d_e = 1: W_fc = [a b], F_l = a*P_l + b*PPR_l, logit = s_l*F_l + bias
    TrainConfig cfg;
    ModelParams p;
    p.w_fc = Tensor::from_rows(1, 2, {2.0, -1.0});
    p.score_w = Tensor::from_rows(2, 1, {0.5, -0.25});
    p.score_b = Tensor::from_rows(2, 1, {0.1, -0.2});
    Tensor pr = Tensor::from_rows(2, 1, {1.0, 3.0});
    Tensor ppr = Tensor::from_rows(2, 1, {2.0, -2.0});
    std::vector<double> logits, probs;
    aggregate_plain(pr, ppr, p, &logits, &probs);
    // code0: F = 2*1 - 1*2 = 0; logit = 0.5*0 + 0.1 = 0.1
    // code1: F = 2*3 - 1*(-2) = 8; logit = -0.25*8 - 0.2 = -2.2
    CHECK(logits[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(logits[1] == doctest::Approx(-2.2).epsilon(1e-12));
    CHECK(probs[0] == doctest::Approx(1.0 / (1.0 + std::exp(-0.1))).epsilon(1e-12));
}

TEST_CASE("aggregate with W_fc = [I | 0] scores P alone") {
    World w(9);
    const int d = w.cfg.enc.d_e;
    w.params.w_fc = Tensor({d, 2 * d});
    for (int i = 0; i < d; ++i) w.params.w_fc.at(i, i) = 1.0;
    Rng rng(10);
    Tensor p = Tensor::randn({6, d}, rng);
    Tensor ppr1 = Tensor::randn({6, d}, rng);
    Tensor ppr2 = Tensor::randn({6, d}, rng);
    std::vector<double> l1, l2;
    aggregate_plain(p, ppr1, w.params, &l1, nullptr);
    aggregate_plain(p, ppr2, w.params, &l2, nullptr);
    CHECK(l1 == l2);
}

TEST_CASE("bce loss identities") {
    // probs = gold exactly (post-clamp): loss ~ L * -log(1 - 1e-7)
    std::vector<double> probs = {1.0, 0.0, 1.0};
    std::vector<std::uint8_t> gold = {1, 0, 1};
    const double loss = bce_loss(probs, gold);
    CHECK(loss == doctest::Approx(3.0 * -std::log(1.0 - 1e-7)).epsilon(1e-9));

    // uniform 0.5 gives L * log 2 within 1e-12
    std::vector<double> half = {0.5, 0.5, 0.5, 0.5, 0.5};
    std::vector<std::uint8_t> any = {1, 0, 1, 1, 0};
    CHECK(std::abs(bce_loss(half, any) - 5.0 * std::log(2.0)) <= 1e-12);
}

TEST_CASE("bce hand case with three labels") {
    std::vector<double> probs = {0.9, 0.2, 0.6};
    std::vector<std::uint8_t> gold = {1, 0, 1};
    const double expect = -(std::log(0.9) + std::log(0.8) + std::log(0.6));
    CHECK(bce_loss(probs, gold) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("probs lie strictly inside (0,1)") {
    World w(11);
    ForwardOpts opts;
    opts.apply_pm = true;
    for (const auto& doc : w.train.docs) {
        Tape t;
        DocGraph g = build_doc_graph(t, w.params, w.cfg, w.ctx, doc.tokens, opts);
        for (double p : t.val(g.agg.probs).data) {
            CHECK(p > 0.0);
            CHECK(p < 1.0);
        }
    }
}

TEST_CASE("ablation flags change only their branch") {
    World full(12, Mode::Full);
    World no_pp(12, Mode::NoPp);
    World no_bhpe(12, Mode::NoBhpe);
    World no_pm(12, Mode::NoPm);
    ForwardOpts opts;
    opts.apply_pm = true;
    const auto& tokens = full.train.docs[0].tokens;

    Tape tf, tp, tb, tm;
    DocGraph gf = build_doc_graph(tf, full.params, full.cfg, full.ctx, tokens, opts);
    DocGraph gp = build_doc_graph(tp, no_pp.params, no_pp.cfg, no_pp.ctx, tokens, opts);
    DocGraph gb = build_doc_graph(tb, no_bhpe.params, no_bhpe.cfg, no_bhpe.ctx, tokens, opts);
    DocGraph gm = build_doc_graph(tm, no_pm.params, no_pm.cfg, no_pm.ctx, tokens, opts);

    // no_pp: identical document features and attention inputs except the
    // propagation branch collapses to araw
    CHECK(tf.val(gf.araw).data == tp.val(gp.araw).data);
    CHECK(tp.val(gp.ppr).data == tp.val(gp.araw).data);
    CHECK(tf.val(gf.ppr).data != tf.val(gf.araw).data);

    // no_pm: araw and ppr agree with full; only P differs (PM skipped)
    CHECK(tf.val(gf.araw).data == tm.val(gm.araw).data);
    CHECK(tf.val(gf.ppr).data == tm.val(gm.ppr).data);
    CHECK(tm.val(gm.p).data == tm.val(gm.araw).data);

    // no_bhpe: code representations are the description-mean inits
    CHECK(tb.val(gb.vpt).data == no_bhpe.ctx.inits.data);
    CHECK(tf.val(gf.vpt).data != tb.val(gb.vpt).data);
    // document encoder output is identical (same seed/params)
    CHECK(tf.val(gf.enc.H).data == tb.val(gb.enc.H).data);
}

TEST_CASE("full model gradient on the toy instance passes at 1e-4") {
    CHECK(full_model_grad_check(21) <= 1e-4);
}
