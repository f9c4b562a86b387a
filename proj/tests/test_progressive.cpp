#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "hienet/model_head.hpp"
#include "hienet/progressive.hpp"
#include "hienet/trainer.hpp"

using namespace hienet;

namespace {

// Scorer that reads logits straight from column 0 of the feature rows.
PmScorer col0_scorer() {
    return [](const Tensor& p) {
        std::vector<double> logits(p.rows());
        for (int l = 0; l < p.rows(); ++l) logits[l] = p.at(l, 0);
        return logits;
    };
}

std::vector<std::vector<int>> line_graph_neighbors(int n) {
    std::vector<std::vector<int>> nb(n);
    for (int i = 0; i + 1 < n; ++i) {
        nb[i].push_back(i + 1);
        nb[i + 1].push_back(i);
    }
    for (auto& v : nb) std::sort(v.begin(), v.end());
    return nb;
}

}  // namespace

TEST_CASE("lambda = 0 leaves features bit-identical") {
    Rng rng(1);
    Tensor araw = Tensor::randn({5, 3}, rng);
    araw.at(2, 0) = 4.0;  // strong confirmation
    PmConfig cfg;
    cfg.lambda = 0.0;
    cfg.rounds = 3;
    cfg.tau = 0.5;
    PmTrace trace;
    Tensor p = pm_apply(araw, col0_scorer(), line_graph_neighbors(5), nullptr, cfg, &trace);
    CHECK(p.data == araw.data);
    CHECK(!trace.events.empty());  // confirmations still happen
}

TEST_CASE("lambda = 1 copies the confirmed row onto neighbors") {
    Rng rng(2);
    Tensor araw = Tensor::randn({4, 3}, rng);
    araw.at(1, 0) = 5.0;
    PmConfig cfg;
    cfg.lambda = 1.0;
    cfg.rounds = 1;
    cfg.tau = 0.5;
    Tensor p = pm_apply(araw, col0_scorer(), line_graph_neighbors(4), nullptr, cfg);
    for (int c = 0; c < 3; ++c) {
        CHECK(p.at(0, c) == araw.at(1, c));
        CHECK(p.at(2, c) == araw.at(1, c));
    }
    CHECK(p.at(3, 0) == araw.at(3, 0));  // not a neighbor of 1
}

TEST_CASE("hand case: lambda 0.3 on a 3-code line graph, one confirmation") {
    Tensor araw = Tensor::from_rows(3, 2, {3.0, 1.0, -2.0, 0.5, -3.0, 2.0});
    PmConfig cfg;
    cfg.lambda = 0.3;
    cfg.rounds = 1;
    cfg.tau = 0.5;
    PmTrace trace;
    Tensor p = pm_apply(araw, col0_scorer(), line_graph_neighbors(3), nullptr, cfg, &trace);
    REQUIRE(trace.events.size() == 1);
    CHECK(trace.events[0].code == 0);  // argmax of col0
    // neighbor 1 blended: 0.3 * row0 + 0.7 * row1
    CHECK(p.at(1, 0) == doctest::Approx(0.3 * 3.0 + 0.7 * -2.0).epsilon(1e-15));
    CHECK(p.at(1, 1) == doctest::Approx(0.3 * 1.0 + 0.7 * 0.5).epsilon(1e-15));
    // non-neighbor row 2 untouched bit for bit
    CHECK(p.at(2, 0) == araw.at(2, 0));
    CHECK(p.at(2, 1) == araw.at(2, 1));
}

TEST_CASE("confirmation stops below tau") {
    Tensor araw = Tensor::from_rows(2, 1, {-1.0, -2.0});  // sigmoid < 0.5
    PmConfig cfg;
    cfg.rounds = 3;
    cfg.tau = 0.5;
    PmTrace trace;
    Tensor p = pm_apply(araw, col0_scorer(), line_graph_neighbors(2), nullptr, cfg, &trace);
    CHECK(trace.events.empty());
    CHECK(p.data == araw.data);
}

TEST_CASE("argmax ties break toward the lowest code index") {
    Tensor araw = Tensor::from_rows(3, 1, {2.0, 2.0, 0.0});
    PmConfig cfg;
    cfg.rounds = 1;
    cfg.tau = 0.5;
    PmTrace trace;
    pm_apply(araw, col0_scorer(), line_graph_neighbors(3), nullptr, cfg, &trace);
    REQUIRE(trace.events.size() == 1);
    CHECK(trace.events[0].code == 0);
}

TEST_CASE("gold-aware stop: first wrong confirmation ends the process") {
    Tensor araw = Tensor::from_rows(4, 1, {5.0, 4.0, 3.0, 2.0});
    std::vector<std::uint8_t> gold = {1, 0, 1, 1};  // code 1 is wrong
    PmConfig cfg;
    cfg.rounds = 4;
    cfg.tau = 0.5;
    cfg.lambda = 0.5;
    // complete graph so blending is visible
    std::vector<std::vector<int>> nb(4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j) nb[i].push_back(j);
    PmTrace trace;
    Tensor p = pm_apply(araw, col0_scorer(), nb, &gold, cfg, &trace);
    REQUIRE(trace.events.size() == 2);  // code 0 (correct), then code 1 (wrong, final)
    CHECK(trace.events[0].code == 0);
    CHECK(trace.events[0].was_correct);
    CHECK(trace.events[1].code == 1);
    CHECK_FALSE(trace.events[1].was_correct);
    CHECK(trace.events[1].affected.empty());  // wrong confirmation never blends
    (void)p;
}

TEST_CASE("rounds = 0 is the identity") {
    Rng rng(3);
    Tensor araw = Tensor::randn({4, 2}, rng);
    PmConfig cfg;
    cfg.rounds = 0;
    Tensor p = pm_apply(araw, col0_scorer(), line_graph_neighbors(4), nullptr, cfg);
    CHECK(p.data == araw.data);
}

TEST_CASE("apply preserves the label count and never changes unaffected rows") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        Tensor araw = Tensor::randn({8, 3}, rng, 2.0);
        PmConfig cfg;
        cfg.rounds = 3;
        cfg.tau = 0.5;
        cfg.lambda = 0.4;
        auto nb = line_graph_neighbors(8);
        PmTrace trace;
        Tensor p = pm_apply(araw, col0_scorer(), nb, nullptr, cfg, &trace);
        REQUIRE(p.shape == araw.shape);
        std::vector<char> touched(8, 0);
        for (const auto& ev : trace.events)
            for (int j : ev.affected) touched[j] = 1;
        for (int l = 0; l < 8; ++l) {
            if (touched[l]) continue;
            for (int c = 0; c < 3; ++c) CHECK(p.at(l, c) == araw.at(l, c));
        }
    }
}

TEST_CASE("confirmed codes are distinct and trace length bounded by rounds") {
    Rng rng(5);
    Tensor araw = Tensor::randn({6, 2}, rng, 3.0);
    PmConfig cfg;
    cfg.rounds = 4;
    cfg.tau = 0.2;
    auto nb = line_graph_neighbors(6);
    PmTrace trace;
    pm_apply(araw, col0_scorer(), nb, nullptr, cfg, &trace);
    CHECK(trace.events.size() <= 4);
    std::set<int> seen;
    for (const auto& ev : trace.events) CHECK(seen.insert(ev.code).second);
}

TEST_CASE("in-graph PM matches the plain apply bit for bit") {
    // Use the trainer's toy world via the model-head graph: run the full
    // forward with PM, then re-run PM on the frozen araw/ppr with the plain
    // routine and the live-aggregate scorer.
    CodeTree tree = CodeTree::build({{"100", "w0"}, {"101", "w1"}, {"102", "w2"}});
    std::vector<std::string> words = {"w0", "w1", "w2", "w3"};
    Vocab vocab = Vocab::from_words(words);
    TrainConfig cfg;
    cfg.enc.d_e = 4;
    cfg.enc.d_c = 2;
    cfg.enc.filter_sizes = {1};
    cfg.enc.max_len = 4;
    cfg.dropout = 0.0;
    cfg.pm.rounds = 2;
    cfg.pm.tau = 0.3;
    cfg.pm.lambda = 0.4;
    LabeledDoc d;
    d.doc_id = 0;
    d.tokens = {0, 1, 2};
    d.labels = {"100", "101", "102"};
    Dataset train;
    train.docs = {d};
    auto [n, k] = resolve_position_caps(cfg, tree);
    ModelParams params = ModelParams::init(cfg.enc, vocab.size(), tree.num_labels(), n * k, 5);
    Rng r(6);
    params.vt = Tensor::randn({3, 4}, r, 0.5);
    RunContext ctx = build_context(cfg, tree, vocab, train, params);

    Tape t;
    ForwardOpts opts;
    opts.apply_pm = true;
    PmTrace trace;
    opts.trace = &trace;
    DocGraph g = build_doc_graph(t, params, cfg, ctx, d.tokens, opts);

    Tensor araw = t.val(g.araw);
    Tensor ppr = t.val(g.ppr);
    PmScorer scorer = [&](const Tensor& p) {
        std::vector<double> logits;
        aggregate_plain(p, ppr, params, &logits, nullptr);
        return logits;
    };
    PmTrace trace2;
    Tensor p2 = pm_apply(araw, scorer, ctx.pm_neighbors, nullptr, cfg.pm, &trace2);
    CHECK(p2.data == t.val(g.p).data);
    REQUIRE(trace.events.size() == trace2.events.size());
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        CHECK(trace.events[i].code == trace2.events[i].code);
        CHECK(trace.events[i].affected == trace2.events[i].affected);
    }
}

TEST_CASE("neighbor intersection on planted structure recovers the hidden gold code") {
    // two confirmed codes share exactly one unconfirmed neighbor; blending
    // raises its rank (structural replay of the progressive case study)
    const int L = 6;
    // graph: 0-{2,3,5}, 1-{2,4,5}; shared neighbor of 0 and 1 is {2,5}
    std::vector<std::set<int>> sets = {{0, 2}, {0, 3}, {0, 5}, {1, 2}, {1, 4}, {1, 5}, {2, 5}};
    CoocGraph g = CoocGraph::build(L, sets);
    auto inter = g.neighbor_intersection({0, 1});
    CHECK(inter == std::set<int>{2, 5});

    std::vector<std::vector<int>> nb(L);
    for (int c = 0; c < L; ++c)
        for (int j : g.neighbors(c)) nb[c].push_back(j);

    // code 5 is gold but textually weak: low initial score
    Tensor araw = Tensor::from_rows(6, 1, {4.0, 3.5, 0.2, 0.1, 0.0, -1.5});
    auto rank_of = [&](const Tensor& feats, int code) {
        std::vector<double> s(L);
        for (int l = 0; l < L; ++l) s[l] = feats.at(l, 0);
        int rank = 0;
        for (int l = 0; l < L; ++l)
            if (s[l] > s[code] || (s[l] == s[code] && l < code)) ++rank;
        return rank;
    };
    const int before = rank_of(araw, 5);
    PmConfig cfg;
    cfg.rounds = 2;
    cfg.tau = 0.5;
    cfg.lambda = 0.5;
    PmTrace trace;
    Tensor p = pm_apply(araw, col0_scorer(), nb, nullptr, cfg, &trace);
    REQUIRE(trace.events.size() == 2);
    CHECK(trace.events[0].code == 0);
    CHECK(trace.events[1].code == 1);
    const int after = rank_of(p, 5);
    CHECK(after < before);
}
