#include "hienet/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace hienet {

namespace {

void check_shapes(const ProbMatrix& probs, const GoldMatrix& gold) {
    if (probs.size() != gold.size()) throw std::invalid_argument("metrics: doc count mismatch");
    for (std::size_t d = 0; d < probs.size(); ++d)
        if (probs[d].size() != gold[d].size())
            throw std::invalid_argument("metrics: label count mismatch at doc " +
                                        std::to_string(d));
}

}  // namespace

std::vector<int> top_k_indices(const std::vector<double>& scores, int k) {
    if (k < 1) throw std::invalid_argument("top_k: k must be >= 1");
    std::vector<int> idx(scores.size());
    std::iota(idx.begin(), idx.end(), 0);
    const int kk = std::min<int>(k, static_cast<int>(scores.size()));
    std::partial_sort(idx.begin(), idx.begin() + kk, idx.end(), [&](int a, int b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    idx.resize(kk);
    return idx;
}

double jaccard_topk(const ProbMatrix& probs, const GoldMatrix& gold, int k, int* skipped) {
    check_shapes(probs, gold);
    double sum = 0.0;
    int counted = 0, skip = 0;
    for (std::size_t d = 0; d < probs.size(); ++d) {
        const int n_gold = std::accumulate(gold[d].begin(), gold[d].end(), 0);
        if (n_gold == 0) {
            ++skip;
            continue;
        }
        const auto top = top_k_indices(probs[d], k);
        int inter = 0;
        for (int i : top) inter += gold[d][i];
        const int uni = static_cast<int>(top.size()) + n_gold - inter;
        sum += static_cast<double>(inter) / uni;
        ++counted;
    }
    if (skipped) *skipped = skip;
    return counted ? sum / counted : 0.0;
}

double p_at_n(const ProbMatrix& probs, const GoldMatrix& gold, int n) {
    check_shapes(probs, gold);
    if (probs.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t d = 0; d < probs.size(); ++d) {
        const auto top = top_k_indices(probs[d], n);
        int hits = 0;
        for (int i : top) hits += gold[d][i];
        sum += static_cast<double>(hits) / n;
    }
    return sum / static_cast<double>(probs.size());
}

void f1_scores(const ProbMatrix& probs, const GoldMatrix& gold, double& macro, double& micro,
               double threshold) {
    check_shapes(probs, gold);
    if (probs.empty()) {
        macro = micro = 0.0;
        return;
    }
    const std::size_t L = probs[0].size();
    long tp_pool = 0, fp_pool = 0, fn_pool = 0;
    double macro_sum = 0.0;
    int macro_labels = 0;
    for (std::size_t l = 0; l < L; ++l) {
        long tp = 0, fp = 0, fn = 0, pos = 0;
        for (std::size_t d = 0; d < probs.size(); ++d) {
            const bool pred = probs[d][l] >= threshold;
            const bool y = gold[d][l] != 0;
            pos += y;
            tp += pred && y;
            fp += pred && !y;
            fn += !pred && y;
        }
        tp_pool += tp;
        fp_pool += fp;
        fn_pool += fn;
        if (pos > 0) {
            const long denom = 2 * tp + fp + fn;
            macro_sum += denom > 0 ? 2.0 * tp / denom : 0.0;
            ++macro_labels;
        }
    }
    macro = macro_labels ? macro_sum / macro_labels : 0.0;
    const long denom = 2 * tp_pool + fp_pool + fn_pool;
    micro = denom > 0 ? 2.0 * tp_pool / denom : 0.0;
}

namespace {

// AUC via the Mann-Whitney rank statistic; ties get midranks.
double auc_from_pairs(std::vector<std::pair<double, uint8_t>>& pairs) {
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    const std::size_t n = pairs.size();
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && pairs[j + 1].first == pairs[i].first) ++j;
        const double mid = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t t = i; t <= j; ++t) rank[t] = mid;
        i = j + 1;
    }
    double rank_pos = 0.0;
    long n_pos = 0;
    for (std::size_t t = 0; t < n; ++t)
        if (pairs[t].second) {
            rank_pos += rank[t];
            ++n_pos;
        }
    const long n_neg = static_cast<long>(n) - n_pos;
    if (n_pos == 0 || n_neg == 0) return -1.0;  // undefined
    return (rank_pos - 0.5 * n_pos * (n_pos + 1.0)) / (static_cast<double>(n_pos) * n_neg);
}

}  // namespace

void auc_scores(const ProbMatrix& probs, const GoldMatrix& gold, double& macro, double& micro) {
    check_shapes(probs, gold);
    macro = micro = 0.0;
    if (probs.empty()) return;
    const std::size_t L = probs[0].size();
    double macro_sum = 0.0;
    int macro_labels = 0;
    std::vector<std::pair<double, uint8_t>> pool;
    pool.reserve(probs.size() * L);
    for (std::size_t l = 0; l < L; ++l) {
        std::vector<std::pair<double, uint8_t>> pairs;
        pairs.reserve(probs.size());
        for (std::size_t d = 0; d < probs.size(); ++d) {
            pairs.emplace_back(probs[d][l], gold[d][l]);
            pool.emplace_back(probs[d][l], gold[d][l]);
        }
        const double a = auc_from_pairs(pairs);
        if (a >= 0.0) {
            macro_sum += a;
            ++macro_labels;
        }
    }
    macro = macro_labels ? macro_sum / macro_labels : 0.0;
    const double m = auc_from_pairs(pool);
    micro = m >= 0.0 ? m : 0.0;
}

EvalResult evaluate_all(const ProbMatrix& probs, const GoldMatrix& gold) {
    EvalResult r;
    r.jaccard_top20 = jaccard_topk(probs, gold, 20, &r.jaccard_skipped);
    r.jaccard_top30 = jaccard_topk(probs, gold, 30, nullptr);
    auc_scores(probs, gold, r.auc_macro, r.auc_micro);
    f1_scores(probs, gold, r.f1_macro, r.f1_micro);
    r.p_at_5 = p_at_n(probs, gold, 5);
    r.p_at_8 = p_at_n(probs, gold, 8);
    r.p_at_15 = p_at_n(probs, gold, 15);
    return r;
}

std::string eval_csv_header() {
    return "jaccard_top20,jaccard_top30,auc_macro,auc_micro,f1_macro,f1_micro,"
           "p_at_5,p_at_8,p_at_15";
}

std::string eval_csv_row(const EvalResult& r) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g",
                  r.jaccard_top20, r.jaccard_top30, r.auc_macro, r.auc_micro, r.f1_macro,
                  r.f1_micro, r.p_at_5, r.p_at_8, r.p_at_15);
    return buf;
}

void write_eval_csv(const std::string& path, const EvalResult& r) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << eval_csv_header() << "\n" << eval_csv_row(r) << "\n";
}

}  // namespace hienet
