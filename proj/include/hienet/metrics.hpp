#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hienet {

struct EvalResult {
    double jaccard_top20 = 0.0;
    double jaccard_top30 = 0.0;
    double auc_macro = 0.0;
    double auc_micro = 0.0;
    double f1_macro = 0.0;
    double f1_micro = 0.0;
    double p_at_5 = 0.0;
    double p_at_8 = 0.0;
    double p_at_15 = 0.0;
    int jaccard_skipped = 0;  // docs with empty gold, excluded from Jaccard
};

using ProbMatrix = std::vector<std::vector<double>>;   // docs x L
using GoldMatrix = std::vector<std::vector<uint8_t>>;  // docs x L, 0/1

// Top-K indices by score, ties broken toward the lower index.
std::vector<int> top_k_indices(const std::vector<double>& scores, int k);

// Mean over docs of |topK ∩ gold| / |topK ∪ gold|. Docs with empty gold are
// skipped; the skip count is reported through `skipped` when non-null.
double jaccard_topk(const ProbMatrix& probs, const GoldMatrix& gold, int k,
                    int* skipped = nullptr);

// Mean over docs of |topN ∩ gold| / N.
double p_at_n(const ProbMatrix& probs, const GoldMatrix& gold, int n);

// Binarize at `threshold`; micro from pooled counts, macro over labels with
// at least one gold positive (0/0 per-label F1 counts as 0).
void f1_scores(const ProbMatrix& probs, const GoldMatrix& gold, double& macro, double& micro,
               double threshold = 0.5);

// Rank-statistic ROC AUC with midranks for ties. Macro averages labels with
// both classes present; micro pools all (doc,label) pairs.
void auc_scores(const ProbMatrix& probs, const GoldMatrix& gold, double& macro, double& micro);

EvalResult evaluate_all(const ProbMatrix& probs, const GoldMatrix& gold);

std::string eval_csv_header();
std::string eval_csv_row(const EvalResult& r);
void write_eval_csv(const std::string& path, const EvalResult& r);

}  // namespace hienet
