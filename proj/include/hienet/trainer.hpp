#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hienet/config.hpp"
#include "hienet/metrics.hpp"
#include "hienet/model.hpp"
#include "hienet/model_head.hpp"
#include "hienet/synth_data.hpp"

namespace hienet {

struct EpochLog {
    int epoch = 0;
    double train_loss = 0.0;
    double bpr_loss = 0.0;  // final alignment loss (constant across epochs)
    EvalResult val;
};

struct TrainOutput {
    ModelParams params;
    std::vector<EpochLog> log;
    int best_epoch = -1;
    double best_val_micro_f1 = 0.0;
    int epochs_run = 0;
    bool early_stopped = false;
    bool bpr_converged = false;
    double bpr_final_loss = 0.0;
    int bpr_epochs = 0;
};

// Phase 1 trains the hierarchy encoders to the alignment threshold; phase 2
// minimizes BCE with Adam, early-stopping on validation micro-F1. If out_dir
// is non-empty, writes checkpoint.bin and train_log.csv there.
TrainOutput train_model(const TrainConfig& cfg, const CodeTree& tree, const Vocab& vocab,
                        const Dataset& train, const Dataset& val,
                        const std::string& out_dir = "");

struct EvalOutput {
    EvalResult metrics;
    ProbMatrix probs;
    GoldMatrix gold;
    // Per-doc feature caches (kept when keep_caches), inputs to the sweep.
    std::vector<Tensor> araw;
    std::vector<Tensor> ppr;
};

// Inference pass over a dataset with PM/PPR in the configured mode.
EvalOutput evaluate_model(ModelParams& params, const TrainConfig& cfg, const RunContext& ctx,
                          const CodeTree& tree, const Dataset& ds, bool keep_caches = false,
                          std::vector<PmTrace>* traces = nullptr);

// Re-applies the progressive mechanism at each lambda on frozen per-doc
// features (no retraining) and evaluates all metrics.
std::vector<std::pair<double, EvalResult>> lambda_sweep(ModelParams& params,
                                                        const TrainConfig& cfg,
                                                        const RunContext& ctx,
                                                        const CodeTree& tree, const Dataset& ds,
                                                        const std::vector<double>& lambdas);

void write_sweep_csv(const std::string& path,
                     const std::vector<std::pair<double, EvalResult>>& rows);

// Trains and evaluates each mode with the shared seed and data.
std::vector<std::pair<std::string, EvalResult>> ablate(const TrainConfig& base,
                                                       const CodeTree& tree, const Vocab& vocab,
                                                       const Dataset& train, const Dataset& val,
                                                       const Dataset& test,
                                                       const std::string& out_dir = "");

void write_ablation_csv(const std::string& path,
                        const std::vector<std::pair<std::string, EvalResult>>& rows);

void write_train_log_csv(const std::string& path, const std::vector<EpochLog>& log);

// JSON lines of per-code probabilities, descending, with ranks.
void write_predictions_jsonl(const std::string& path, const CodeTree& tree, const Dataset& ds,
                             const ProbMatrix& probs, int top_k);

// Gradient diagnostics: central differences against the tape, per primitive
// in isolation (random inputs) and for the full model loss on a toy instance
// with all branches active.
std::vector<std::pair<std::string, double>> primitive_grad_checks(std::uint64_t seed,
                                                                  int trials = 20);
double full_model_grad_check(std::uint64_t seed);

}  // namespace hienet
