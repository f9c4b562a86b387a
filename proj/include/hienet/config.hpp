#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hienet/cooc_graph.hpp"
#include "hienet/doc_encoder.hpp"
#include "hienet/progressive.hpp"

namespace hienet {

enum class Mode { Full, NoPm, NoBhpe, NoPp };

std::string mode_to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct TrainConfig {
    std::uint64_t seed = 7;
    EncoderConfig enc;
    PprConfig ppr;
    bool ppr_iterate_mode = false;  // derive the propagation from iteration
    bool cooc_binarize = true;
    PmConfig pm;
    Mode mode = Mode::Full;

    double lr = 1e-4;
    int batch_size = 32;
    int max_epochs = 30;
    int patience = 10;
    double dropout = 0.2;

    double bpr_lr = 0.01;
    int bpr_max_epochs = 500;
    double bpr_stop = 0.01;

    int pos_n = 0;  // 0 = derive from tree
    int pos_k = 0;
    bool pos_trainable = false;
    bool finetune_vt = false;

    // optional: stop the main loop once validation micro-F1 reaches this
    double stop_at_micro_f1 = 0.0;

    void validate() const;
};

TrainConfig parse_train_config(const std::string& path);
void write_train_config(const std::string& path, const TrainConfig& cfg);

// Flat key=value snapshot (used by run manifests).
std::vector<std::pair<std::string, std::string>> config_items(const TrainConfig& cfg);

}  // namespace hienet
