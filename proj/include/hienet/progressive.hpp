#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hienet/code_tree.hpp"
#include "hienet/cooc_graph.hpp"
#include "hienet/tensor.hpp"

namespace hienet {

enum class NeighborSource { Graph, Tree, Union };

NeighborSource neighbor_source_from_string(const std::string& s);
std::string neighbor_source_to_string(NeighborSource s);

struct PmConfig {
    double lambda = 0.3;  // blend factor
    int rounds = 3;       // max confirmations per document
    double tau = 0.5;     // confirmation threshold on the sigmoid score
    NeighborSource neighbor_source = NeighborSource::Graph;
    bool train_mode = false;  // blend inside the training loss graph

    void validate() const;
};

struct PmEvent {
    int round = 0;
    int code = 0;            // label index of the confirmed code
    bool gold_known = false;
    bool was_correct = false;
    std::vector<int> affected;  // neighbor rows that were blended
};

struct PmTrace {
    std::vector<PmEvent> events;
};

// Scores the current feature matrix P [L, d_e] to per-code logits.
using PmScorer = std::function<std::vector<double>(const Tensor& P)>;

// Per-label neighbor lists for the configured source, sorted ascending.
std::vector<std::vector<int>> resolve_neighbors(const CoocGraph& g, const CodeTree& tree,
                                                NeighborSource source);

// Progressive feature blending. Per round: score unconfirmed codes, take the
// argmax (ties to the lowest index); stop below tau; with gold given, a wrong
// confirmation ends the process; otherwise each unconfirmed neighbor row j is
// replaced by lambda*P_c + (1-lambda)*P_j.
Tensor pm_apply(const Tensor& araw, const PmScorer& scorer,
                const std::vector<std::vector<int>>& neighbors,
                const std::vector<std::uint8_t>* gold, const PmConfig& cfg,
                PmTrace* trace = nullptr);

std::string trace_to_json(const PmTrace& trace, const std::vector<std::string>& labels);

}  // namespace hienet
