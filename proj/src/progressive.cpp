#include "hienet/progressive.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace hienet {

NeighborSource neighbor_source_from_string(const std::string& s) {
    if (s == "graph") return NeighborSource::Graph;
    if (s == "tree") return NeighborSource::Tree;
    if (s == "union") return NeighborSource::Union;
    throw std::invalid_argument("unknown neighbor source '" + s + "'");
}

std::string neighbor_source_to_string(NeighborSource s) {
    switch (s) {
        case NeighborSource::Graph: return "graph";
        case NeighborSource::Tree: return "tree";
        case NeighborSource::Union: return "union";
    }
    return "graph";
}

void PmConfig::validate() const {
    if (lambda < 0.0 || lambda > 1.0)
        throw std::invalid_argument("pm: lambda must be in [0,1]");
    if (rounds < 0) throw std::invalid_argument("pm: rounds must be >= 0");
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("pm: tau must be in (0,1)");
}

std::vector<std::vector<int>> resolve_neighbors(const CoocGraph& g, const CodeTree& tree,
                                                NeighborSource source) {
    const int L = g.num_labels();
    if (L != tree.num_labels())
        throw std::invalid_argument("resolve_neighbors: graph/tree label count mismatch");
    std::vector<std::vector<int>> out(L);
    for (int c = 0; c < L; ++c) {
        std::set<int> nb;
        if (source == NeighborSource::Graph || source == NeighborSource::Union)
            for (int j : g.neighbors(c)) nb.insert(j);
        if (source == NeighborSource::Tree || source == NeighborSource::Union) {
            const CodeNode& node = tree.node(tree.labels()[c]);
            const int pidx = node.parent;
            if (pidx > 0) nb.insert(tree.label_index(tree.node(pidx).code));
            for (int ch : node.children) nb.insert(tree.label_index(tree.node(ch).code));
        }
        nb.erase(c);
        out[c].assign(nb.begin(), nb.end());
    }
    return out;
}

Tensor pm_apply(const Tensor& araw, const PmScorer& scorer,
                const std::vector<std::vector<int>>& neighbors,
                const std::vector<std::uint8_t>* gold, const PmConfig& cfg, PmTrace* trace) {
    cfg.validate();
    if (araw.ndim() != 2) shape_error("pm_apply", araw);
    const int L = araw.rows();
    if (static_cast<int>(neighbors.size()) != L)
        throw std::invalid_argument("pm_apply: neighbor list size mismatch");
    if (gold && static_cast<int>(gold->size()) != L)
        throw std::invalid_argument("pm_apply: gold size mismatch");

    Tensor p = araw;
    std::vector<char> confirmed(L, 0);
    for (int round = 0; round < cfg.rounds; ++round) {
        const std::vector<double> logits = scorer(p);
        if (static_cast<int>(logits.size()) != L)
            throw std::invalid_argument("pm_apply: scorer returned wrong size");
        int best = -1;
        for (int l = 0; l < L; ++l) {
            if (confirmed[l]) continue;
            if (best < 0 || logits[l] > logits[best]) best = l;
        }
        if (best < 0) break;
        const double x = logits[best];
        const double prob =
            x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
        if (prob < cfg.tau) break;
        confirmed[best] = 1;

        PmEvent ev;
        ev.round = round;
        ev.code = best;
        ev.gold_known = gold != nullptr;
        ev.was_correct = gold ? (*gold)[best] != 0 : false;
        const bool wrong = gold && (*gold)[best] == 0;
        if (!wrong) {
            for (int j : neighbors[best]) {
                if (j == best || confirmed[j]) continue;
                ev.affected.push_back(j);
                for (int c = 0; c < p.cols(); ++c)
                    p.at(j, c) = cfg.lambda * p.at(best, c) + (1.0 - cfg.lambda) * p.at(j, c);
            }
        }
        if (trace) trace->events.push_back(std::move(ev));
        if (wrong) break;
    }
    return p;
}

std::string trace_to_json(const PmTrace& trace, const std::vector<std::string>& labels) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& ev : trace.events) {
        nlohmann::json e;
        e["round"] = ev.round;
        e["code"] = labels.at(ev.code);
        if (ev.gold_known) e["was_correct"] = ev.was_correct;
        nlohmann::json aff = nlohmann::json::array();
        for (int a : ev.affected) aff.push_back(labels.at(a));
        e["affected"] = std::move(aff);
        j.push_back(std::move(e));
    }
    return j.dump();
}

}  // namespace hienet
