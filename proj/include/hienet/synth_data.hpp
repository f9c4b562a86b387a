#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hienet/code_tree.hpp"

namespace hienet {

struct LabeledDoc {
    long doc_id = 0;
    std::vector<int> tokens;          // ids into the corpus vocabulary
    std::vector<std::string> labels;  // gold code strings, sorted
};

struct Dataset {
    std::vector<LabeledDoc> docs;
};

struct Vocab {
    std::vector<std::string> words;
    std::map<std::string, int> index;

    int id(const std::string& w) const;
    int size() const { return static_cast<int>(words.size()); }
    static Vocab from_words(std::vector<std::string> words);
};

struct GenConfig {
    std::uint64_t seed = 7;
    int tree_branching = 4;
    int tree_depth = 3;
    int num_labels = 50;
    int vocab_size = 256;
    int sig_tokens_per_code = 3;
    int train_docs = 2000;
    int val_docs = 250;
    int test_docs = 250;
    double labels_per_doc_mean = 16.0;
    int labels_per_doc_cap = 22;
    int clique_count = 4;
    int clique_size = 5;
    double clique_prob = 0.6;       // probability a doc is seeded from a clique
    double noise_rate = 0.2;        // fraction of emitted tokens that are noise
    double hidden_label_rate = 0.0; // clique members that contribute no tokens
    bool power_law_labels = false;
    double power_law_exp = 1.0;

    void validate() const;
};

struct PlantedRecord {
    std::vector<std::vector<std::string>> cliques;
    std::map<std::string, std::vector<int>> signatures;
    // Union over train docs of all unordered gold-label pairs.
    std::set<std::pair<std::string, std::string>> cooc_edges;
};

struct SynthCorpus {
    std::vector<std::pair<std::string, std::string>> code_list;  // code, description
    CodeTree tree;
    Vocab vocab;
    Dataset train, val, test;
    PlantedRecord planted;
};

// Deterministic per seed: same config twice gives byte-identical splits.
SynthCorpus generate(const GenConfig& cfg);

// JSON lines: {"doc_id": int, "tokens": [ints], "labels": [strings]}
Dataset read_jsonl(const std::string& path);
void write_jsonl(const std::string& path, const Dataset& ds);

Vocab read_vocab(const std::string& path);
void write_vocab(const std::string& path, const Vocab& v);

std::string planted_to_json(const PlantedRecord& r);
PlantedRecord planted_from_json(const std::string& text);

GenConfig parse_gen_config(const std::string& path);
void write_gen_config(const std::string& path, const GenConfig& cfg);

}  // namespace hienet
