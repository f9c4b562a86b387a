#include "hienet/synth_data.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hienet/rng.hpp"

namespace hienet {

using nlohmann::json;

int Vocab::id(const std::string& w) const {
    auto it = index.find(w);
    if (it == index.end()) throw std::out_of_range("vocab: unknown token '" + w + "'");
    return it->second;
}

Vocab Vocab::from_words(std::vector<std::string> words) {
    Vocab v;
    v.words = std::move(words);
    for (std::size_t i = 0; i < v.words.size(); ++i) {
        if (!v.index.emplace(v.words[i], static_cast<int>(i)).second)
            throw std::invalid_argument("vocab: duplicate token '" + v.words[i] + "'");
    }
    return v;
}

void GenConfig::validate() const {
    if (num_labels < 1 || vocab_size < 1 || sig_tokens_per_code < 1)
        throw std::invalid_argument("gen config: counts must be positive");
    if (tree_branching < 1 || tree_branching > 10)
        throw std::invalid_argument("gen config: tree_branching must be in [1,10]");
    if (tree_depth < 1) throw std::invalid_argument("gen config: tree_depth must be >= 1");
    if (labels_per_doc_mean <= 0.0 || labels_per_doc_cap < 1)
        throw std::invalid_argument("gen config: labels-per-doc distribution invalid");
    if (noise_rate < 0.0 || noise_rate >= 1.0)
        throw std::invalid_argument("gen config: noise_rate must be in [0,1)");
    if (hidden_label_rate < 0.0 || hidden_label_rate > 1.0)
        throw std::invalid_argument("gen config: hidden_label_rate must be in [0,1]");
    if (clique_prob < 0.0 || clique_prob > 1.0)
        throw std::invalid_argument("gen config: clique_prob must be in [0,1]");
    const int sig_total = num_labels * sig_tokens_per_code;
    const int noise_pool = vocab_size - sig_total;
    if (noise_pool < 1)
        throw std::invalid_argument(
            "gen config: vocab too small for signatures (" + std::to_string(sig_total) +
            " signature tokens need vocab > " + std::to_string(sig_total) + ")");
}

namespace {

// BFS-style code allocation; a fresh top-level category is opened whenever
// the frontier runs dry.
std::vector<std::string> make_code_strings(const GenConfig& cfg) {
    std::vector<std::string> codes;
    std::deque<std::pair<std::string, int>> frontier;  // code, depth
    int category = 0;
    auto push = [&](const std::string& c, int depth) {
        codes.push_back(c);
        if (depth < cfg.tree_depth) frontier.emplace_back(c, depth);
    };
    while (static_cast<int>(codes.size()) < cfg.num_labels) {
        if (frontier.empty()) {
            push(std::to_string(100 + category++), 1);
            continue;
        }
        auto [parent, depth] = frontier.front();
        frontier.pop_front();
        for (int j = 0; j < cfg.tree_branching && static_cast<int>(codes.size()) < cfg.num_labels;
             ++j)
            push(parent + (depth == 1 ? "." : "") + std::to_string(j), depth + 1);
    }
    return codes;
}

int sample_poisson(Rng& rng, double mean) {
    const double limit = std::exp(-mean);
    int k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= rng.uniform();
    } while (p > limit);
    return k - 1;
}

}  // namespace

SynthCorpus generate(const GenConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    Rng rng_docs = rng.split("docs");
    Rng rng_cliques = rng.split("cliques");

    SynthCorpus corpus;
    std::vector<std::string> gen_codes = make_code_strings(cfg);

    // Disjoint signature tokens, assigned in generation order; descriptions
    // are the signature words themselves.
    std::vector<std::string> words;
    words.reserve(cfg.vocab_size);
    for (int i = 0; i < cfg.vocab_size; ++i) words.push_back("w" + std::to_string(i));
    corpus.vocab = Vocab::from_words(words);
    std::map<std::string, std::vector<int>> signatures;
    for (std::size_t i = 0; i < gen_codes.size(); ++i) {
        std::vector<int> sig;
        std::string desc;
        for (int s = 0; s < cfg.sig_tokens_per_code; ++s) {
            const int tok = static_cast<int>(i) * cfg.sig_tokens_per_code + s;
            sig.push_back(tok);
            if (s) desc += ' ';
            desc += words[tok];
        }
        signatures[gen_codes[i]] = sig;
        corpus.code_list.emplace_back(gen_codes[i], desc);
    }
    corpus.planted.signatures = signatures;
    corpus.tree = CodeTree::build(corpus.code_list);
    const int noise_lo = cfg.num_labels * cfg.sig_tokens_per_code;

    // Planted cliques over leaf codes, disjoint.
    std::vector<std::string> leaves;
    for (const auto& code : corpus.tree.labels())
        if (corpus.tree.node(code).children.empty()) leaves.push_back(code);
    std::vector<std::string> pool = leaves;
    for (int c = 0; c < cfg.clique_count; ++c) {
        if (static_cast<int>(pool.size()) < cfg.clique_size) break;
        std::vector<std::string> clique;
        for (int m = 0; m < cfg.clique_size; ++m) {
            const int pick = rng_cliques.uniform_int(static_cast<int>(pool.size()));
            clique.push_back(pool[pick]);
            pool.erase(pool.begin() + pick);
        }
        std::sort(clique.begin(), clique.end());
        corpus.planted.cliques.push_back(std::move(clique));
    }

    // Power-law (or uniform) cumulative weights over label order.
    const auto& labels = corpus.tree.labels();
    std::vector<double> cum(labels.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        acc += cfg.power_law_labels ? 1.0 / std::pow(static_cast<double>(i + 1), cfg.power_law_exp)
                                    : 1.0;
        cum[i] = acc;
    }
    auto sample_label = [&](Rng& r) {
        const double u = r.uniform() * acc;
        return labels[std::lower_bound(cum.begin(), cum.end(), u) - cum.begin()];
    };

    auto make_doc = [&](long doc_id, bool record_edges) {
        LabeledDoc doc;
        doc.doc_id = doc_id;
        std::set<std::string> gold;
        std::set<std::string> hidden;

        int target = std::min(cfg.labels_per_doc_cap,
                              std::max(1, sample_poisson(rng_docs, cfg.labels_per_doc_mean)));
        if (!corpus.planted.cliques.empty() && rng_docs.uniform() < cfg.clique_prob) {
            const auto& clique = corpus.planted.cliques[rng_docs.uniform_int(
                static_cast<int>(corpus.planted.cliques.size()))];
            for (const auto& c : clique) {
                gold.insert(c);
                if (rng_docs.uniform() < cfg.hidden_label_rate) hidden.insert(c);
            }
        }
        for (int attempt = 0; attempt < 400 && static_cast<int>(gold.size()) < target; ++attempt) {
            const std::string cand = sample_label(rng_docs);
            if (gold.count(cand)) continue;
            bool conflict = false;
            for (const auto& gl : gold)
                if (corpus.tree.is_ancestor(cand, gl) || corpus.tree.is_ancestor(gl, cand)) {
                    conflict = true;
                    break;
                }
            if (!conflict) gold.insert(cand);
        }
        if (gold.empty()) gold.insert(labels[rng_docs.uniform_int(static_cast<int>(labels.size()))]);

        for (const auto& gl : gold) {
            if (hidden.count(gl)) continue;
            for (int tok : signatures.at(gl)) doc.tokens.push_back(tok);
        }
        const int n_noise = static_cast<int>(std::lround(
            cfg.noise_rate / (1.0 - cfg.noise_rate) * static_cast<double>(doc.tokens.size())));
        for (int i = 0; i < n_noise; ++i)
            doc.tokens.push_back(noise_lo + rng_docs.uniform_int(cfg.vocab_size - noise_lo));
        // Fisher-Yates shuffle
        for (int i = static_cast<int>(doc.tokens.size()) - 1; i > 0; --i)
            std::swap(doc.tokens[i], doc.tokens[rng_docs.uniform_int(i + 1)]);

        doc.labels.assign(gold.begin(), gold.end());
        if (record_edges)
            for (auto i = gold.begin(); i != gold.end(); ++i)
                for (auto j = std::next(i); j != gold.end(); ++j)
                    corpus.planted.cooc_edges.emplace(*i, *j);
        return doc;
    };

    long doc_id = 0;
    for (int i = 0; i < cfg.train_docs; ++i) corpus.train.docs.push_back(make_doc(doc_id++, true));
    for (int i = 0; i < cfg.val_docs; ++i) corpus.val.docs.push_back(make_doc(doc_id++, false));
    for (int i = 0; i < cfg.test_docs; ++i) corpus.test.docs.push_back(make_doc(doc_id++, false));
    return corpus;
}

Dataset read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset: " + path);
    Dataset ds;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        LabeledDoc d;
        try {
            d.doc_id = j.at("doc_id").get<long>();
            d.tokens = j.at("tokens").get<std::vector<int>>();
            d.labels = j.at("labels").get<std::vector<std::string>>();
        } catch (const json::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        ds.docs.push_back(std::move(d));
    }
    return ds;
}

void write_jsonl(const std::string& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset: " + path);
    for (const auto& d : ds.docs) {
        json j;
        j["doc_id"] = d.doc_id;
        j["tokens"] = d.tokens;
        j["labels"] = d.labels;
        out << j.dump() << "\n";
    }
}

Vocab read_vocab(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open vocab: " + path);
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) words.push_back(line);
    return Vocab::from_words(std::move(words));
}

void write_vocab(const std::string& path, const Vocab& v) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write vocab: " + path);
    for (const auto& w : v.words) out << w << "\n";
}

std::string planted_to_json(const PlantedRecord& r) {
    json j;
    j["cliques"] = r.cliques;
    j["signatures"] = r.signatures;
    json edges = json::array();
    for (const auto& [a, b] : r.cooc_edges) edges.push_back(json::array({a, b}));
    j["cooc_edges"] = std::move(edges);
    return j.dump(2);
}

PlantedRecord planted_from_json(const std::string& text) {
    json j = json::parse(text);
    PlantedRecord r;
    r.cliques = j.at("cliques").get<std::vector<std::vector<std::string>>>();
    r.signatures = j.at("signatures").get<std::map<std::string, std::vector<int>>>();
    for (const auto& e : j.at("cooc_edges"))
        r.cooc_edges.emplace(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    return r;
}

namespace {

std::map<std::string, std::string> parse_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": expected key=value");
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

}  // namespace

GenConfig parse_gen_config(const std::string& path) {
    GenConfig cfg;
    for (const auto& [key, value] : parse_kv_file(path)) {
        if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "tree_branching") cfg.tree_branching = std::stoi(value);
        else if (key == "tree_depth") cfg.tree_depth = std::stoi(value);
        else if (key == "num_labels") cfg.num_labels = std::stoi(value);
        else if (key == "vocab_size") cfg.vocab_size = std::stoi(value);
        else if (key == "sig_tokens_per_code") cfg.sig_tokens_per_code = std::stoi(value);
        else if (key == "train_docs") cfg.train_docs = std::stoi(value);
        else if (key == "val_docs") cfg.val_docs = std::stoi(value);
        else if (key == "test_docs") cfg.test_docs = std::stoi(value);
        else if (key == "labels_per_doc_mean") cfg.labels_per_doc_mean = std::stod(value);
        else if (key == "labels_per_doc_cap") cfg.labels_per_doc_cap = std::stoi(value);
        else if (key == "clique_count") cfg.clique_count = std::stoi(value);
        else if (key == "clique_size") cfg.clique_size = std::stoi(value);
        else if (key == "clique_prob") cfg.clique_prob = std::stod(value);
        else if (key == "noise_rate") cfg.noise_rate = std::stod(value);
        else if (key == "hidden_label_rate") cfg.hidden_label_rate = std::stod(value);
        else if (key == "power_law_labels") cfg.power_law_labels = (value == "true" || value == "1");
        else if (key == "power_law_exp") cfg.power_law_exp = std::stod(value);
        else throw std::runtime_error(path + ": unknown gen config key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

void write_gen_config(const std::string& path, const GenConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config: " + path);
    out << "seed = " << cfg.seed << "\n"
        << "tree_branching = " << cfg.tree_branching << "\n"
        << "tree_depth = " << cfg.tree_depth << "\n"
        << "num_labels = " << cfg.num_labels << "\n"
        << "vocab_size = " << cfg.vocab_size << "\n"
        << "sig_tokens_per_code = " << cfg.sig_tokens_per_code << "\n"
        << "train_docs = " << cfg.train_docs << "\n"
        << "val_docs = " << cfg.val_docs << "\n"
        << "test_docs = " << cfg.test_docs << "\n"
        << "labels_per_doc_mean = " << cfg.labels_per_doc_mean << "\n"
        << "labels_per_doc_cap = " << cfg.labels_per_doc_cap << "\n"
        << "clique_count = " << cfg.clique_count << "\n"
        << "clique_size = " << cfg.clique_size << "\n"
        << "clique_prob = " << cfg.clique_prob << "\n"
        << "noise_rate = " << cfg.noise_rate << "\n"
        << "hidden_label_rate = " << cfg.hidden_label_rate << "\n"
        << "power_law_labels = " << (cfg.power_law_labels ? "true" : "false") << "\n"
        << "power_law_exp = " << cfg.power_law_exp << "\n";
}

}  // namespace hienet
