#include "hienet/code_tree.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hienet {

using nlohmann::json;

std::vector<std::string> tokenize_whitespace(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

std::vector<std::string> CodeTree::prefix_chain(const std::string& code) {
    std::vector<std::string> chain;
    std::string s = code;
    while (true) {
        if (!s.empty() && s.back() == '.') {
            s.pop_back();
            if (!s.empty()) chain.push_back(s);
            continue;
        }
        auto dot = s.find('.');
        if (dot != std::string::npos) {
            s.pop_back();
            if (!s.empty() && s.back() != '.') chain.push_back(s);
            continue;
        }
        if (s.size() > 3) {
            s.pop_back();
            chain.push_back(s);
            continue;
        }
        break;
    }
    return chain;
}

CodeTree CodeTree::build(const std::vector<std::pair<std::string, std::string>>& codes) {
    CodeTree t;
    CodeNode root;
    root.code = "";
    root.depth = 0;
    root.parent = -1;
    t.nodes_.push_back(root);

    std::vector<std::pair<std::string, std::string>> sorted = codes;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i].first.empty()) throw std::invalid_argument("build_tree: empty code string");
        if (i > 0 && sorted[i].first == sorted[i - 1].first)
            throw std::invalid_argument("build_tree: duplicate code '" + sorted[i].first + "'");
    }

    // Sorted insertion guarantees every prefix parent is already present,
    // and children end up in lexicographic order.
    for (const auto& [code, desc] : sorted) {
        int parent = 0;
        for (const std::string& pref : prefix_chain(code)) {
            auto it = t.by_code_.find(pref);
            if (it != t.by_code_.end()) {
                parent = it->second;
                break;
            }
        }
        CodeNode n;
        n.code = code;
        n.description = desc;
        n.desc_words = tokenize_whitespace(desc);
        n.parent = parent;
        n.depth = t.nodes_[parent].depth + 1;
        n.child_index = static_cast<int>(t.nodes_[parent].children.size());
        const int idx = static_cast<int>(t.nodes_.size());
        t.nodes_.push_back(std::move(n));
        t.nodes_[parent].children.push_back(idx);
        t.by_code_[code] = idx;
    }

    for (const auto& n : t.nodes_) {
        t.max_branching_ = std::max(t.max_branching_, static_cast<int>(n.children.size()));
        t.max_depth_ = std::max(t.max_depth_, n.depth);
    }
    for (const auto& [code, idx] : t.by_code_) {
        t.label_idx_[code] = static_cast<int>(t.labels_.size());
        t.labels_.push_back(code);
    }
    return t;
}

int CodeTree::index_of(const std::string& code) const {
    if (code.empty()) return 0;
    auto it = by_code_.find(code);
    if (it == by_code_.end())
        throw std::out_of_range("code '" + code + "' not in tree");
    return it->second;
}

int CodeTree::label_index(const std::string& code) const {
    auto it = label_idx_.find(code);
    if (it == label_idx_.end())
        throw std::out_of_range("code '" + code + "' not in tree");
    return it->second;
}

std::optional<std::string> CodeTree::parent(const std::string& code) const {
    const CodeNode& n = node(index_of(code));
    if (n.parent < 0) return std::nullopt;
    if (nodes_[n.parent].code.empty()) return std::nullopt;  // virtual root
    return nodes_[n.parent].code;
}

std::vector<std::string> CodeTree::siblings(const std::string& code) const {
    const int idx = index_of(code);
    const CodeNode& n = nodes_[idx];
    std::vector<std::string> out;
    if (n.parent < 0) return out;
    for (int c : nodes_[n.parent].children)
        if (c != idx) out.push_back(nodes_[c].code);
    return out;
}

bool CodeTree::is_ancestor(const std::string& ancestor, const std::string& descendant) const {
    int a = index_of(ancestor);
    int d = index_of(descendant);
    while (d >= 0) {
        d = nodes_[d].parent;
        if (d == a) return true;
    }
    return false;
}

std::vector<MePair> CodeTree::me_pairs(const std::vector<std::string>& labels) const {
    std::vector<std::string> ls = labels;
    std::sort(ls.begin(), ls.end());
    ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
    for (const auto& l : ls) index_of(l);  // validate membership

    std::vector<MePair> out;
    for (std::size_t i = 0; i < ls.size(); ++i) {
        for (std::size_t j = i + 1; j < ls.size(); ++j) {
            if (is_ancestor(ls[i], ls[j]))
                out.push_back({ls[i], ls[j], MePairKind::ParentChild});
            else if (is_ancestor(ls[j], ls[i]))
                out.push_back({ls[j], ls[i], MePairKind::ParentChild});
            else if (nodes_[index_of(ls[i])].parent == nodes_[index_of(ls[j])].parent)
                out.push_back({ls[i], ls[j], MePairKind::Sibling});
        }
    }
    return out;
}

namespace {

json node_to_json(const CodeTree& t, int idx) {
    const CodeNode& n = t.node(idx);
    json j;
    j["code"] = n.code;
    j["description"] = n.description;
    j["child_index"] = n.child_index;
    j["depth"] = n.depth;
    json kids = json::array();
    for (int c : n.children) kids.push_back(node_to_json(t, c));
    j["children"] = std::move(kids);
    return j;
}

void collect_codes(const json& j, std::vector<std::pair<std::string, std::string>>& out) {
    const std::string code = j.at("code").get<std::string>();
    if (!code.empty()) out.emplace_back(code, j.at("description").get<std::string>());
    for (const auto& c : j.at("children")) collect_codes(c, out);
}

}  // namespace

std::string CodeTree::to_json() const {
    json j;
    j["format"] = "hienet-tree-v1";
    j["max_branching"] = max_branching_;
    j["max_depth"] = max_depth_;
    j["root"] = node_to_json(*this, 0);
    return j.dump(2);
}

CodeTree CodeTree::from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.at("format").get<std::string>() != "hienet-tree-v1")
        throw std::invalid_argument("tree file: unknown format");
    std::vector<std::pair<std::string, std::string>> codes;
    collect_codes(j.at("root"), codes);
    return build(codes);
}

std::vector<std::pair<std::string, std::string>> read_codes_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open codes file: " + path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected code<TAB>description");
        out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    return out;
}

void write_codes_tsv(const std::string& path,
                     const std::vector<std::pair<std::string, std::string>>& codes) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write codes file: " + path);
    for (const auto& [c, d] : codes) out << c << '\t' << d << '\n';
}

}  // namespace hienet
