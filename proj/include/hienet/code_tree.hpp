#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hienet {

// Node of the code taxonomy. Index 0 is always the virtual root (empty code).
struct CodeNode {
    std::string code;
    std::string description;
    std::vector<std::string> desc_words;  // whitespace-tokenized description
    int parent = -1;
    std::vector<int> children;
    int depth = 0;
    int child_index = 0;  // position among siblings
};

enum class MePairKind { ParentChild, Sibling };

struct MePair {
    std::string a;  // ancestor (or first sibling)
    std::string b;
    MePairKind kind;
};

// Rooted taxonomy over dot-structured code strings. Immutable after build;
// safe for concurrent reads.
class CodeTree {
public:
    static CodeTree build(const std::vector<std::pair<std::string, std::string>>& codes);

    const CodeNode& node(int idx) const { return nodes_.at(idx); }
    const CodeNode& node(const std::string& code) const { return nodes_.at(index_of(code)); }
    int index_of(const std::string& code) const;
    bool contains(const std::string& code) const { return by_code_.count(code) > 0; }

    int num_nodes() const { return static_cast<int>(nodes_.size()); }  // incl. virtual root
    int max_branching() const { return max_branching_; }
    int max_depth() const { return max_depth_; }

    std::optional<std::string> parent(const std::string& code) const;
    std::vector<std::string> siblings(const std::string& code) const;
    // Detects parent-child (any ancestor/descendant) and same-parent pairs
    // within a label set. Diagnostic only.
    std::vector<MePair> me_pairs(const std::vector<std::string>& labels) const;

    bool is_ancestor(const std::string& ancestor, const std::string& descendant) const;

    // All codes (non-root), lexicographically sorted; index here is the label
    // index used by the graph and the model.
    const std::vector<std::string>& labels() const { return labels_; }
    int label_index(const std::string& code) const;
    int num_labels() const { return static_cast<int>(labels_.size()); }

    std::string to_json() const;
    static CodeTree from_json(const std::string& text);

    // Longest-prefix chain generator: dot truncation first, then digit
    // truncation down to the 3-character category.
    static std::vector<std::string> prefix_chain(const std::string& code);

private:
    std::vector<CodeNode> nodes_;
    std::map<std::string, int> by_code_;
    std::map<std::string, int> label_idx_;
    std::vector<std::string> labels_;
    int max_branching_ = 0;
    int max_depth_ = 0;
};

std::vector<std::string> tokenize_whitespace(const std::string& text);

// One record per line: code<TAB>description.
std::vector<std::pair<std::string, std::string>> read_codes_tsv(const std::string& path);
void write_codes_tsv(const std::string& path,
                     const std::vector<std::pair<std::string, std::string>>& codes);

}  // namespace hienet
