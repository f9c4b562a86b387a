#include <doctest.h>

#include <algorithm>
#include <set>

#include "hienet/code_tree.hpp"
#include "hienet/rng.hpp"

using namespace hienet;

namespace {

std::vector<std::pair<std::string, std::string>> chain_codes() {
    return {{"521", "dental caries"}, {"521.0", "caries"}, {"521.00", "caries unspecified"}};
}

// Random tree over synthetic code strings; returns the (code, parent) truth.
std::vector<std::pair<std::string, std::string>> random_code_set(Rng& rng, int n_categories,
                                                                 int max_children) {
    std::vector<std::pair<std::string, std::string>> codes;
    for (int c = 0; c < n_categories; ++c) {
        const std::string cat = std::to_string(100 + c);
        codes.emplace_back(cat, "cat " + cat);
        const int kids = rng.uniform_int(max_children + 1);
        for (int k = 0; k < kids; ++k) {
            const std::string child = cat + "." + std::to_string(k);
            codes.emplace_back(child, "child");
            const int grand = rng.uniform_int(3);
            for (int g = 0; g < grand; ++g)
                codes.emplace_back(child + std::to_string(g), "grandchild");
        }
    }
    return codes;
}

}  // namespace

TEST_CASE("chain 521 -> 521.0 -> 521.00") {
    CodeTree t = CodeTree::build(chain_codes());
    CHECK(t.parent("521.00").value() == "521.0");
    CHECK(t.parent("521.0").value() == "521");
    CHECK_FALSE(t.parent("521").has_value());
    CHECK(t.node("521.00").depth == 3);
    CHECK(t.max_depth() == 3);
}

TEST_CASE("empty input gives a tree with only the virtual root") {
    CodeTree t = CodeTree::build({});
    CHECK(t.num_labels() == 0);
    CHECK(t.max_depth() == 0);
    CHECK(t.num_nodes() == 1);
}

TEST_CASE("balanced 3-level branching-4 tree has 85 nodes including root") {
    // enumerate the generated nodes: 4 + 16 + 64 children plus the root
    std::vector<std::pair<std::string, std::string>> codes;
    int expected = 1;
    for (int a = 0; a < 4; ++a) {
        const std::string cat = std::to_string(200 + a);
        codes.emplace_back(cat, "d");
        ++expected;
        for (int b = 0; b < 4; ++b) {
            codes.emplace_back(cat + "." + std::to_string(b), "d");
            ++expected;
            for (int c = 0; c < 4; ++c) {
                codes.emplace_back(cat + "." + std::to_string(b) + std::to_string(c), "d");
                ++expected;
            }
        }
    }
    CHECK(expected == 85);
    CodeTree t = CodeTree::build(codes);
    CHECK(t.num_nodes() == 85);
    CHECK(t.max_branching() == 4);
    CHECK(t.max_depth() == 3);
}

TEST_CASE("duplicate code is rejected with the offending code named") {
    CHECK_THROWS_WITH_AS(CodeTree::build({{"401", "a"}, {"401", "b"}}),
                         doctest::Contains("401"), std::invalid_argument);
}

TEST_CASE("codes with an absent prefix attach to the virtual root") {
    CodeTree t = CodeTree::build({{"464.01", "x"}, {"15.9", "y"}});
    CHECK_FALSE(t.parent("464.01").has_value());
    CHECK_FALSE(t.parent("15.9").has_value());
    CHECK(t.node("464.01").depth == 1);
}

TEST_CASE("prefix rule applies dot truncation then digit truncation") {
    CHECK(CodeTree::prefix_chain("521.00") == std::vector<std::string>{"521.0", "521"});
    CHECK(CodeTree::prefix_chain("464.01") == std::vector<std::string>{"464.0", "464"});
    CHECK(CodeTree::prefix_chain("22.0") == std::vector<std::string>{"22"});
    CHECK(CodeTree::prefix_chain("521") == std::vector<std::string>{});
    // longest present prefix wins even when the chain has gaps
    CodeTree t = CodeTree::build({{"464", "a"}, {"464.01", "b"}});
    CHECK(t.parent("464.01").value() == "464");
}

TEST_CASE("parent of 464.01 is 464.0 when present") {
    CodeTree t = CodeTree::build({{"464", "a"}, {"464.0", "b"}, {"464.01", "c"}});
    CHECK(t.parent("464.01").value() == "464.0");
}

TEST_CASE("unknown code raises a lookup error") {
    CodeTree t = CodeTree::build(chain_codes());
    CHECK_THROWS_AS(t.parent("999"), std::out_of_range);
    CHECK_THROWS_AS(t.siblings("999"), std::out_of_range);
}

TEST_CASE("siblings: 464.00 and 464.01 are siblings") {
    CodeTree t = CodeTree::build({{"464.00", "without obstruction"},
                                  {"464.01", "with obstruction"},
                                  {"464.0", "acute laryngitis"}});
    auto sibs = t.siblings("464.00");
    CHECK(std::find(sibs.begin(), sibs.end(), "464.01") != sibs.end());
    CHECK(sibs.size() == 1);
}

TEST_CASE("only child has no siblings") {
    CodeTree t = CodeTree::build({{"401", "a"}, {"401.0", "b"}});
    CHECK(t.siblings("401.0").empty());
}

TEST_CASE("balanced branching-4 node has exactly 3 siblings") {
    std::vector<std::pair<std::string, std::string>> codes = {{"300", "cat"}};
    for (int i = 0; i < 4; ++i) codes.emplace_back("300." + std::to_string(i), "child");
    CodeTree t = CodeTree::build(codes);
    CHECK(t.siblings("300.2").size() == 3);
}

TEST_CASE("me_pairs on a chain of three yields three parent-child pairs") {
    CodeTree t = CodeTree::build(chain_codes());
    auto pairs = t.me_pairs({"521", "521.0", "521.00"});
    CHECK(pairs.size() == 3);
    for (const auto& p : pairs) CHECK(p.kind == MePairKind::ParentChild);
}

TEST_CASE("me_pairs flags the 464.00/464.01 sibling pair") {
    CodeTree t = CodeTree::build({{"464.0", "p"}, {"464.00", "a"}, {"464.01", "b"}});
    auto pairs = t.me_pairs({"464.00", "464.01"});
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].kind == MePairKind::Sibling);
    CHECK(pairs[0].a == "464.00");
    CHECK(pairs[0].b == "464.01");
}

TEST_CASE("me_pairs on disjoint subtrees is empty") {
    CodeTree t = CodeTree::build({{"100", "a"}, {"100.0", "b"}, {"200", "c"}, {"200.0", "d"}});
    CHECK(t.me_pairs({"100.0", "200.0"}).empty());
}

TEST_CASE("structural invariants on random trees") {
    Rng rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        auto codes = random_code_set(rng, 4, 4);
        CodeTree t = CodeTree::build(codes);
        for (const auto& code : t.labels()) {
            const CodeNode& n = t.node(code);
            // child is registered under its parent at its child_index
            const CodeNode& p = t.node(n.parent);
            REQUIRE(n.child_index < static_cast<int>(p.children.size()));
            CHECK(t.node(p.children[n.child_index]).code == code);
            CHECK(n.depth == p.depth + 1);
        }
    }
}

TEST_CASE("build is deterministic under input permutation") {
    Rng rng(123);
    auto codes = random_code_set(rng, 5, 4);
    CodeTree a = CodeTree::build(codes);
    for (int i = static_cast<int>(codes.size()) - 1; i > 0; --i)
        std::swap(codes[i], codes[rng.uniform_int(i + 1)]);
    CodeTree b = CodeTree::build(codes);
    CHECK(a.to_json() == b.to_json());
}

TEST_CASE("tree JSON round-trips") {
    Rng rng(7);
    CodeTree a = CodeTree::build(random_code_set(rng, 3, 3));
    CodeTree b = CodeTree::from_json(a.to_json());
    CHECK(a.to_json() == b.to_json());
    CHECK(a.num_labels() == b.num_labels());
}

TEST_CASE("children are ordered lexicographically") {
    CodeTree t = CodeTree::build({{"100.1", "b"}, {"100", "p"}, {"100.0", "a"}, {"100.2", "c"}});
    const CodeNode& root_cat = t.node("100");
    REQUIRE(root_cat.children.size() == 3);
    CHECK(t.node(root_cat.children[0]).code == "100.0");
    CHECK(t.node(root_cat.children[1]).code == "100.1");
    CHECK(t.node(root_cat.children[2]).code == "100.2");
    CHECK(t.node("100.1").child_index == 1);
}
