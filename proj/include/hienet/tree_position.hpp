#pragma once

#include <string>

#include "hienet/code_tree.hpp"
#include "hienet/tensor.hpp"

namespace hienet {

// Stack of one-hot path segments, width n (branching capacity) per block,
// k blocks (depth capacity). Descending pushes a segment at the front,
// ascending pops it; zero blocks occupy only the suffix.
struct TreePosition {
    std::vector<double> vec;  // length n*k
    int n = 0;
    int k = 0;

    static TreePosition root(int n, int k);
    int depth() const;  // number of nonzero blocks
    bool is_root() const { return depth() == 0; }
};

// Push child segment i: one-hot e_i prepended, last block dropped.
TreePosition down(const TreePosition& p, int child_index);
// Pop the top segment: first block dropped, zero block appended. Exact
// inverse of down on valid positions.
TreePosition up(const TreePosition& p);

// Composition of down ops along the root->code path, using each node's
// child_index. The root encodes as the zero vector.
TreePosition encode_path(const CodeTree& t, const std::string& code, int n, int k);

// Reconciles the n*k position width with the embedding width d_e.
struct PosProjection {
    Tensor matrix;  // [d_e, n*k]

    // Orthonormal rows (or columns when d_pos < d_e) from a seeded QR.
    static PosProjection orthonormal(int d_e, int d_pos, std::uint64_t seed);
    static PosProjection identity(int d);
};

// Column l = proj * encode_path(label l). Returns [d_e, L].
Tensor project_all(const CodeTree& t, const PosProjection& proj, int n, int k);

// Raw positions as rows: [L, n*k], row order = label order.
Tensor encode_all_raw(const CodeTree& t, int n, int k);

void write_positions_csv(const std::string& path, const CodeTree& t, int n, int k);

}  // namespace hienet
