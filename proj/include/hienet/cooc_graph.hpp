#pragma once

#include <set>
#include <string>
#include <vector>

#include "hienet/tensor.hpp"

namespace hienet {

struct PprConfig {
    double d = 0.5;        // teleport probability, in (0,1)
    int max_iters = 50;
    double tol = 1e-10;    // max-abs residual
};

struct PprResult {
    Tensor Z;  // [L, d_e]
    bool converged = false;
    int iters = 0;
    double residual = 0.0;
};

// Label co-occurrence graph. A is symmetric with zero diagonal; A_hat is the
// symmetrically normalized adjacency with self-loops. Immutable after build.
class CoocGraph {
public:
    // Every unordered pair within a label set becomes an edge (clique).
    // Weights are binary by default; pass binarize=false to keep pair counts.
    static CoocGraph build(int num_labels, const std::vector<std::set<int>>& label_sets,
                           bool binarize = true);
    static CoocGraph from_adjacency(Tensor A);

    int num_labels() const { return L_; }
    const Tensor& adjacency() const { return A_; }       // [L, L]
    const Tensor& norm_adjacency() const { return A_hat_; }  // [L, L]
    double degree_tilde(int i) const { return deg_[i]; }

    std::set<int> neighbors(int c) const;
    std::set<int> neighbor_intersection(const std::vector<int>& cs) const;

    void write_edges_csv(const std::string& path) const;
    static CoocGraph read_edges_csv(const std::string& path);

private:
    void finalize();

    int L_ = 0;
    Tensor A_;      // co-occurrence weights
    Tensor A_hat_;  // D^-1/2 (A+I) D^-1/2
    std::vector<double> deg_;
};

// d * (I - (1-d) * A_hat)^{-1} * X via a linear solve. X is [L, d_e].
Tensor ppr_closed_form(const CoocGraph& g, const PprConfig& cfg, const Tensor& X);

// Fixed-point iteration Z <- (1-d) * A_hat * Z + d * X from Z = X.
PprResult ppr_iterate(const CoocGraph& g, const PprConfig& cfg, const Tensor& X);

Tensor read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Tensor& m);

}  // namespace hienet
