#include "hienet/cooc_graph.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hienet {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EMap = Eigen::Map<EMat>;
using ECMap = Eigen::Map<const EMat>;

void check_d(double d) {
    if (!(d > 0.0 && d < 1.0))
        throw std::invalid_argument("ppr: teleport probability d=" + std::to_string(d) +
                                    " must lie in (0,1)");
}

}  // namespace

CoocGraph CoocGraph::build(int num_labels, const std::vector<std::set<int>>& label_sets,
                           bool binarize) {
    if (num_labels < 0) throw std::invalid_argument("build_graph: negative label count");
    CoocGraph g;
    g.L_ = num_labels;
    g.A_ = Tensor({num_labels, num_labels});
    for (const auto& s : label_sets) {
        for (auto i = s.begin(); i != s.end(); ++i) {
            if (*i < 0 || *i >= num_labels)
                throw std::out_of_range("build_graph: label index " + std::to_string(*i) +
                                        " out of range");
            for (auto j = std::next(i); j != s.end(); ++j) {
                g.A_.at(*i, *j) += 1.0;
                g.A_.at(*j, *i) += 1.0;
            }
        }
    }
    if (binarize)
        for (auto& w : g.A_.data) w = w > 0.0 ? 1.0 : 0.0;
    g.finalize();
    return g;
}

CoocGraph CoocGraph::from_adjacency(Tensor A) {
    if (A.ndim() != 2 || A.rows() != A.cols()) shape_error("from_adjacency", A);
    const int L = A.rows();
    for (int i = 0; i < L; ++i) {
        if (A.at(i, i) != 0.0) throw std::invalid_argument("adjacency: nonzero diagonal");
        for (int j = 0; j < L; ++j) {
            if (A.at(i, j) < 0.0) throw std::invalid_argument("adjacency: negative weight");
            if (A.at(i, j) != A.at(j, i)) throw std::invalid_argument("adjacency: not symmetric");
        }
    }
    CoocGraph g;
    g.L_ = L;
    g.A_ = std::move(A);
    g.finalize();
    return g;
}

void CoocGraph::finalize() {
    deg_.assign(L_, 0.0);
    for (int i = 0; i < L_; ++i) {
        double d = 1.0;  // self-loop
        for (int j = 0; j < L_; ++j) d += A_.at(i, j);
        deg_[i] = d;
    }
    std::vector<double> inv_sqrt(L_);
    for (int i = 0; i < L_; ++i) inv_sqrt[i] = 1.0 / std::sqrt(deg_[i]);
    A_hat_ = Tensor({L_, L_});
    for (int i = 0; i < L_; ++i) {
        for (int j = 0; j < L_; ++j) {
            const double a_tilde = A_.at(i, j) + (i == j ? 1.0 : 0.0);
            // scale product first so the matrix is bitwise symmetric
            A_hat_.at(i, j) = a_tilde * (inv_sqrt[i] * inv_sqrt[j]);
        }
    }
}

std::set<int> CoocGraph::neighbors(int c) const {
    if (c < 0 || c >= L_) throw std::out_of_range("neighbors: label index out of range");
    std::set<int> out;
    for (int j = 0; j < L_; ++j)
        if (A_.at(c, j) > 0.0) out.insert(j);
    return out;
}

std::set<int> CoocGraph::neighbor_intersection(const std::vector<int>& cs) const {
    if (cs.empty()) return {};
    std::set<int> acc = neighbors(cs[0]);
    for (std::size_t i = 1; i < cs.size() && !acc.empty(); ++i) {
        std::set<int> nb = neighbors(cs[i]);
        std::set<int> next;
        for (int x : acc)
            if (nb.count(x)) next.insert(x);
        acc = std::move(next);
    }
    return acc;
}

Tensor ppr_closed_form(const CoocGraph& g, const PprConfig& cfg, const Tensor& X) {
    check_d(cfg.d);
    const int L = g.num_labels();
    if (X.ndim() != 2 || X.rows() != L) shape_error("ppr_closed_form", X);
    EMat M = EMat::Identity(L, L) - (1.0 - cfg.d) * ECMap(g.norm_adjacency().data.data(), L, L);
    Tensor out(X.shape);
    EMap(out.data.data(), L, X.cols()) =
        Eigen::PartialPivLU<EMat>(M).solve(cfg.d * ECMap(X.data.data(), L, X.cols()));
    return out;
}

PprResult ppr_iterate(const CoocGraph& g, const PprConfig& cfg, const Tensor& X) {
    check_d(cfg.d);
    if (cfg.max_iters < 1) throw std::invalid_argument("ppr: max_iters must be >= 1");
    const int L = g.num_labels();
    if (X.ndim() != 2 || X.rows() != L) shape_error("ppr_iterate", X);
    ECMap Ah(g.norm_adjacency().data.data(), L, L);
    ECMap Xm(X.data.data(), L, X.cols());

    PprResult res;
    res.Z = X;
    EMat Z = Xm;
    for (int t = 0; t < cfg.max_iters; ++t) {
        EMat Znext = (1.0 - cfg.d) * (Ah * Z) + cfg.d * Xm;
        res.residual = (Znext - Z).cwiseAbs().maxCoeff();
        Z = std::move(Znext);
        res.iters = t + 1;
        if (res.residual <= cfg.tol) {
            res.converged = true;
            break;
        }
    }
    EMap(res.Z.data.data(), L, X.cols()) = Z;
    return res;
}

void CoocGraph::write_edges_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "# labels=" << L_ << "\n";
    out << "i,j,weight\n";
    char buf[32];
    for (int i = 0; i < L_; ++i)
        for (int j = i + 1; j < L_; ++j)
            if (A_.at(i, j) > 0.0) {
                std::snprintf(buf, sizeof(buf), "%.17g", A_.at(i, j));
                out << i << "," << j << "," << buf << "\n";
            }
}

CoocGraph CoocGraph::read_edges_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# labels=", 0) != 0)
        throw std::runtime_error(path + ": missing '# labels=' header");
    const int L = std::stoi(line.substr(9));
    if (!std::getline(in, line) || line != "i,j,weight")
        throw std::runtime_error(path + ": missing 'i,j,weight' header");
    Tensor A({L, L});
    int lineno = 2;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream is(line);
        int i, j;
        double w;
        char c1, c2;
        if (!(is >> i >> c1 >> j >> c2 >> w) || c1 != ',' || c2 != ',')
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed edge row");
        if (i < 0 || j < 0 || i >= L || j >= L || i == j)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad edge indices");
        A.at(i, j) = w;
        A.at(j, i) = w;
    }
    return from_adjacency(std::move(A));
}

Tensor read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream is(line);
        std::string cell;
        while (std::getline(is, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows[0].size())
            throw std::runtime_error(path + ": ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) return Tensor({0, 0});
    Tensor m({static_cast<int>(rows.size()), static_cast<int>(rows[0].size())});
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            m.at(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
    return m;
}

void write_matrix_csv(const std::string& path, const Tensor& m) {
    if (m.ndim() != 2) shape_error("write_matrix_csv", m);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    char buf[32];
    for (int r = 0; r < m.rows(); ++r) {
        for (int c = 0; c < m.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", m.at(r, c));
            out << (c ? "," : "") << buf;
        }
        out << "\n";
    }
}

}  // namespace hienet
