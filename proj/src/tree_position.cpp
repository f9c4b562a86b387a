#include "hienet/tree_position.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hienet {

TreePosition TreePosition::root(int n, int k) {
    if (n < 1 || k < 1) throw std::invalid_argument("tree position: n and k must be >= 1");
    TreePosition p;
    p.n = n;
    p.k = k;
    p.vec.assign(static_cast<std::size_t>(n) * k, 0.0);
    return p;
}

int TreePosition::depth() const {
    for (int b = k - 1; b >= 0; --b) {
        bool zero = true;
        for (int i = 0; i < n; ++i)
            if (vec[static_cast<std::size_t>(b) * n + i] != 0.0) zero = false;
        if (!zero) return b + 1;
    }
    return 0;
}

TreePosition down(const TreePosition& p, int child_index) {
    if (child_index < 0 || child_index >= p.n)
        throw std::out_of_range("down: child index " + std::to_string(child_index) +
                                " outside branching capacity n=" + std::to_string(p.n));
    if (p.depth() >= p.k)
        throw std::overflow_error("down: depth capacity exceeded (n=" + std::to_string(p.n) +
                                  ", k=" + std::to_string(p.k) + ")");
    TreePosition q = TreePosition::root(p.n, p.k);
    q.vec[static_cast<std::size_t>(child_index)] = 1.0;
    std::copy(p.vec.begin(), p.vec.end() - p.n, q.vec.begin() + p.n);
    return q;
}

TreePosition up(const TreePosition& p) {
    if (p.is_root()) throw std::underflow_error("up: position is already the root");
    TreePosition q = TreePosition::root(p.n, p.k);
    std::copy(p.vec.begin() + p.n, p.vec.end(), q.vec.begin());
    return q;
}

TreePosition encode_path(const CodeTree& t, const std::string& code, int n, int k) {
    if (n < t.max_branching())
        throw std::invalid_argument("encode_path: n=" + std::to_string(n) +
                                    " below tree branching " + std::to_string(t.max_branching()));
    if (k < t.max_depth())
        throw std::invalid_argument("encode_path: k=" + std::to_string(k) +
                                    " below tree depth " + std::to_string(t.max_depth()));
    int idx = t.index_of(code);
    std::vector<int> path;  // child indices from root down to the node
    while (idx > 0) {
        path.push_back(t.node(idx).child_index);
        idx = t.node(idx).parent;
    }
    TreePosition p = TreePosition::root(n, k);
    for (auto it = path.rbegin(); it != path.rend(); ++it) p = down(p, *it);
    return p;
}

PosProjection PosProjection::identity(int d) {
    PosProjection p;
    p.matrix = Tensor({d, d});
    for (int i = 0; i < d; ++i) p.matrix.at(i, i) = 1.0;
    return p;
}

PosProjection PosProjection::orthonormal(int d_e, int d_pos, std::uint64_t seed) {
    Rng rng(seed);
    using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    // QR of a seeded Gaussian matrix; take Q so the short dimension is
    // orthonormal (rows when d_e <= d_pos, columns otherwise).
    const int big = std::max(d_e, d_pos), small = std::min(d_e, d_pos);
    EMat G(big, small);
    for (int r = 0; r < big; ++r)
        for (int c = 0; c < small; ++c) G(r, c) = rng.normal();
    Eigen::HouseholderQR<EMat> qr(G);
    EMat Q = qr.householderQ() * EMat::Identity(big, small);

    PosProjection p;
    p.matrix = Tensor({d_e, d_pos});
    for (int r = 0; r < d_e; ++r)
        for (int c = 0; c < d_pos; ++c)
            p.matrix.at(r, c) = (d_e <= d_pos) ? Q(c, r) : Q(r, c);
    return p;
}

Tensor encode_all_raw(const CodeTree& t, int n, int k) {
    const int L = t.num_labels();
    Tensor raw({L, n * k});
    for (int l = 0; l < L; ++l) {
        TreePosition p = encode_path(t, t.labels()[l], n, k);
        std::copy(p.vec.begin(), p.vec.end(), raw.data.begin() + static_cast<std::size_t>(l) * n * k);
    }
    return raw;
}

Tensor project_all(const CodeTree& t, const PosProjection& proj, int n, int k) {
    if (proj.matrix.ndim() != 2 || proj.matrix.cols() != n * k)
        throw std::invalid_argument("project_all: projection " + proj.matrix.shape_str() +
                                    " does not match position width " + std::to_string(n * k));
    const int L = t.num_labels();
    const int d_e = proj.matrix.rows();
    Tensor raw = encode_all_raw(t, n, k);
    Tensor vp({d_e, L});
    using ECMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
    using EMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
    EMap(vp.data.data(), d_e, L) =
        ECMap(proj.matrix.data.data(), d_e, n * k) * ECMap(raw.data.data(), L, n * k).transpose();
    return vp;
}

void write_positions_csv(const std::string& path, const CodeTree& t, int n, int k) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "code,depth";
    for (int i = 0; i < n * k; ++i) out << ",v" << i;
    out << "\n";
    for (const auto& code : t.labels()) {
        TreePosition p = encode_path(t, code, n, k);
        out << code << "," << t.node(code).depth;
        char buf[32];
        for (double v : p.vec) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << "," << buf;
        }
        out << "\n";
    }
}

}  // namespace hienet
