#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "hienet/rng.hpp"

namespace hienet {

// Dense row-major tensor of doubles. Rank 1 ({n}) and rank 2 ({rows, cols})
// cover everything the model needs; a scalar is {1}.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> shp) : shape(std::move(shp)) {
        data.assign(static_cast<std::size_t>(numel()), 0.0);
    }

    static Tensor zeros(std::vector<int> shp) { return Tensor(std::move(shp)); }

    static Tensor full(std::vector<int> shp, double v) {
        Tensor t(std::move(shp));
        for (auto& x : t.data) x = v;
        return t;
    }

    static Tensor scalar(double v) {
        Tensor t({1});
        t.data[0] = v;
        return t;
    }

    static Tensor randn(std::vector<int> shp, Rng& rng, double stddev = 1.0) {
        Tensor t(std::move(shp));
        for (auto& x : t.data) x = stddev * rng.normal();
        return t;
    }

    static Tensor from_rows(int rows, int cols, std::vector<double> values) {
        Tensor t({rows, cols});
        if (static_cast<int>(values.size()) != rows * cols)
            throw std::invalid_argument("from_rows: value count mismatch");
        t.data = std::move(values);
        return t;
    }

    int numel() const {
        int n = 1;
        for (int d : shape) {
            if (d < 0) throw std::invalid_argument("negative dimension");
            n *= d;
        }
        return n;
    }

    int ndim() const { return static_cast<int>(shape.size()); }
    int rows() const { return shape.at(0); }
    int cols() const { return shape.at(1); }

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols() + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols() + c]; }
    double& operator[](int i) { return data[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return data[static_cast<std::size_t>(i)]; }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }

    std::string shape_str() const {
        std::string s = "[";
        for (std::size_t i = 0; i < shape.size(); ++i) {
            if (i) s += "x";
            s += std::to_string(shape[i]);
        }
        return s + "]";
    }
};

[[noreturn]] inline void shape_error(const std::string& op, const Tensor& a, const Tensor& b) {
    throw std::invalid_argument(op + ": incompatible shapes " + a.shape_str() + " and " +
                                b.shape_str());
}

[[noreturn]] inline void shape_error(const std::string& op, const Tensor& a) {
    throw std::invalid_argument(op + ": bad shape " + a.shape_str());
}

}  // namespace hienet
