#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace eegsz::nn {

/// Row-major dense tensor. Layer code treats 4-D tensors as
/// (batch, channels, height, width) and 2-D as (batch, features).
struct Tensor {
    std::vector<size_t> shape;
    std::vector<double> values;

    Tensor() = default;
    explicit Tensor(std::vector<size_t> s) : shape(std::move(s)) {
        values.assign(numel_of(shape), 0.0);
    }
    Tensor(std::vector<size_t> s, std::vector<double> v)
        : shape(std::move(s)), values(std::move(v)) {
        if (values.size() != numel_of(shape)) {
            throw_config("tensor: value count does not match shape");
        }
    }

    static size_t numel_of(const std::vector<size_t>& s) {
        size_t n = 1;
        for (size_t d : s) n *= d;
        return s.empty() ? 0 : n;
    }

    size_t numel() const { return values.size(); }
    size_t dim(size_t i) const { return shape[i]; }
    size_t rank() const { return shape.size(); }

    double* data() { return values.data(); }
    const double* data() const { return values.data(); }

    void fill(double v) { std::fill(values.begin(), values.end(), v); }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    static std::string shape_str(const std::vector<size_t>& s) {
        std::string out = "(";
        for (size_t i = 0; i < s.size(); ++i) {
            if (i) out += "x";
            out += std::to_string(s[i]);
        }
        return out + ")";
    }
};

} // namespace eegsz::nn
