#pragma once

#include <memory>
#include <string>
#include <vector>

#include "core/nn/tensor.hpp"
#include "core/rng.hpp"

namespace eegsz::nn {

/// Serializable layer description: kind plus integer/real hyperparameters.
/// The factory in network.cpp rebuilds layers from these when loading a
/// checkpoint.
struct LayerSpec {
    std::string kind;
    std::vector<long long> ints;
    std::vector<double> reals;
};

class Layer {
public:
    virtual ~Layer() = default;

    virtual LayerSpec spec() const = 0;
    std::string kind() const { return spec().kind; }

    /// Caches for backward are written only when training is true; an
    /// inference-mode forward performs no writes to shared state.
    virtual Tensor forward(const Tensor& x, bool training) = 0;
    virtual Tensor backward(const Tensor& grad_out) = 0;

    virtual std::vector<Tensor*> params() { return {}; }
    virtual std::vector<Tensor*> grads() { return {}; }
    /// Non-trainable buffers (batchnorm running statistics).
    virtual std::vector<Tensor*> state() { return {}; }

    virtual void init(Rng&) {}

    virtual std::vector<size_t> output_shape(const std::vector<size_t>& in) const = 0;
};

std::unique_ptr<Layer> make_layer(const LayerSpec& spec);

std::unique_ptr<Layer> make_conv2d(size_t in_ch, size_t out_ch, size_t kh, size_t kw,
                                   size_t sh, size_t sw, size_t ph, size_t pw);
std::unique_ptr<Layer> make_tconv2d(size_t in_ch, size_t out_ch, size_t kh, size_t kw,
                                    size_t sh, size_t sw, size_t ph, size_t pw);
std::unique_ptr<Layer> make_maxpool2d(size_t kh, size_t kw);
std::unique_ptr<Layer> make_dense(size_t in_features, size_t out_features);
std::unique_ptr<Layer> make_batchnorm(size_t channels, double momentum = 0.1,
                                      double eps = 1e-5);
std::unique_ptr<Layer> make_leaky_relu(double alpha = 0.2);
std::unique_ptr<Layer> make_sigmoid();
std::unique_ptr<Layer> make_flatten();
std::unique_ptr<Layer> make_reshape(std::vector<size_t> target);  // without batch dim

} // namespace eegsz::nn
