#pragma once

#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/nn/network.hpp"
#include "core/wavelet.hpp"

namespace eegsz {

struct ConvBlockSpec {
    size_t filters, kh, kw, sh, sw, ph, pw;
};

struct TconvBlockSpec {
    size_t filters, kh, kw, sh, sw, ph, pw;
    bool batchnorm = true;
};

/// Hourglass architecture over stacked band windows: the input is one
/// channel of shape (bands x window), the encoder compresses it to a dense
/// bottleneck, and the decoder mirrors back to the input shape.
struct CaeConfig {
    size_t bands = 5;
    size_t window = 512;
    std::vector<ConvBlockSpec> encoder = {
        {8, 3, 7, 1, 4, 1, 3},
        {16, 3, 5, 1, 4, 1, 2},
        {24, 5, 3, 1, 4, 0, 1},
    };
    std::vector<TconvBlockSpec> decoder = {
        {16, 5, 4, 1, 4, 0, 0, true},
        {8, 3, 4, 1, 4, 1, 0, true},
        {1, 3, 4, 1, 4, 1, 0, false},
    };
    size_t bottleneck = 64;
    double alpha = 0.2;          // leaky-relu negative slope
    double learning_rate = 1e-3;
    size_t epochs = 20;
    size_t batch_size = 16;
    uint64_t seed = 1;
    std::string wavelet = "db4";
};

class Cae {
public:
    static Cae build(const CaeConfig& config);

    const CaeConfig& config() const { return cfg_; }
    nn::ParamCounts param_counts() const { return net_.param_counts(); }
    size_t bottleneck_width() const { return cfg_.bottleneck; }

    /// Minimizes the mean reconstruction cost with Adam. Records the mean
    /// epoch loss; throws a numeric error naming the epoch on divergence.
    void train(const std::vector<nn::Tensor>& inputs, size_t epochs, size_t batch_size);
    void train(const std::vector<nn::Tensor>& inputs) {
        train(inputs, cfg_.epochs, cfg_.batch_size);
    }

    const std::vector<double>& loss_history() const { return loss_history_; }

    /// Flattened bottleneck activations (inference-mode batchnorm).
    std::vector<double> encode(const nn::Tensor& input);

    /// 0.5 * ||D(E(z)) - z||^2 for a single input.
    double reconstruction_error(const nn::Tensor& input);

    /// Mean reconstruction cost over a dataset, evaluated in one batched
    /// inference pass.
    double dataset_loss(const std::vector<nn::Tensor>& inputs);

    void save(const std::string& path) const;
    static Cae load(const std::string& path);

    nn::Network& network() { return net_; }

private:
    CaeConfig cfg_;
    nn::Network net_;
    size_t encoder_layers_ = 0;  // layers up to and including the bottleneck dense
    nn::Adam adam_;
    std::vector<double> loss_history_;
};

/// Per channel and window: a (1 x bands x window) tensor stacking the
/// delta..gamma band slices. Each full-length band signal is z-scored per
/// channel before windowing; constant bands become zeros rather than NaN.
std::vector<nn::Tensor> prepare_cae_inputs(const EegRecording& rec, size_t window,
                                           const WaveletFilter& filter,
                                           size_t channel_stride = 1);

/// Stacks per-sample tensors (1 x bands x window) into one batch tensor.
nn::Tensor stack_batch(const std::vector<nn::Tensor>& inputs,
                       const std::vector<size_t>& indices);

} // namespace eegsz
