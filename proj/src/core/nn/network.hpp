#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "core/nn/layers.hpp"

namespace eegsz::nn {

struct ParamCounts {
    size_t trainable = 0;
    size_t non_trainable = 0;
};

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam with bias correction. Moment buffers are laid out parallel to the
/// parameter list they were created for.
class Adam {
public:
    Adam() = default;
    explicit Adam(AdamConfig cfg) : cfg_(cfg) {}

    void step(const std::vector<Tensor*>& params, const std::vector<Tensor*>& grads);

    uint64_t steps() const { return t_; }
    const AdamConfig& config() const { return cfg_; }
    AdamConfig& config() { return cfg_; }

    // checkpoint access
    std::vector<std::vector<double>>& moment1() { return m_; }
    std::vector<std::vector<double>>& moment2() { return v_; }
    uint64_t& step_counter() { return t_; }

private:
    AdamConfig cfg_;
    uint64_t t_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

class Network {
public:
    Network() = default;
    Network(Network&&) = default;
    Network& operator=(Network&&) = default;

    Network& add(std::unique_ptr<Layer> layer);

    size_t layer_count() const { return layers_.size(); }
    Layer& layer(size_t i) { return *layers_[i]; }
    const Layer& layer(size_t i) const { return *layers_[i]; }

    /// Seeded deterministic parameter initialization.
    void init(uint64_t seed);

    Tensor forward(const Tensor& input, bool training);
    /// Runs layers [0, n_layers) only; used to read intermediate features.
    Tensor forward_prefix(const Tensor& input, size_t n_layers, bool training);

    /// Propagates the loss gradient through every layer, accumulating
    /// parameter gradients. Returns the input gradient.
    Tensor backward(const Tensor& output_grad);

    std::vector<Tensor*> params();
    std::vector<Tensor*> grads();
    void zero_grads();

    ParamCounts param_counts() const;

    /// Validates the layer stack against an input shape and returns the
    /// output shape; throws naming the offending layer on mismatch.
    std::vector<size_t> infer_shapes(const std::vector<size_t>& input_shape) const;

    void save(std::ostream& out) const;
    static Network load(std::istream& in);

private:
    std::vector<std::unique_ptr<Layer>> layers_;
    bool ready_for_backward_ = false;
};

struct LossResult {
    double loss = 0.0;
    Tensor grad;
};

/// loss = mean over batch of 0.5 * ||pred - target||^2; grad = (pred - target) / batch
LossResult mse_loss(const Tensor& pred, const Tensor& target);

/// Binary cross-entropy on probabilities clamped to [1e-7, 1 - 1e-7];
/// targets must be exactly 0 or 1.
LossResult bce_loss(const Tensor& pred, const Tensor& target);

struct GradCheckReport {
    double max_rel_error = 0.0;
    size_t worst_param = 0;
    size_t worst_index = 0;
    bool pass = false;
};

/// Compares analytic parameter gradients against central finite differences
/// (h = 1e-5) of an MSE objective toward a fixed random target.
GradCheckReport grad_check(Network& net, const Tensor& input, double tolerance,
                           uint64_t seed = 1234);

} // namespace eegsz::nn
