#include "core/cae.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace eegsz {

using nn::Tensor;

Cae Cae::build(const CaeConfig& cfg) {
    if (cfg.encoder.empty() || cfg.decoder.empty()) {
        throw_config("cae: encoder and decoder specs must be non-empty");
    }
    if (cfg.bottleneck == 0 || cfg.bottleneck >= cfg.bands * cfg.window) {
        throw_config("cae: bottleneck must be strictly smaller than the input element count");
    }

    Cae cae;
    cae.cfg_ = cfg;
    nn::Network& net = cae.net_;

    size_t in_ch = 1;
    for (const auto& b : cfg.encoder) {
        net.add(nn::make_conv2d(in_ch, b.filters, b.kh, b.kw, b.sh, b.sw, b.ph, b.pw));
        net.add(nn::make_batchnorm(b.filters));
        net.add(nn::make_leaky_relu(cfg.alpha));
        in_ch = b.filters;
    }
    net.add(nn::make_flatten());

    // probe the encoder extent to size the bottleneck dense pair
    std::vector<size_t> shape = {1, 1, cfg.bands, cfg.window};
    try {
        shape = net.infer_shapes(shape);
    } catch (const Error& e) {
        throw_config(std::string("cae: encoder spec invalid: ") + e.what());
    }
    const size_t flat = shape[1];
    std::vector<size_t> pre_flat_shape;
    {
        std::vector<size_t> s = {1, 1, cfg.bands, cfg.window};
        for (size_t i = 0; i + 1 < net.layer_count(); ++i) s = net.layer(i).output_shape(s);
        pre_flat_shape = {s[1], s[2], s[3]};
    }

    net.add(nn::make_dense(flat, cfg.bottleneck));
    cae.encoder_layers_ = net.layer_count();

    net.add(nn::make_dense(cfg.bottleneck, flat));
    net.add(nn::make_leaky_relu(cfg.alpha));
    net.add(nn::make_reshape(pre_flat_shape));
    for (const auto& b : cfg.decoder) {
        net.add(nn::make_tconv2d(in_ch, b.filters, b.kh, b.kw, b.sh, b.sw, b.ph, b.pw));
        if (b.batchnorm) net.add(nn::make_batchnorm(b.filters));
        if (&b != &cfg.decoder.back()) net.add(nn::make_leaky_relu(cfg.alpha));
        in_ch = b.filters;
    }

    const auto out_shape = net.infer_shapes({1, 1, cfg.bands, cfg.window});
    if (out_shape != std::vector<size_t>{1, 1, cfg.bands, cfg.window}) {
        throw_config("cae: decoder output shape " + Tensor::shape_str(out_shape) +
                     " does not mirror the input (1x1x" + std::to_string(cfg.bands) + "x" +
                     std::to_string(cfg.window) + ")");
    }

    net.init(cfg.seed);
    cae.adam_ = nn::Adam(nn::AdamConfig{cfg.learning_rate, 0.9, 0.999, 1e-8});
    return cae;
}

Tensor stack_batch(const std::vector<Tensor>& inputs, const std::vector<size_t>& indices) {
    if (indices.empty()) throw_config("stack_batch: empty index list");
    const auto& first = inputs[indices[0]].shape;
    std::vector<size_t> shape = {indices.size()};
    shape.insert(shape.end(), first.begin(), first.end());
    Tensor batch(shape);
    const size_t per = inputs[indices[0]].numel();
    for (size_t i = 0; i < indices.size(); ++i) {
        const Tensor& t = inputs[indices[i]];
        if (t.numel() != per) throw_config("stack_batch: inconsistent sample shapes");
        std::copy(t.values.begin(), t.values.end(), batch.values.begin() + i * per);
    }
    return batch;
}

void Cae::train(const std::vector<Tensor>& inputs, size_t epochs, size_t batch_size) {
    if (epochs < 1) throw_config("cae train: epochs must be >= 1");
    if (batch_size < 1) throw_config("cae train: batch size must be >= 1");
    if (inputs.size() < 2 * batch_size) {
        throw_config("cae train: need at least 2*batch_size inputs, got " +
                     std::to_string(inputs.size()));
    }

    Rng shuffle_rng(splitmix64(cfg_.seed ^ 0x9e3779b97f4a7c15ULL));
    std::vector<size_t> order(inputs.size());
    std::iota(order.begin(), order.end(), size_t{0});

    for (size_t epoch = 0; epoch < epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        size_t seen = 0;
        for (size_t start = 0; start < order.size(); start += batch_size) {
            const size_t end = std::min(start + batch_size, order.size());
            std::vector<size_t> batch_idx(order.begin() + start, order.begin() + end);
            Tensor batch = stack_batch(inputs, batch_idx);

            net_.zero_grads();
            Tensor out = net_.forward(batch, true);
            nn::LossResult loss = nn::mse_loss(out, batch);
            if (!std::isfinite(loss.loss)) {
                throw_numeric("cae train: loss diverged at epoch " + std::to_string(epoch));
            }
            net_.backward(loss.grad);
            adam_.step(net_.params(), net_.grads());

            loss_sum += loss.loss * static_cast<double>(batch_idx.size());
            seen += batch_idx.size();
        }
        loss_history_.push_back(loss_sum / static_cast<double>(seen));
    }
}

std::vector<double> Cae::encode(const Tensor& input) {
    Tensor x = input;
    if (x.rank() == 3) x.shape.insert(x.shape.begin(), 1);  // promote to batch of one
    Tensor z = net_.forward_prefix(x, encoder_layers_, false);
    return z.values;
}

double Cae::reconstruction_error(const Tensor& input) {
    Tensor x = input;
    if (x.rank() == 3) x.shape.insert(x.shape.begin(), 1);
    Tensor out = net_.forward(x, false);
    double acc = 0.0;
    for (size_t i = 0; i < out.numel(); ++i) {
        const double d = out.values[i] - x.values[i];
        acc += d * d;
    }
    return 0.5 * acc;
}

double Cae::dataset_loss(const std::vector<Tensor>& inputs) {
    if (inputs.empty()) throw_config("dataset_loss: empty input list");
    std::vector<size_t> all(inputs.size());
    std::iota(all.begin(), all.end(), size_t{0});
    Tensor batch = stack_batch(inputs, all);
    Tensor out = net_.forward(batch, false);
    return nn::mse_loss(out, batch).loss;
}

std::vector<Tensor> prepare_cae_inputs(const EegRecording& rec, size_t window,
                                       const WaveletFilter& filter, size_t channel_stride) {
    if (window == 0 || window > rec.data.cols()) {
        throw_config("prepare_cae_inputs: invalid window " + std::to_string(window));
    }
    if (channel_stride == 0) channel_stride = 1;

    const size_t n = rec.data.cols();
    const size_t per_channel = (n - window) / window + 1;
    std::vector<Tensor> out;

    // Bands of comparable strength are z-scored exactly; the gain for weak
    // bands is capped relative to the strongest band so filter leakage and
    // empty bands are not amplified into unit-variance noise. Constant
    // bands become zeros.
    constexpr double kGainHeadroom = 4.0;

    for (size_t ch = 0; ch < rec.data.rows(); ch += channel_stride) {
        std::vector<double> channel(rec.data.row(ch), rec.data.row(ch) + n);
        BandSet bands = band_signals(channel, filter);

        std::array<double, 5> mean{}, stddev{};
        double std_max = 0.0;
        for (int b = 0; b < 5; ++b) {
            const auto& sig = bands.band(b);
            for (double v : sig) mean[b] += v;
            mean[b] /= static_cast<double>(sig.size());
            double var = 0.0;
            for (double v : sig) var += (v - mean[b]) * (v - mean[b]);
            stddev[b] = std::sqrt(var / static_cast<double>(sig.size()));
            std_max = std::max(std_max, stddev[b]);
        }

        std::array<std::vector<double>, 5> normed;
        for (int b = 0; b < 5; ++b) {
            const auto& sig = bands.band(b);
            normed[b].resize(sig.size());
            if (stddev[b] > 0.0 && std_max > 0.0) {
                const double gain = std::min(1.0 / stddev[b], kGainHeadroom / std_max);
                for (size_t i = 0; i < sig.size(); ++i) {
                    normed[b][i] = (sig[i] - mean[b]) * gain;
                }
            }
        }

        for (size_t w = 0; w < per_channel; ++w) {
            Tensor t({1, 5, window});
            for (size_t b = 0; b < 5; ++b) {
                const double* src = normed[b].data() + w * window;
                std::copy(src, src + window, t.values.begin() + b * window);
            }
            out.push_back(std::move(t));
        }
    }
    return out;
}

void Cae::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_data("cannot write checkpoint: " + path);
    const char magic[8] = {'E', 'E', 'G', 'C', 'A', 'E', '0', '1'};
    out.write(magic, sizeof(magic));

    auto w64 = [&out](uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
    auto wf = [&out](double v) { out.write(reinterpret_cast<const char*>(&v), 8); };

    w64(cfg_.bands);
    w64(cfg_.window);
    w64(cfg_.bottleneck);
    wf(cfg_.alpha);
    wf(cfg_.learning_rate);
    w64(cfg_.epochs);
    w64(cfg_.batch_size);
    w64(cfg_.seed);
    w64(cfg_.wavelet.size());
    out.write(cfg_.wavelet.data(), static_cast<std::streamsize>(cfg_.wavelet.size()));
    w64(cfg_.encoder.size());
    for (const auto& b : cfg_.encoder) {
        for (size_t v : {b.filters, b.kh, b.kw, b.sh, b.sw, b.ph, b.pw}) w64(v);
    }
    w64(cfg_.decoder.size());
    for (const auto& b : cfg_.decoder) {
        for (size_t v : {b.filters, b.kh, b.kw, b.sh, b.sw, b.ph, b.pw}) w64(v);
        w64(b.batchnorm ? 1 : 0);
    }
    w64(encoder_layers_);
    w64(loss_history_.size());
    for (double v : loss_history_) wf(v);

    // optimizer state
    auto& adam = const_cast<nn::Adam&>(adam_);
    w64(adam.step_counter());
    w64(adam.moment1().size());
    for (size_t p = 0; p < adam.moment1().size(); ++p) {
        w64(adam.moment1()[p].size());
        out.write(reinterpret_cast<const char*>(adam.moment1()[p].data()),
                  static_cast<std::streamsize>(adam.moment1()[p].size() * 8));
        out.write(reinterpret_cast<const char*>(adam.moment2()[p].data()),
                  static_cast<std::streamsize>(adam.moment2()[p].size() * 8));
    }

    net_.save(out);
    if (!out) throw_data("checkpoint write failed: " + path);
}

Cae Cae::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::string(magic, 8) != "EEGCAE01") {
        throw_data("checkpoint: bad magic in " + path);
    }

    auto r64 = [&in]() {
        uint64_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 8);
        if (!in) throw_data("checkpoint: truncated");
        return v;
    };
    auto rf = [&in]() {
        double v = 0;
        in.read(reinterpret_cast<char*>(&v), 8);
        if (!in) throw_data("checkpoint: truncated");
        return v;
    };

    CaeConfig cfg;
    cfg.bands = r64();
    cfg.window = r64();
    cfg.bottleneck = r64();
    cfg.alpha = rf();
    cfg.learning_rate = rf();
    cfg.epochs = r64();
    cfg.batch_size = r64();
    cfg.seed = r64();
    const uint64_t wlen = r64();
    cfg.wavelet.resize(wlen);
    in.read(cfg.wavelet.data(), static_cast<std::streamsize>(wlen));
    cfg.encoder.clear();
    const uint64_t ne = r64();
    for (uint64_t i = 0; i < ne; ++i) {
        ConvBlockSpec b{};
        b.filters = r64(); b.kh = r64(); b.kw = r64();
        b.sh = r64(); b.sw = r64(); b.ph = r64(); b.pw = r64();
        cfg.encoder.push_back(b);
    }
    cfg.decoder.clear();
    const uint64_t nd = r64();
    for (uint64_t i = 0; i < nd; ++i) {
        TconvBlockSpec b{};
        b.filters = r64(); b.kh = r64(); b.kw = r64();
        b.sh = r64(); b.sw = r64(); b.ph = r64(); b.pw = r64();
        b.batchnorm = r64() != 0;
        cfg.decoder.push_back(b);
    }

    Cae cae;
    cae.cfg_ = cfg;
    cae.encoder_layers_ = r64();
    const uint64_t nl = r64();
    cae.loss_history_.resize(nl);
    for (auto& v : cae.loss_history_) v = rf();

    cae.adam_ = nn::Adam(nn::AdamConfig{cfg.learning_rate, 0.9, 0.999, 1e-8});
    cae.adam_.step_counter() = r64();
    const uint64_t np = r64();
    cae.adam_.moment1().resize(np);
    cae.adam_.moment2().resize(np);
    for (uint64_t p = 0; p < np; ++p) {
        const uint64_t nv = r64();
        cae.adam_.moment1()[p].resize(nv);
        in.read(reinterpret_cast<char*>(cae.adam_.moment1()[p].data()),
                static_cast<std::streamsize>(nv * 8));
        cae.adam_.moment2()[p].resize(nv);
        in.read(reinterpret_cast<char*>(cae.adam_.moment2()[p].data()),
                static_cast<std::streamsize>(nv * 8));
        if (!in) throw_data("checkpoint: truncated optimizer state");
    }

    cae.net_ = nn::Network::load(in);
    return cae;
}

} // namespace eegsz
