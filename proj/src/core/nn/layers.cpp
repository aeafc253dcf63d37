#include "core/nn/layers.hpp"

#include <algorithm>
#include <cmath>

namespace eegsz::nn {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw_config(msg);
}

size_t conv_out(size_t in, size_t k, size_t s, size_t p) {
    require(in + 2 * p >= k, "conv: kernel larger than padded input");
    return (in + 2 * p - k) / s + 1;
}

// --------------------------------------------------------------------------

class Conv2d final : public Layer {
public:
    Conv2d(size_t in_ch, size_t out_ch, size_t kh, size_t kw, size_t sh, size_t sw,
           size_t ph, size_t pw)
        : in_ch_(in_ch), out_ch_(out_ch), kh_(kh), kw_(kw), sh_(sh), sw_(sw), ph_(ph), pw_(pw),
          w_({out_ch, in_ch, kh, kw}), b_({out_ch}), dw_(w_.shape), db_(b_.shape) {}

    LayerSpec spec() const override {
        return {"conv2d",
                {(long long)in_ch_, (long long)out_ch_, (long long)kh_, (long long)kw_,
                 (long long)sh_, (long long)sw_, (long long)ph_, (long long)pw_},
                {}};
    }

    std::vector<size_t> output_shape(const std::vector<size_t>& in) const override {
        require(in.size() == 4 && in[1] == in_ch_,
                "conv2d: expected (N," + std::to_string(in_ch_) + ",H,W) input, got " +
                    Tensor::shape_str(in));
        return {in[0], out_ch_, conv_out(in[2], kh_, sh_, ph_), conv_out(in[3], kw_, sw_, pw_)};
    }

    void init(Rng& rng) override {
        const double bound = std::sqrt(6.0 / static_cast<double>(in_ch_ * kh_ * kw_));
        for (auto& v : w_.values) v = rng.uniform(-bound, bound);
        b_.fill(0.0);
    }

    Tensor forward(const Tensor& x, bool training) override {
        const auto out_shape = output_shape(x.shape);
        Tensor padded = pad_input(x);
        Tensor y(out_shape);
        const size_t n = x.dim(0), oh = out_shape[2], ow = out_shape[3];
        const size_t ph2 = x.dim(2) + 2 * ph_, pw2 = x.dim(3) + 2 * pw_;
        for (size_t b = 0; b < n; ++b) {
            for (size_t f = 0; f < out_ch_; ++f) {
                const double bias = b_.values[f];
                for (size_t r = 0; r < oh; ++r) {
                    double* out_row = y.data() + ((b * out_ch_ + f) * oh + r) * ow;
                    for (size_t c = 0; c < ow; ++c) out_row[c] = bias;
                    for (size_t ci = 0; ci < in_ch_; ++ci) {
                        const double* wbase = w_.data() + ((f * in_ch_ + ci) * kh_) * kw_;
                        for (size_t u = 0; u < kh_; ++u) {
                            const double* in_row = padded.data() +
                                ((b * in_ch_ + ci) * ph2 + r * sh_ + u) * pw2;
                            const double* wrow = wbase + u * kw_;
                            for (size_t c = 0; c < ow; ++c) {
                                const double* in_pos = in_row + c * sw_;
                                double acc = 0.0;
                                for (size_t v = 0; v < kw_; ++v) acc += wrow[v] * in_pos[v];
                                out_row[c] += acc;
                            }
                        }
                    }
                }
            }
        }
        if (training) {
            cached_padded_ = std::move(padded);
            cached_in_shape_ = x.shape;
            has_cache_ = true;
        }
        return y;
    }

    Tensor backward(const Tensor& g) override {
        require(has_cache_, "conv2d: backward called before a training-mode forward");
        const size_t n = cached_in_shape_[0];
        const size_t h = cached_in_shape_[2], w = cached_in_shape_[3];
        const size_t ph2 = h + 2 * ph_, pw2 = w + 2 * pw_;
        const size_t oh = g.dim(2), ow = g.dim(3);

        Tensor dpad({n, in_ch_, ph2, pw2});
        for (size_t b = 0; b < n; ++b) {
            for (size_t f = 0; f < out_ch_; ++f) {
                for (size_t r = 0; r < oh; ++r) {
                    const double* grow = g.data() + ((b * out_ch_ + f) * oh + r) * ow;
                    for (size_t c = 0; c < ow; ++c) db_.values[f] += grow[c];
                    for (size_t ci = 0; ci < in_ch_; ++ci) {
                        double* wgbase = dw_.data() + ((f * in_ch_ + ci) * kh_) * kw_;
                        const double* wbase = w_.data() + ((f * in_ch_ + ci) * kh_) * kw_;
                        for (size_t u = 0; u < kh_; ++u) {
                            const double* in_row = cached_padded_.data() +
                                ((b * in_ch_ + ci) * ph2 + r * sh_ + u) * pw2;
                            double* dx_row = dpad.data() +
                                ((b * in_ch_ + ci) * ph2 + r * sh_ + u) * pw2;
                            double* wgrow = wgbase + u * kw_;
                            const double* wrow = wbase + u * kw_;
                            for (size_t c = 0; c < ow; ++c) {
                                const double gv = grow[c];
                                if (gv == 0.0) continue;
                                const double* in_pos = in_row + c * sw_;
                                double* dx_pos = dx_row + c * sw_;
                                for (size_t v = 0; v < kw_; ++v) {
                                    wgrow[v] += gv * in_pos[v];
                                    dx_pos[v] += gv * wrow[v];
                                }
                            }
                        }
                    }
                }
            }
        }
        // crop the padding off the input gradient
        Tensor dx({n, in_ch_, h, w});
        for (size_t b = 0; b < n; ++b) {
            for (size_t ci = 0; ci < in_ch_; ++ci) {
                for (size_t r = 0; r < h; ++r) {
                    const double* src = dpad.data() +
                        ((b * in_ch_ + ci) * ph2 + r + ph_) * pw2 + pw_;
                    double* dst = dx.data() + ((b * in_ch_ + ci) * h + r) * w;
                    std::copy(src, src + w, dst);
                }
            }
        }
        return dx;
    }

    std::vector<Tensor*> params() override { return {&w_, &b_}; }
    std::vector<Tensor*> grads() override { return {&dw_, &db_}; }

private:
    Tensor pad_input(const Tensor& x) const {
        const size_t n = x.dim(0), h = x.dim(2), w = x.dim(3);
        Tensor padded({n, in_ch_, h + 2 * ph_, w + 2 * pw_});
        const size_t pw2 = w + 2 * pw_;
        for (size_t b = 0; b < n; ++b) {
            for (size_t ci = 0; ci < in_ch_; ++ci) {
                for (size_t r = 0; r < h; ++r) {
                    const double* src = x.data() + ((b * in_ch_ + ci) * h + r) * w;
                    double* dst = padded.data() +
                        ((b * in_ch_ + ci) * (h + 2 * ph_) + r + ph_) * pw2 + pw_;
                    std::copy(src, src + w, dst);
                }
            }
        }
        return padded;
    }

    size_t in_ch_, out_ch_, kh_, kw_, sh_, sw_, ph_, pw_;
    Tensor w_, b_, dw_, db_;
    Tensor cached_padded_;
    std::vector<size_t> cached_in_shape_;
    bool has_cache_ = false;
};

// --------------------------------------------------------------------------

class TransposedConv2d final : public Layer {
public:
    TransposedConv2d(size_t in_ch, size_t out_ch, size_t kh, size_t kw, size_t sh, size_t sw,
                     size_t ph, size_t pw)
        : in_ch_(in_ch), out_ch_(out_ch), kh_(kh), kw_(kw), sh_(sh), sw_(sw), ph_(ph), pw_(pw),
          w_({in_ch, out_ch, kh, kw}), b_({out_ch}), dw_(w_.shape), db_(b_.shape) {}

    LayerSpec spec() const override {
        return {"tconv2d",
                {(long long)in_ch_, (long long)out_ch_, (long long)kh_, (long long)kw_,
                 (long long)sh_, (long long)sw_, (long long)ph_, (long long)pw_},
                {}};
    }

    std::vector<size_t> output_shape(const std::vector<size_t>& in) const override {
        require(in.size() == 4 && in[1] == in_ch_,
                "tconv2d: expected (N," + std::to_string(in_ch_) + ",H,W) input, got " +
                    Tensor::shape_str(in));
        require((in[2] - 1) * sh_ + kh_ >= 2 * ph_ && (in[3] - 1) * sw_ + kw_ >= 2 * pw_,
                "tconv2d: padding exceeds produced extent");
        return {in[0], out_ch_, (in[2] - 1) * sh_ + kh_ - 2 * ph_,
                (in[3] - 1) * sw_ + kw_ - 2 * pw_};
    }

    void init(Rng& rng) override {
        const double bound = std::sqrt(6.0 / static_cast<double>(in_ch_ * kh_ * kw_));
        for (auto& v : w_.values) v = rng.uniform(-bound, bound);
        b_.fill(0.0);
    }

    Tensor forward(const Tensor& x, bool training) override {
        const auto out_shape = output_shape(x.shape);
        const size_t n = x.dim(0), h = x.dim(2), w = x.dim(3);
        const size_t fh = (h - 1) * sh_ + kh_;  // uncropped extent
        const size_t fw = (w - 1) * sw_ + kw_;
        Tensor full({n, out_ch_, fh, fw});
        for (size_t b = 0; b < n; ++b) {
            for (size_t ci = 0; ci < in_ch_; ++ci) {
                const double* in_base = x.data() + (b * in_ch_ + ci) * h * w;
                for (size_t r = 0; r < h; ++r) {
                    for (size_t c = 0; c < w; ++c) {
                        const double v = in_base[r * w + c];
                        if (v == 0.0) continue;
                        for (size_t f = 0; f < out_ch_; ++f) {
                            const double* wbase = w_.data() + ((ci * out_ch_ + f) * kh_) * kw_;
                            double* out_base = full.data() +
                                ((b * out_ch_ + f) * fh + r * sh_) * fw + c * sw_;
                            for (size_t u = 0; u < kh_; ++u) {
                                double* orow = out_base + u * fw;
                                const double* wrow = wbase + u * kw_;
                                for (size_t s = 0; s < kw_; ++s) orow[s] += v * wrow[s];
                            }
                        }
                    }
                }
            }
        }
        Tensor y(out_shape);
        const size_t oh = out_shape[2], ow = out_shape[3];
        for (size_t b = 0; b < n; ++b) {
            for (size_t f = 0; f < out_ch_; ++f) {
                const double bias = b_.values[f];
                for (size_t r = 0; r < oh; ++r) {
                    const double* src = full.data() + ((b * out_ch_ + f) * fh + r + ph_) * fw + pw_;
                    double* dst = y.data() + ((b * out_ch_ + f) * oh + r) * ow;
                    for (size_t c = 0; c < ow; ++c) dst[c] = src[c] + bias;
                }
            }
        }
        if (training) {
            cached_input_ = x;
            has_cache_ = true;
        }
        return y;
    }

    Tensor backward(const Tensor& g) override {
        require(has_cache_, "tconv2d: backward called before a training-mode forward");
        const Tensor& x = cached_input_;
        const size_t n = x.dim(0), h = x.dim(2), w = x.dim(3);
        const size_t fh = (h - 1) * sh_ + kh_;
        const size_t fw = (w - 1) * sw_ + kw_;
        const size_t oh = g.dim(2), ow = g.dim(3);

        // re-pad the gradient to the uncropped extent
        Tensor gfull({n, out_ch_, fh, fw});
        for (size_t b = 0; b < n; ++b) {
            for (size_t f = 0; f < out_ch_; ++f) {
                for (size_t r = 0; r < oh; ++r) {
                    const double* src = g.data() + ((b * out_ch_ + f) * oh + r) * ow;
                    double* dst = gfull.data() + ((b * out_ch_ + f) * fh + r + ph_) * fw + pw_;
                    std::copy(src, src + ow, dst);
                    for (size_t c = 0; c < ow; ++c) db_.values[f] += src[c];
                }
            }
        }

        Tensor dx(x.shape);
        for (size_t b = 0; b < n; ++b) {
            for (size_t ci = 0; ci < in_ch_; ++ci) {
                const double* in_base = x.data() + (b * in_ch_ + ci) * h * w;
                double* dx_base = dx.data() + (b * in_ch_ + ci) * h * w;
                for (size_t r = 0; r < h; ++r) {
                    for (size_t c = 0; c < w; ++c) {
                        const double xv = in_base[r * w + c];
                        double acc = 0.0;
                        for (size_t f = 0; f < out_ch_; ++f) {
                            const double* wbase = w_.data() + ((ci * out_ch_ + f) * kh_) * kw_;
                            double* wgbase = dw_.data() + ((ci * out_ch_ + f) * kh_) * kw_;
                            const double* g_base = gfull.data() +
                                ((b * out_ch_ + f) * fh + r * sh_) * fw + c * sw_;
                            for (size_t u = 0; u < kh_; ++u) {
                                const double* grow = g_base + u * fw;
                                const double* wrow = wbase + u * kw_;
                                double* wgrow = wgbase + u * kw_;
                                for (size_t s = 0; s < kw_; ++s) {
                                    acc += grow[s] * wrow[s];
                                    wgrow[s] += grow[s] * xv;
                                }
                            }
                        }
                        dx_base[r * w + c] = acc;
                    }
                }
            }
        }
        return dx;
    }

    std::vector<Tensor*> params() override { return {&w_, &b_}; }
    std::vector<Tensor*> grads() override { return {&dw_, &db_}; }

private:
    size_t in_ch_, out_ch_, kh_, kw_, sh_, sw_, ph_, pw_;
    Tensor w_, b_, dw_, db_;
    Tensor cached_input_;
    bool has_cache_ = false;
};

// --------------------------------------------------------------------------

class MaxPool2d final : public Layer {
public:
    MaxPool2d(size_t kh, size_t kw) : kh_(kh), kw_(kw) {}

    LayerSpec spec() const override {
        return {"maxpool2d", {(long long)kh_, (long long)kw_}, {}};
    }

    std::vector<size_t> output_shape(const std::vector<size_t>& in) const override {
        require(in.size() == 4 && in[2] >= kh_ && in[3] >= kw_,
                "maxpool2d: input " + Tensor::shape_str(in) + " smaller than pool window");
        return {in[0], in[1], (in[2] - kh_) / kh_ + 1, (in[3] - kw_) / kw_ + 1};
    }

    Tensor forward(const Tensor& x, bool training) override {
        const auto out_shape = output_shape(x.shape);
        const size_t n = x.dim(0), ch = x.dim(1), h = x.dim(2), w = x.dim(3);
        const size_t oh = out_shape[2], ow = out_shape[3];
        Tensor y(out_shape);
        std::vector<size_t> argmax(y.numel());
        size_t oi = 0;
        for (size_t b = 0; b < n; ++b) {
            for (size_t c = 0; c < ch; ++c) {
                const double* base = x.data() + (b * ch + c) * h * w;
                for (size_t r = 0; r < oh; ++r) {
                    for (size_t s = 0; s < ow; ++s) {
                        // ties resolve to the first maximal element in row-major order
                        size_t best_idx = (r * kh_) * w + s * kw_;
                        double best = base[best_idx];
                        for (size_t u = 0; u < kh_; ++u) {
                            for (size_t v = 0; v < kw_; ++v) {
                                const size_t idx = (r * kh_ + u) * w + s * kw_ + v;
                                if (base[idx] > best) {
                                    best = base[idx];
                                    best_idx = idx;
                                }
                            }
                        }
                        y.values[oi] = best;
                        argmax[oi] = (b * ch + c) * h * w + best_idx;
                        ++oi;
                    }
                }
            }
        }
        if (training) {
            argmax_ = std::move(argmax);
            in_shape_ = x.shape;
            has_cache_ = true;
        }
        return y;
    }

    Tensor backward(const Tensor& g) override {
        require(has_cache_, "maxpool2d: backward called before a training-mode forward");
        Tensor dx(in_shape_);
        for (size_t i = 0; i < g.numel(); ++i) dx.values[argmax_[i]] += g.values[i];
        return dx;
    }

private:
    size_t kh_, kw_;
    std::vector<size_t> argmax_;
    std::vector<size_t> in_shape_;
    bool has_cache_ = false;
};

// --------------------------------------------------------------------------

class Dense final : public Layer {
public:
    Dense(size_t in_features, size_t out_features)
        : in_(in_features), out_(out_features), w_({out_features, in_features}),
          b_({out_features}), dw_(w_.shape), db_(b_.shape) {}

    LayerSpec spec() const override {
        return {"dense", {(long long)in_, (long long)out_}, {}};
    }

    std::vector<size_t> output_shape(const std::vector<size_t>& in) const override {
        require(in.size() == 2 && in[1] == in_,
                "dense: expected (N," + std::to_string(in_) + ") input, got " +
                    Tensor::shape_str(in));
        return {in[0], out_};
    }

    void init(Rng& rng) override {
        const double bound = std::sqrt(6.0 / static_cast<double>(in_));
        for (auto& v : w_.values) v = rng.uniform(-bound, bound);
        b_.fill(0.0);
    }

    Tensor forward(const Tensor& x, bool training) override {
        const auto out_shape = output_shape(x.shape);
        const size_t n = x.dim(0);
        Tensor y(out_shape);
        for (size_t b = 0; b < n; ++b) {
            const double* xi = x.data() + b * in_;
            double* yo = y.data() + b * out_;
            for (size_t o = 0; o < out_; ++o) {
                const double* wrow = w_.data() + o * in_;
                double acc = b_.values[o];
                for (size_t i = 0; i < in_; ++i) acc += wrow[i] * xi[i];
                yo[o] = acc;
            }
        }
        if (training) {
            cached_input_ = x;
            has_cache_ = true;
        }
        return y;
    }

    Tensor backward(const Tensor& g) override {
        require(has_cache_, "dense: backward called before a training-mode forward");
        const size_t n = cached_input_.dim(0);
        Tensor dx(cached_input_.shape);
        for (size_t b = 0; b < n; ++b) {
            const double* gi = g.data() + b * out_;
            const double* xi = cached_input_.data() + b * in_;
            double* dxi = dx.data() + b * in_;
            for (size_t o = 0; o < out_; ++o) {
                const double gv = gi[o];
                db_.values[o] += gv;
                double* wgrow = dw_.data() + o * in_;
                const double* wrow = w_.data() + o * in_;
                for (size_t i = 0; i < in_; ++i) {
                    wgrow[i] += gv * xi[i];
                    dxi[i] += gv * wrow[i];
                }
            }
        }
        return dx;
    }

    std::vector<Tensor*> params() override { return {&w_, &b_}; }
    std::vector<Tensor*> grads() override { return {&dw_, &db_}; }

private:
    size_t in_, out_;
    Tensor w_, b_, dw_, db_;
    Tensor cached_input_;
    bool has_cache_ = false;
};

// --------------------------------------------------------------------------

class BatchNorm final : public Layer {
public:
    BatchNorm(size_t channels, double momentum, double eps)
        : ch_(channels), momentum_(momentum), eps_(eps),
          gamma_({channels}), beta_({channels}), dgamma_({channels}), dbeta_({channels}),
          running_mean_({channels}), running_var_({channels}) {
        gamma_.fill(1.0);
        running_var_.fill(1.0);
    }

    LayerSpec spec() const override {
        return {"batchnorm", {(long long)ch_}, {momentum_, eps_}};
    }

    std::vector<size_t> output_shape(const std::vector<size_t>& in) const override {
        require((in.size() == 4 || in.size() == 2) && in[1] == ch_,
                "batchnorm: expected channel dimension " + std::to_string(ch_) + ", got " +
                    Tensor::shape_str(in));
        return in;
    }

    Tensor forward(const Tensor& x, bool training) override {
        output_shape(x.shape);
        const size_t n = x.dim(0);
        const size_t spatial = x.numel() / (n * ch_);
        const double m = static_cast<double>(n * spatial);
        Tensor y(x.shape);

        if (training) {
            std::vector<double> mean(ch_, 0.0), var(ch_, 0.0);
            for (size_t b = 0; b < n; ++b) {
                for (size_t c = 0; c < ch_; ++c) {
                    const double* base = x.data() + (b * ch_ + c) * spatial;
                    double acc = 0.0;
                    for (size_t i = 0; i < spatial; ++i) acc += base[i];
                    mean[c] += acc;
                }
            }
            for (auto& v : mean) v /= m;
            for (size_t b = 0; b < n; ++b) {
                for (size_t c = 0; c < ch_; ++c) {
                    const double* base = x.data() + (b * ch_ + c) * spatial;
                    double acc = 0.0;
                    for (size_t i = 0; i < spatial; ++i) {
                        const double d = base[i] - mean[c];
                        acc += d * d;
                    }
                    var[c] += acc;
                }
            }
            for (auto& v : var) v /= m;

            xhat_ = Tensor(x.shape);
            inv_std_.assign(ch_, 0.0);
            for (size_t c = 0; c < ch_; ++c) inv_std_[c] = 1.0 / std::sqrt(var[c] + eps_);
            for (size_t b = 0; b < n; ++b) {
                for (size_t c = 0; c < ch_; ++c) {
                    const double* base = x.data() + (b * ch_ + c) * spatial;
                    double* xh = xhat_.data() + (b * ch_ + c) * spatial;
                    double* yo = y.data() + (b * ch_ + c) * spatial;
                    for (size_t i = 0; i < spatial; ++i) {
                        xh[i] = (base[i] - mean[c]) * inv_std_[c];
                        yo[i] = gamma_.values[c] * xh[i] + beta_.values[c];
                    }
                }
            }
            for (size_t c = 0; c < ch_; ++c) {
                running_mean_.values[c] =
                    (1.0 - momentum_) * running_mean_.values[c] + momentum_ * mean[c];
                running_var_.values[c] =
                    (1.0 - momentum_) * running_var_.values[c] + momentum_ * var[c];
            }
            batch_count_ = m;
            has_cache_ = true;
        } else {
            for (size_t b = 0; b < n; ++b) {
                for (size_t c = 0; c < ch_; ++c) {
                    const double scale =
                        gamma_.values[c] / std::sqrt(running_var_.values[c] + eps_);
                    const double shift = beta_.values[c] - scale * running_mean_.values[c];
                    const double* base = x.data() + (b * ch_ + c) * spatial;
                    double* yo = y.data() + (b * ch_ + c) * spatial;
                    for (size_t i = 0; i < spatial; ++i) yo[i] = scale * base[i] + shift;
                }
            }
        }
        return y;
    }

    Tensor backward(const Tensor& g) override {
        require(has_cache_, "batchnorm: backward called before a training-mode forward");
        const size_t n = g.dim(0);
        const size_t spatial = g.numel() / (n * ch_);
        const double m = batch_count_;

        std::vector<double> sum_g(ch_, 0.0), sum_gx(ch_, 0.0);
        for (size_t b = 0; b < n; ++b) {
            for (size_t c = 0; c < ch_; ++c) {
                const double* gi = g.data() + (b * ch_ + c) * spatial;
                const double* xh = xhat_.data() + (b * ch_ + c) * spatial;
                for (size_t i = 0; i < spatial; ++i) {
                    sum_g[c] += gi[i];
                    sum_gx[c] += gi[i] * xh[i];
                }
            }
        }
        for (size_t c = 0; c < ch_; ++c) {
            dbeta_.values[c] += sum_g[c];
            dgamma_.values[c] += sum_gx[c];
        }

        Tensor dx(g.shape);
        for (size_t b = 0; b < n; ++b) {
            for (size_t c = 0; c < ch_; ++c) {
                const double* gi = g.data() + (b * ch_ + c) * spatial;
                const double* xh = xhat_.data() + (b * ch_ + c) * spatial;
                double* dxo = dx.data() + (b * ch_ + c) * spatial;
                const double k = gamma_.values[c] * inv_std_[c] / m;
                for (size_t i = 0; i < spatial; ++i) {
                    dxo[i] = k * (m * gi[i] - sum_g[c] - xh[i] * sum_gx[c]);
                }
            }
        }
        return dx;
    }

    std::vector<Tensor*> params() override { return {&gamma_, &beta_}; }
    std::vector<Tensor*> grads() override { return {&dgamma_, &dbeta_}; }
    std::vector<Tensor*> state() override { return {&running_mean_, &running_var_}; }

private:
    size_t ch_;
    double momentum_, eps_;
    Tensor gamma_, beta_, dgamma_, dbeta_;
    Tensor running_mean_, running_var_;
    Tensor xhat_;
    std::vector<double> inv_std_;
    double batch_count_ = 0.0;
    bool has_cache_ = false;
};

// --------------------------------------------------------------------------

class LeakyReLU final : public Layer {
public:
    explicit LeakyReLU(double alpha) : alpha_(alpha) {}

    LayerSpec spec() const override { return {"leaky_relu", {}, {alpha_}}; }

    std::vector<size_t> output_shape(const std::vector<size_t>& in) const override { return in; }

    Tensor forward(const Tensor& x, bool training) override {
        Tensor y(x.shape);
        for (size_t i = 0; i < x.numel(); ++i) {
            y.values[i] = x.values[i] >= 0.0 ? x.values[i] : alpha_ * x.values[i];
        }
        if (training) {
            cached_input_ = x;
            has_cache_ = true;
        }
        return y;
    }

    Tensor backward(const Tensor& g) override {
        require(has_cache_, "leaky_relu: backward called before a training-mode forward");
        Tensor dx(g.shape);
        for (size_t i = 0; i < g.numel(); ++i) {
            dx.values[i] = cached_input_.values[i] >= 0.0 ? g.values[i] : alpha_ * g.values[i];
        }
        return dx;
    }

private:
    double alpha_;
    Tensor cached_input_;
    bool has_cache_ = false;
};

class Sigmoid final : public Layer {
public:
    LayerSpec spec() const override { return {"sigmoid", {}, {}}; }

    std::vector<size_t> output_shape(const std::vector<size_t>& in) const override { return in; }

    Tensor forward(const Tensor& x, bool training) override {
        Tensor y(x.shape);
        for (size_t i = 0; i < x.numel(); ++i) {
            y.values[i] = 1.0 / (1.0 + std::exp(-x.values[i]));
        }
        if (training) {
            cached_output_ = y;
            has_cache_ = true;
        }
        return y;
    }

    Tensor backward(const Tensor& g) override {
        require(has_cache_, "sigmoid: backward called before a training-mode forward");
        Tensor dx(g.shape);
        for (size_t i = 0; i < g.numel(); ++i) {
            const double y = cached_output_.values[i];
            dx.values[i] = g.values[i] * y * (1.0 - y);
        }
        return dx;
    }

private:
    Tensor cached_output_;
    bool has_cache_ = false;
};

class Flatten final : public Layer {
public:
    LayerSpec spec() const override { return {"flatten", {}, {}}; }

    std::vector<size_t> output_shape(const std::vector<size_t>& in) const override {
        require(in.size() >= 2, "flatten: needs a batch dimension");
        size_t rest = 1;
        for (size_t i = 1; i < in.size(); ++i) rest *= in[i];
        return {in[0], rest};
    }

    Tensor forward(const Tensor& x, bool training) override {
        Tensor y(output_shape(x.shape), x.values);
        if (training) {
            in_shape_ = x.shape;
            has_cache_ = true;
        }
        return y;
    }

    Tensor backward(const Tensor& g) override {
        require(has_cache_, "flatten: backward called before a training-mode forward");
        return Tensor(in_shape_, g.values);
    }

private:
    std::vector<size_t> in_shape_;
    bool has_cache_ = false;
};

class Reshape final : public Layer {
public:
    explicit Reshape(std::vector<size_t> target) : target_(std::move(target)) {}

    LayerSpec spec() const override {
        LayerSpec s{"reshape", {}, {}};
        for (size_t d : target_) s.ints.push_back(static_cast<long long>(d));
        return s;
    }

    std::vector<size_t> output_shape(const std::vector<size_t>& in) const override {
        require(in.size() >= 2, "reshape: needs a batch dimension");
        size_t rest = 1, want = 1;
        for (size_t i = 1; i < in.size(); ++i) rest *= in[i];
        for (size_t d : target_) want *= d;
        require(rest == want, "reshape: cannot reshape " + Tensor::shape_str(in) +
                                  " to per-sample " + Tensor::shape_str(target_));
        std::vector<size_t> out = {in[0]};
        out.insert(out.end(), target_.begin(), target_.end());
        return out;
    }

    Tensor forward(const Tensor& x, bool training) override {
        Tensor y(output_shape(x.shape), x.values);
        if (training) {
            in_shape_ = x.shape;
            has_cache_ = true;
        }
        return y;
    }

    Tensor backward(const Tensor& g) override {
        require(has_cache_, "reshape: backward called before a training-mode forward");
        return Tensor(in_shape_, g.values);
    }

private:
    std::vector<size_t> target_;
    std::vector<size_t> in_shape_;
    bool has_cache_ = false;
};

} // namespace

// --------------------------------------------------------------------------

std::unique_ptr<Layer> make_conv2d(size_t in_ch, size_t out_ch, size_t kh, size_t kw,
                                   size_t sh, size_t sw, size_t ph, size_t pw) {
    return std::make_unique<Conv2d>(in_ch, out_ch, kh, kw, sh, sw, ph, pw);
}
std::unique_ptr<Layer> make_tconv2d(size_t in_ch, size_t out_ch, size_t kh, size_t kw,
                                    size_t sh, size_t sw, size_t ph, size_t pw) {
    return std::make_unique<TransposedConv2d>(in_ch, out_ch, kh, kw, sh, sw, ph, pw);
}
std::unique_ptr<Layer> make_maxpool2d(size_t kh, size_t kw) {
    return std::make_unique<MaxPool2d>(kh, kw);
}
std::unique_ptr<Layer> make_dense(size_t in_features, size_t out_features) {
    return std::make_unique<Dense>(in_features, out_features);
}
std::unique_ptr<Layer> make_batchnorm(size_t channels, double momentum, double eps) {
    return std::make_unique<BatchNorm>(channels, momentum, eps);
}
std::unique_ptr<Layer> make_leaky_relu(double alpha) {
    return std::make_unique<LeakyReLU>(alpha);
}
std::unique_ptr<Layer> make_sigmoid() { return std::make_unique<Sigmoid>(); }
std::unique_ptr<Layer> make_flatten() { return std::make_unique<Flatten>(); }
std::unique_ptr<Layer> make_reshape(std::vector<size_t> target) {
    return std::make_unique<Reshape>(std::move(target));
}

std::unique_ptr<Layer> make_layer(const LayerSpec& s) {
    const auto& i = s.ints;
    if (s.kind == "conv2d") {
        return make_conv2d((size_t)i[0], (size_t)i[1], (size_t)i[2], (size_t)i[3],
                           (size_t)i[4], (size_t)i[5], (size_t)i[6], (size_t)i[7]);
    }
    if (s.kind == "tconv2d") {
        return make_tconv2d((size_t)i[0], (size_t)i[1], (size_t)i[2], (size_t)i[3],
                            (size_t)i[4], (size_t)i[5], (size_t)i[6], (size_t)i[7]);
    }
    if (s.kind == "maxpool2d") return make_maxpool2d((size_t)i[0], (size_t)i[1]);
    if (s.kind == "dense") return make_dense((size_t)i[0], (size_t)i[1]);
    if (s.kind == "batchnorm") return make_batchnorm((size_t)i[0], s.reals[0], s.reals[1]);
    if (s.kind == "leaky_relu") return make_leaky_relu(s.reals[0]);
    if (s.kind == "sigmoid") return make_sigmoid();
    if (s.kind == "flatten") return make_flatten();
    if (s.kind == "reshape") {
        std::vector<size_t> target;
        for (long long d : i) target.push_back(static_cast<size_t>(d));
        return make_reshape(std::move(target));
    }
    throw_config("unknown layer kind: " + s.kind);
}

} // namespace eegsz::nn
