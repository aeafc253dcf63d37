#include "core/nn/network.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

namespace eegsz::nn {

// ---------------------------------------------------------------- Adam ----

void Adam::step(const std::vector<Tensor*>& params, const std::vector<Tensor*>& grads) {
    if (params.size() != grads.size()) throw_config("adam: params/grads size mismatch");
    if (m_.empty()) {
        m_.resize(params.size());
        v_.resize(params.size());
        for (size_t p = 0; p < params.size(); ++p) {
            m_[p].assign(params[p]->numel(), 0.0);
            v_[p].assign(params[p]->numel(), 0.0);
        }
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (size_t p = 0; p < params.size(); ++p) {
        auto& theta = params[p]->values;
        const auto& g = grads[p]->values;
        if (theta.size() != g.size() || theta.size() != m_[p].size()) {
            throw_config("adam: buffer shape mismatch at parameter " + std::to_string(p));
        }
        for (size_t i = 0; i < theta.size(); ++i) {
            m_[p][i] = cfg_.beta1 * m_[p][i] + (1.0 - cfg_.beta1) * g[i];
            v_[p][i] = cfg_.beta2 * v_[p][i] + (1.0 - cfg_.beta2) * g[i] * g[i];
            const double mhat = m_[p][i] / bc1;
            const double vhat = v_[p][i] / bc2;
            theta[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }
}

// ------------------------------------------------------------- Network ----

Network& Network::add(std::unique_ptr<Layer> layer) {
    layers_.push_back(std::move(layer));
    return *this;
}

void Network::init(uint64_t seed) {
    Rng rng(seed);
    for (auto& l : layers_) l->init(rng);
}

std::vector<size_t> Network::infer_shapes(const std::vector<size_t>& input_shape) const {
    std::vector<size_t> shape = input_shape;
    for (size_t i = 0; i < layers_.size(); ++i) {
        try {
            shape = layers_[i]->output_shape(shape);
        } catch (const Error& e) {
            throw_config("layer " + std::to_string(i) + " (" + layers_[i]->kind() +
                         "): " + e.what());
        }
    }
    return shape;
}

Tensor Network::forward(const Tensor& input, bool training) {
    return forward_prefix(input, layers_.size(), training);
}

Tensor Network::forward_prefix(const Tensor& input, size_t n_layers, bool training) {
    Tensor cur = input;
    for (size_t i = 0; i < n_layers && i < layers_.size(); ++i) {
        try {
            cur = layers_[i]->forward(cur, training);
        } catch (const Error& e) {
            throw Error(e.kind(), "layer " + std::to_string(i) + " (" + layers_[i]->kind() +
                                      "): " + e.what());
        }
        for (double v : cur.values) {
            if (!std::isfinite(v)) {
                throw_numeric("layer " + std::to_string(i) + " (" + layers_[i]->kind() +
                              ") produced a non-finite activation");
            }
        }
    }
    if (training && n_layers >= layers_.size()) ready_for_backward_ = true;
    return cur;
}

Tensor Network::backward(const Tensor& output_grad) {
    if (!ready_for_backward_) {
        throw_config("network: backward called without a preceding training-mode forward");
    }
    Tensor grad = output_grad;
    for (size_t i = layers_.size(); i-- > 0;) {
        grad = layers_[i]->backward(grad);
    }
    ready_for_backward_ = false;
    return grad;
}

std::vector<Tensor*> Network::params() {
    std::vector<Tensor*> out;
    for (auto& l : layers_) {
        for (auto* p : l->params()) out.push_back(p);
    }
    return out;
}

std::vector<Tensor*> Network::grads() {
    std::vector<Tensor*> out;
    for (auto& l : layers_) {
        for (auto* g : l->grads()) out.push_back(g);
    }
    return out;
}

void Network::zero_grads() {
    for (auto* g : grads()) g->fill(0.0);
}

ParamCounts Network::param_counts() const {
    ParamCounts counts;
    for (const auto& l : layers_) {
        auto& mutable_layer = const_cast<Layer&>(*l);
        for (auto* p : mutable_layer.params()) counts.trainable += p->numel();
        for (auto* s : mutable_layer.state()) counts.non_trainable += s->numel();
    }
    return counts;
}

// -------------------------------------------------------------- Losses ----

LossResult mse_loss(const Tensor& pred, const Tensor& target) {
    if (!pred.same_shape(target)) throw_config("mse_loss: shape mismatch");
    const double batch = static_cast<double>(pred.dim(0));
    LossResult res;
    res.grad = Tensor(pred.shape);
    double acc = 0.0;
    for (size_t i = 0; i < pred.numel(); ++i) {
        const double d = pred.values[i] - target.values[i];
        acc += d * d;
        res.grad.values[i] = d / batch;
    }
    res.loss = 0.5 * acc / batch;
    return res;
}

LossResult bce_loss(const Tensor& pred, const Tensor& target) {
    if (!pred.same_shape(target)) throw_config("bce_loss: shape mismatch");
    constexpr double kClamp = 1e-7;
    const double n = static_cast<double>(pred.numel());
    LossResult res;
    res.grad = Tensor(pred.shape);
    double acc = 0.0;
    for (size_t i = 0; i < pred.numel(); ++i) {
        const double t = target.values[i];
        if (t != 0.0 && t != 1.0) {
            throw_config("bce_loss: targets must be exactly 0 or 1");
        }
        const double p = std::clamp(pred.values[i], kClamp, 1.0 - kClamp);
        acc -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
        // clamped values sit on a flat of the objective
        const bool clamped = pred.values[i] < kClamp || pred.values[i] > 1.0 - kClamp;
        res.grad.values[i] = clamped ? 0.0 : (p - t) / (p * (1.0 - p)) / n;
    }
    res.loss = acc / n;
    return res;
}

// ---------------------------------------------------------- grad check ----

GradCheckReport grad_check(Network& net, const Tensor& input, double tolerance,
                           uint64_t seed) {
    const double h = 1e-5;
    Rng rng(seed);

    Tensor probe = net.forward(input, true);
    Tensor target(probe.shape);
    for (auto& v : target.values) v = rng.uniform(-1.0, 1.0);

    auto objective = [&]() {
        Tensor out = net.forward(input, true);
        return mse_loss(out, target).loss;
    };

    // analytic gradients
    net.zero_grads();
    Tensor out = net.forward(input, true);
    LossResult loss = mse_loss(out, target);
    net.backward(loss.grad);

    auto params = net.params();
    auto grads = net.grads();
    GradCheckReport report;
    for (size_t p = 0; p < params.size(); ++p) {
        for (size_t i = 0; i < params[p]->numel(); ++i) {
            double& theta = params[p]->values[i];
            const double saved = theta;
            const double analytic = grads[p]->values[i];

            // A maxpool argmax flip or leaky-relu kink inside the step
            // window corrupts the central difference; shrinking the step
            // moves the kink outside, while a wrong analytic gradient stays
            // wrong at every step size.
            double rel = 0.0;
            double step = h;
            for (int attempt = 0; attempt < 3; ++attempt) {
                theta = saved + step;
                const double up = objective();
                theta = saved - step;
                const double down = objective();
                theta = saved;
                const double numeric = (up - down) / (2.0 * step);
                const double denom = std::max(1e-6, std::abs(numeric) + std::abs(analytic));
                rel = std::abs(numeric - analytic) / denom;
                if (rel < tolerance) break;
                step *= 0.1;
            }
            if (rel > report.max_rel_error) {
                report.max_rel_error = rel;
                report.worst_param = p;
                report.worst_index = i;
            }
        }
    }
    net.zero_grads();
    report.pass = report.max_rel_error < tolerance;
    return report;
}

// ---------------------------------------------------------- checkpoint ----

namespace {

void write_u64(std::ostream& out, uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_f64(std::ostream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
uint64_t read_u64(std::istream& in) {
    uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw_data("checkpoint: truncated stream");
    return v;
}
double read_f64(std::istream& in) {
    double v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw_data("checkpoint: truncated stream");
    return v;
}
void write_str(std::ostream& out, const std::string& s) {
    write_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}
std::string read_str(std::istream& in) {
    const uint64_t n = read_u64(in);
    if (n > (1u << 20)) throw_data("checkpoint: implausible string length");
    std::string s(n, '\0');
    in.read(s.data(), static_cast<std::streamsize>(n));
    if (!in) throw_data("checkpoint: truncated stream");
    return s;
}

} // namespace

void Network::save(std::ostream& out) const {
    write_u64(out, layers_.size());
    for (const auto& l : layers_) {
        const LayerSpec s = l->spec();
        write_str(out, s.kind);
        write_u64(out, s.ints.size());
        for (long long v : s.ints) write_u64(out, static_cast<uint64_t>(v));
        write_u64(out, s.reals.size());
        for (double v : s.reals) write_f64(out, v);

        auto& mutable_layer = const_cast<Layer&>(*l);
        auto write_tensors = [&out](const std::vector<Tensor*>& ts) {
            write_u64(out, ts.size());
            for (const Tensor* t : ts) {
                write_u64(out, t->shape.size());
                for (size_t d : t->shape) write_u64(out, d);
                out.write(reinterpret_cast<const char*>(t->values.data()),
                          static_cast<std::streamsize>(t->values.size() * sizeof(double)));
            }
        };
        write_tensors(mutable_layer.params());
        write_tensors(mutable_layer.state());
    }
}

Network Network::load(std::istream& in) {
    Network net;
    const uint64_t n_layers = read_u64(in);
    if (n_layers > 10000) throw_data("checkpoint: implausible layer count");
    for (uint64_t li = 0; li < n_layers; ++li) {
        LayerSpec s;
        s.kind = read_str(in);
        const uint64_t ni = read_u64(in);
        for (uint64_t i = 0; i < ni; ++i) s.ints.push_back(static_cast<long long>(read_u64(in)));
        const uint64_t nr = read_u64(in);
        for (uint64_t i = 0; i < nr; ++i) s.reals.push_back(read_f64(in));

        auto layer = make_layer(s);
        auto read_tensors = [&in](const std::vector<Tensor*>& ts) {
            const uint64_t count = read_u64(in);
            if (count != ts.size()) throw_data("checkpoint: tensor count mismatch");
            for (Tensor* t : ts) {
                const uint64_t rank = read_u64(in);
                std::vector<size_t> shape(rank);
                for (auto& d : shape) d = read_u64(in);
                if (shape != t->shape) throw_data("checkpoint: tensor shape mismatch");
                in.read(reinterpret_cast<char*>(t->values.data()),
                        static_cast<std::streamsize>(t->values.size() * sizeof(double)));
                if (!in) throw_data("checkpoint: truncated tensor payload");
            }
        };
        read_tensors(layer->params());
        read_tensors(layer->state());
        net.add(std::move(layer));
    }
    return net;
}

} // namespace eegsz::nn
