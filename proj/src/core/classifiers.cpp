#include "core/classifiers.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "core/cae.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"

namespace eegsz {

// ------------------------------------------------------- FeatureMatrix ----

void FeatureMatrix::add_row(const double* x, int label, std::string group) {
    if (cols == 0) throw_config("feature matrix: cols not set");
    values.insert(values.end(), x, x + cols);
    labels.push_back(label);
    groups.push_back(std::move(group));
}

void save_features_csv(const FeatureMatrix& fm, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw_data("cannot write features: " + path);
    out << "group,label";
    for (size_t c = 0; c < fm.cols; ++c) out << ",f" << c;
    out << '\n';
    out.precision(17);
    for (size_t r = 0; r < fm.rows(); ++r) {
        out << fm.groups[r] << ',' << fm.labels[r];
        const double* row = fm.row(r);
        for (size_t c = 0; c < fm.cols; ++c) out << ',' << row[c];
        out << '\n';
    }
}

FeatureMatrix load_features_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_data("cannot open features: " + path);
    std::string line;
    if (!std::getline(in, line)) throw_data("features file is empty: " + path);

    FeatureMatrix fm;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string group, label_str, tok;
        if (!std::getline(ls, group, ',') || !std::getline(ls, label_str, ',')) {
            throw_data(path + ": malformed row on line " + std::to_string(line_no));
        }
        std::vector<double> row;
        while (std::getline(ls, tok, ',')) {
            double v = 0.0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || p != tok.data() + tok.size()) {
                throw_data(path + ": bad value '" + tok + "' on line " + std::to_string(line_no));
            }
            row.push_back(v);
        }
        if (fm.cols == 0) fm.cols = row.size();
        if (row.size() != fm.cols) {
            throw_data(path + ": inconsistent column count on line " + std::to_string(line_no));
        }
        fm.add_row(row.data(), label_str == "1" ? 1 : 0, group);
    }
    return fm;
}

// ----------------------------------------------------------------- KNN ----

void KnnClassifier::fit(const FeatureMatrix& data) {
    if (data.rows() == 0) throw_data("knn: empty training set");
    if (k_ == 0 || k_ > data.rows()) {
        throw_config("knn: k=" + std::to_string(k_) + " invalid for " +
                     std::to_string(data.rows()) + " rows");
    }
    train_ = data;
    fitted_ = true;
}

std::array<double, 2> KnnClassifier::predict_proba(const double* x, size_t dim) const {
    if (!fitted_) throw_config("knn: predict before fit");
    if (dim != train_.cols) throw_config("knn: query dimension mismatch");

    const size_t n = train_.rows();
    std::vector<std::pair<double, size_t>> dist(n);
    for (size_t r = 0; r < n; ++r) {
        const double* t = train_.row(r);
        double acc = 0.0;
        for (size_t c = 0; c < dim; ++c) {
            const double d = t[c] - x[c];
            acc += d * d;
        }
        dist[r] = {acc, r};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_), dist.end());

    size_t positive = 0;
    for (size_t i = 0; i < k_; ++i) positive += train_.labels[dist[i].second] == 1 ? 1 : 0;
    const double p1 = static_cast<double>(positive) / static_cast<double>(k_);
    return {1.0 - p1, p1};
}

// ----------------------------------------------------------- LinearSvc ----

double LinearSvcClassifier::margin(const double* x, size_t dim) const {
    double acc = b_;
    for (size_t c = 0; c < dim; ++c) acc += w_[c] * x[c];
    return acc;
}

double LinearSvcClassifier::objective(const FeatureMatrix& data) const {
    double obj = 0.0;
    for (double v : w_) obj += 0.5 * v * v;
    for (size_t r = 0; r < data.rows(); ++r) {
        const double y = data.labels[r] == 1 ? 1.0 : -1.0;
        obj += c_ * std::max(0.0, 1.0 - y * margin(data.row(r), data.cols));
    }
    return obj;
}

void LinearSvcClassifier::fit(const FeatureMatrix& data) {
    const size_t n = data.rows();
    if (n == 0) throw_data("svc: empty training set");
    bool has0 = false, has1 = false;
    for (int l : data.labels) (l == 1 ? has1 : has0) = true;
    if (!has0 || !has1) throw_data("svc: degenerate labels, need at least one sample per class");

    const size_t d = data.cols;
    w_.assign(d, 0.0);
    b_ = 0.0;

    std::vector<double> best_w = w_;
    double best_b = 0.0;
    double best_obj = objective(data);

    // full-batch subgradient descent with a decaying step; the best iterate
    // by objective value is kept
    std::vector<double> gw(d);
    for (size_t t = 0; t < iterations_; ++t) {
        std::copy(w_.begin(), w_.end(), gw.begin());
        double gb = 0.0;
        for (size_t r = 0; r < n; ++r) {
            const double y = data.labels[r] == 1 ? 1.0 : -1.0;
            const double* x = data.row(r);
            if (y * margin(x, d) < 1.0) {
                for (size_t c = 0; c < d; ++c) gw[c] -= c_ * y * x[c];
                gb -= c_ * y;
            }
        }
        const double eta = 1.0 / (1.0 + static_cast<double>(t));
        for (size_t c = 0; c < d; ++c) w_[c] -= eta * gw[c];
        b_ -= eta * gb;

        const double obj = objective(data);
        if (obj < best_obj) {
            best_obj = obj;
            best_w = w_;
            best_b = b_;
        }
    }
    w_ = best_w;
    b_ = best_b;

    // Platt-style calibration with smoothed targets so separable data keeps
    // a finite optimum
    size_t n_pos = 0, n_neg = 0;
    for (int l : data.labels) (l == 1 ? n_pos : n_neg)++;
    const double t_pos = (static_cast<double>(n_pos) + 1.0) / (static_cast<double>(n_pos) + 2.0);
    const double t_neg = 1.0 / (static_cast<double>(n_neg) + 2.0);

    std::vector<double> margins(n);
    for (size_t r = 0; r < n; ++r) margins[r] = margin(data.row(r), d);

    double a = 1.0, bc = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        double ga = 0.0, gb2 = 0.0;
        for (size_t r = 0; r < n; ++r) {
            const double t = data.labels[r] == 1 ? t_pos : t_neg;
            const double p = 1.0 / (1.0 + std::exp(-(a * margins[r] + bc)));
            ga += (p - t) * margins[r];
            gb2 += (p - t);
        }
        const double lr = 0.05 / static_cast<double>(n);
        a -= lr * ga;
        bc -= lr * gb2;
    }
    calib_a_ = a;
    calib_b_ = bc;
    fitted_ = true;
}

std::array<double, 2> LinearSvcClassifier::predict_proba(const double* x, size_t dim) const {
    if (!fitted_) throw_config("svc: predict before fit");
    if (dim != w_.size()) throw_config("svc: query dimension mismatch");
    const double p1 = 1.0 / (1.0 + std::exp(-(calib_a_ * margin(x, dim) + calib_b_)));
    return {1.0 - p1, p1};
}

// --------------------------------------------------------- RandomForest ----

double RandomForestClassifier::gini(size_t count0, size_t count1) {
    const double n = static_cast<double>(count0 + count1);
    if (n == 0.0) return 0.0;
    const double p0 = static_cast<double>(count0) / n;
    const double p1 = static_cast<double>(count1) / n;
    return 1.0 - p0 * p0 - p1 * p1;
}

namespace {

struct TreeBuilder {
    const FeatureMatrix& data;
    size_t n_features;
    size_t mtry;
    int max_depth;
    Rng& rng;

    struct NodeRec {
        int feature = -1;
        double threshold = 0.0;
        int left = -1, right = -1;
        int vote = 1;
    };
    std::vector<NodeRec> nodes;

    int build(std::vector<size_t> idx, int depth) {
        size_t c0 = 0, c1 = 0;
        for (size_t r : idx) (data.labels[r] == 1 ? c1 : c0)++;

        NodeRec node;
        node.vote = (c1 >= c0) ? 1 : 0;
        const int node_id = static_cast<int>(nodes.size());
        nodes.push_back(node);

        if (c0 == 0 || c1 == 0 || idx.size() < 2 ||
            (max_depth >= 0 && depth >= max_depth)) {
            return node_id;
        }

        // sqrt(d) candidate features per split, sampled without replacement
        std::vector<size_t> features(n_features);
        std::iota(features.begin(), features.end(), size_t{0});
        for (size_t i = 0; i < mtry; ++i) {
            std::swap(features[i], features[i + rng.index(n_features - i)]);
        }

        const double parent_gini = RandomForestClassifier::gini(c0, c1);
        double best_gain = 1e-12;
        int best_feature = -1;
        double best_threshold = 0.0;

        std::vector<std::pair<double, int>> vals(idx.size());
        for (size_t fi = 0; fi < mtry; ++fi) {
            const size_t f = features[fi];
            for (size_t i = 0; i < idx.size(); ++i) {
                vals[i] = {data.row(idx[i])[f], data.labels[idx[i]]};
            }
            std::sort(vals.begin(), vals.end());

            size_t lc0 = 0, lc1 = 0, rc0 = c0, rc1 = c1;
            for (size_t i = 0; i + 1 < vals.size(); ++i) {
                (vals[i].second == 1 ? lc1 : lc0)++;
                (vals[i].second == 1 ? rc1 : rc0)--;
                if (vals[i].first == vals[i + 1].first) continue;
                const double nl = static_cast<double>(lc0 + lc1);
                const double nr = static_cast<double>(rc0 + rc1);
                const double total = nl + nr;
                const double child = (nl / total) * RandomForestClassifier::gini(lc0, lc1) +
                                     (nr / total) * RandomForestClassifier::gini(rc0, rc1);
                const double gain = parent_gini - child;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                    best_threshold = 0.5 * (vals[i].first + vals[i + 1].first);
                }
            }
        }
        if (best_feature < 0) return node_id;

        std::vector<size_t> left_idx, right_idx;
        for (size_t r : idx) {
            (data.row(r)[static_cast<size_t>(best_feature)] <= best_threshold ? left_idx
                                                                              : right_idx)
                .push_back(r);
        }
        if (left_idx.empty() || right_idx.empty()) return node_id;

        idx.clear();
        idx.shrink_to_fit();
        const int left = build(std::move(left_idx), depth + 1);
        const int right = build(std::move(right_idx), depth + 1);
        nodes[static_cast<size_t>(node_id)].feature = best_feature;
        nodes[static_cast<size_t>(node_id)].threshold = best_threshold;
        nodes[static_cast<size_t>(node_id)].left = left;
        nodes[static_cast<size_t>(node_id)].right = right;
        return node_id;
    }
};

} // namespace

void RandomForestClassifier::fit(const FeatureMatrix& data) {
    const size_t n = data.rows();
    if (n == 0) throw_data("random forest: empty training set");
    if (n_trees_ == 0) throw_config("random forest: need at least one tree");
    dim_ = data.cols;
    trees_.clear();
    trees_.reserve(n_trees_);

    const size_t mtry = std::max<size_t>(
        1, static_cast<size_t>(std::sqrt(static_cast<double>(data.cols))));

    for (size_t t = 0; t < n_trees_; ++t) {
        Rng rng(splitmix64(seed_ + 0x51ed2701u * (t + 1)));
        std::vector<size_t> sample(n);
        if (bootstrap_) {
            for (auto& s : sample) s = rng.index(n);
        } else {
            std::iota(sample.begin(), sample.end(), size_t{0});
        }
        TreeBuilder builder{data, data.cols, mtry, max_depth_, rng, {}};
        builder.build(std::move(sample), 0);
        Tree tree;
        tree.nodes.reserve(builder.nodes.size());
        for (const auto& nr : builder.nodes) {
            tree.nodes.push_back({nr.feature, nr.threshold, nr.left, nr.right, nr.vote});
        }
        trees_.push_back(std::move(tree));
    }
    fitted_ = true;
}

int RandomForestClassifier::classify(const Tree& tree, const double* x) const {
    int cur = 0;
    while (tree.nodes[static_cast<size_t>(cur)].feature >= 0) {
        const Node& nd = tree.nodes[static_cast<size_t>(cur)];
        cur = x[static_cast<size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
    }
    return tree.nodes[static_cast<size_t>(cur)].vote;
}

std::array<double, 2> RandomForestClassifier::predict_proba(const double* x, size_t dim) const {
    if (!fitted_) throw_config("random forest: predict before fit");
    if (dim != dim_) throw_config("random forest: query dimension mismatch");
    size_t votes1 = 0;
    for (const auto& tree : trees_) votes1 += classify(tree, x) == 1 ? 1 : 0;
    const double p1 = static_cast<double>(votes1) / static_cast<double>(trees_.size());
    return {1.0 - p1, p1};
}

// ------------------------------------------------------------ SoftVote ----

SoftVoteClassifier::SoftVoteClassifier(std::vector<std::shared_ptr<ProbClassifier>> members)
    : members_(std::move(members)) {
    if (members_.size() < 2) throw_config("soft vote: need at least two members");
}

void SoftVoteClassifier::fit(const FeatureMatrix& data) {
    for (auto& m : members_) m->fit(data);
    fitted_ = true;
}

std::array<double, 2> SoftVoteClassifier::predict_proba(const double* x, size_t dim) const {
    double p0 = 0.0, p1 = 0.0;
    for (const auto& m : members_) {
        if (!m->fitted()) {
            throw_config(std::string("soft vote: member '") + m->kind() + "' is not fitted");
        }
        const auto p = m->predict_proba(x, dim);
        p0 += p[0];
        p1 += p[1];
    }
    const double n = static_cast<double>(members_.size());
    return {p0 / n, p1 / n};
}

// ----------------------------------------------------------------- CNN ----

nn::Network build_cnn2d(size_t height, size_t width, double alpha, uint64_t seed) {
    if (height % 16 != 0 || width % 16 != 0) {
        throw_config("cnn2d: image height and width must be divisible by 16, got " +
                     std::to_string(height) + "x" + std::to_string(width));
    }
    nn::Network net;
    const size_t filters[4] = {8, 16, 32, 64};
    size_t in_ch = 1;
    for (size_t f : filters) {
        net.add(nn::make_conv2d(in_ch, f, 3, 3, 1, 1, 1, 1));
        net.add(nn::make_leaky_relu(alpha));
        net.add(nn::make_maxpool2d(2, 2));
        in_ch = f;
    }
    net.add(nn::make_flatten());
    const size_t flat = 64 * (height / 16) * (width / 16);
    net.add(nn::make_dense(flat, 128));
    net.add(nn::make_leaky_relu(alpha));
    net.add(nn::make_dense(128, 64));
    net.add(nn::make_leaky_relu(alpha));
    net.add(nn::make_dense(64, 16));
    net.add(nn::make_leaky_relu(alpha));
    net.add(nn::make_dense(16, 1));
    net.add(nn::make_sigmoid());
    net.init(seed);
    return net;
}

CnnTrainResult train_cnn2d(nn::Network& net, const std::vector<nn::Tensor>& images,
                           const std::vector<int>& labels, size_t epochs, size_t batch_size,
                           double learning_rate, uint64_t seed) {
    if (images.size() != labels.size() || images.empty()) {
        throw_config("cnn train: images and labels must be non-empty and parallel");
    }
    nn::Adam adam(nn::AdamConfig{learning_rate, 0.9, 0.999, 1e-8});
    Rng shuffle_rng(splitmix64(seed));
    std::vector<size_t> order(images.size());
    std::iota(order.begin(), order.end(), size_t{0});

    CnnTrainResult result;
    for (size_t epoch = 0; epoch < epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        for (size_t start = 0; start < order.size(); start += batch_size) {
            const size_t end = std::min(start + batch_size, order.size());
            std::vector<size_t> idx(order.begin() + start, order.begin() + end);
            nn::Tensor batch = stack_batch(images, idx);
            nn::Tensor target({idx.size(), 1});
            for (size_t i = 0; i < idx.size(); ++i) {
                target.values[i] = labels[idx[i]] == 1 ? 1.0 : 0.0;
            }
            net.zero_grads();
            nn::Tensor out = net.forward(batch, true);
            nn::LossResult loss = nn::bce_loss(out, target);
            if (!std::isfinite(loss.loss)) {
                throw_numeric("cnn train: loss diverged at epoch " + std::to_string(epoch));
            }
            net.backward(loss.grad);
            adam.step(net.params(), net.grads());
            loss_sum += loss.loss * static_cast<double>(idx.size());
        }
        result.loss_history.push_back(loss_sum / static_cast<double>(images.size()));
    }
    return result;
}

double cnn_predict(nn::Network& net, const nn::Tensor& image) {
    nn::Tensor x = image;
    if (x.rank() == 3) x.shape.insert(x.shape.begin(), 1);
    return net.forward(x, false).values[0];
}

} // namespace eegsz
