#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "core/nn/network.hpp"

namespace eegsz {

/// Sample rows with binary labels and per-row subject ids (group ids keep
/// leakage-safe splits possible downstream).
struct FeatureMatrix {
    size_t cols = 0;
    std::vector<double> values;       // rows * cols, row-major
    std::vector<int> labels;          // 0 = SZ, 1 = HC
    std::vector<std::string> groups;  // subject id per row

    size_t rows() const { return cols == 0 ? 0 : values.size() / cols; }
    const double* row(size_t r) const { return values.data() + r * cols; }
    void add_row(const double* x, int label, std::string group);
};

void save_features_csv(const FeatureMatrix& fm, const std::string& path);
FeatureMatrix load_features_csv(const std::string& path);

class ProbClassifier {
public:
    virtual ~ProbClassifier() = default;
    virtual const char* kind() const = 0;
    virtual void fit(const FeatureMatrix& data) = 0;
    /// Returns {p0, p1}; the two entries sum to one.
    virtual std::array<double, 2> predict_proba(const double* x, size_t dim) const = 0;
    bool fitted() const { return fitted_; }

    /// argmax class; ties resolve to HC (1)
    int predict(const double* x, size_t dim) const {
        const auto p = predict_proba(x, dim);
        return p[1] >= p[0] ? 1 : 0;
    }

protected:
    bool fitted_ = false;
};

/// Euclidean k-nearest-neighbours; distance ties break toward the lower
/// training index.
class KnnClassifier final : public ProbClassifier {
public:
    explicit KnnClassifier(size_t k = 5) : k_(k) {}
    const char* kind() const override { return "knn"; }
    void fit(const FeatureMatrix& data) override;
    std::array<double, 2> predict_proba(const double* x, size_t dim) const override;

private:
    size_t k_;
    FeatureMatrix train_;
};

/// Linear SVC: minimizes 0.5*||w||^2 + C * sum hinge(y*(w.x+b)) by
/// deterministic subgradient descent, then calibrates probabilities with a
/// logistic fit on the training margins.
class LinearSvcClassifier final : public ProbClassifier {
public:
    explicit LinearSvcClassifier(double c = 1.0, size_t iterations = 2000)
        : c_(c), iterations_(iterations) {}
    const char* kind() const override { return "svc"; }
    void fit(const FeatureMatrix& data) override;
    std::array<double, 2> predict_proba(const double* x, size_t dim) const override;

    double margin(const double* x, size_t dim) const;
    double objective(const FeatureMatrix& data) const;
    const std::vector<double>& weights() const { return w_; }
    double bias() const { return b_; }
    double calib_a() const { return calib_a_; }
    double calib_b() const { return calib_b_; }

private:
    double c_;
    size_t iterations_;
    std::vector<double> w_;
    double b_ = 0.0;
    double calib_a_ = 1.0, calib_b_ = 0.0;
};

/// Bagged CART forest with Gini splits and sqrt(d) feature subsampling.
class RandomForestClassifier final : public ProbClassifier {
public:
    RandomForestClassifier(size_t n_trees = 50, int max_depth = -1, uint64_t seed = 1,
                           bool bootstrap = true)
        : n_trees_(n_trees), max_depth_(max_depth), seed_(seed), bootstrap_(bootstrap) {}
    const char* kind() const override { return "rf"; }
    void fit(const FeatureMatrix& data) override;
    std::array<double, 2> predict_proba(const double* x, size_t dim) const override;

    static double gini(size_t count0, size_t count1);

private:
    struct Node {
        int feature = -1;       // -1 marks a leaf
        double threshold = 0.0;
        int left = -1, right = -1;
        int vote = 1;           // leaf majority; ties resolve to HC
    };
    struct Tree {
        std::vector<Node> nodes;
    };

    int classify(const Tree& tree, const double* x) const;

    size_t n_trees_;
    int max_depth_;
    uint64_t seed_;
    bool bootstrap_;
    size_t dim_ = 0;
    std::vector<Tree> trees_;
};

/// Unweighted mean of member probability vectors.
class SoftVoteClassifier final : public ProbClassifier {
public:
    explicit SoftVoteClassifier(std::vector<std::shared_ptr<ProbClassifier>> members);
    const char* kind() const override { return "vote"; }
    void fit(const FeatureMatrix& data) override;
    std::array<double, 2> predict_proba(const double* x, size_t dim) const override;

private:
    std::vector<std::shared_ptr<ProbClassifier>> members_;
};

/// Small image classifier: four conv/max-pool stages, then four dense
/// layers ending in a sigmoid probability. Height and width must be
/// divisible by 16.
nn::Network build_cnn2d(size_t height, size_t width, double alpha = 0.2, uint64_t seed = 1);

struct CnnTrainResult {
    std::vector<double> loss_history;
};

/// Binary cross-entropy + Adam training loop over (1 x H x W) image tensors.
CnnTrainResult train_cnn2d(nn::Network& net, const std::vector<nn::Tensor>& images,
                           const std::vector<int>& labels, size_t epochs, size_t batch_size,
                           double learning_rate, uint64_t seed);

/// Sigmoid output for one image (inference mode).
double cnn_predict(nn::Network& net, const nn::Tensor& image);

} // namespace eegsz
