#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "core/classifiers.hpp"

namespace eegsz {

/// Positive class is HC = 1.
struct ConfusionMatrix {
    size_t tp = 0, fp = 0, tn = 0, fn = 0;
    size_t total() const { return tp + fp + tn + fn; }
};

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool degenerate = false;  // set when a zero denominator forced a 0
};

struct SplitIndices {
    std::vector<size_t> train, val, test;
};

/// Seeded shuffled 68/12/20-style split; group mode keeps every row of a
/// subject inside one part.
SplitIndices holdout_split(size_t n, std::array<double, 3> fractions, uint64_t seed,
                           const std::vector<std::string>* groups = nullptr);

struct Fold {
    std::vector<size_t> train, test;
};

/// Test folds partition the index set; sizes differ by at most one (by
/// group count in group mode).
std::vector<Fold> kfold(size_t n, size_t k, uint64_t seed,
                        const std::vector<std::string>* groups = nullptr);

ConfusionMatrix confusion(const std::vector<int>& labels, const std::vector<int>& predictions);

Metrics metrics(const ConfusionMatrix& cm);

/// Mann-Whitney formulation with midrank tie handling.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

/// Trapezoidal integration of the ROC curve; agrees with roc_auc to
/// floating-point accuracy and doubles as the plotting source.
double roc_auc_trapezoid(const std::vector<double>& scores, const std::vector<int>& labels);

/// ROC curve points (fpr, tpr) sorted by threshold, for plotting/export.
std::vector<std::array<double, 2>> roc_curve(const std::vector<double>& scores,
                                             const std::vector<int>& labels);

/// kappa = (p_o - p_e) / (1 - p_e); returns 0 with the degenerate flag when
/// chance agreement is exact.
double cohens_kappa(const ConfusionMatrix& cm, bool* degenerate = nullptr);

struct FoldResult {
    ConfusionMatrix cm;
    Metrics m;
    double auc = 0.0;
    double kappa = 0.0;
    std::vector<size_t> test_indices;
    // raw per-row outcomes, kept for ROC export
    std::vector<int> labels;
    std::vector<double> scores;
};

struct EvalReport {
    std::string pipeline;
    std::vector<FoldResult> folds;
    // order: accuracy, precision, recall, f1, auc, kappa
    std::array<double, 6> mean{};
    std::array<double, 6> stddev{};

    void finalize();
    std::string to_json() const;
    void save_csv(const std::string& path) const;
};

/// Feature-space pipeline driven per fold: fit on the train rows, then
/// score the test rows.
struct Pipeline {
    std::function<void(const FeatureMatrix& train)> fit;
    std::function<std::array<double, 2>(const double* x, size_t dim)> predict_proba;
};

EvalReport cross_validate(const FeatureMatrix& data, size_t k, uint64_t seed, bool group_mode,
                          Pipeline& pipeline, const std::string& name = "pipeline");

FoldResult evaluate_predictions(const std::vector<int>& labels,
                                const std::vector<double>& scores_p1);

} // namespace eegsz
