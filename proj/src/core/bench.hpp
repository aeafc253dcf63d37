#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/cae.hpp"
#include "core/dataset.hpp"
#include "core/eval.hpp"

namespace eegsz {

/// Knobs for the two cross-validated pipelines. Every random choice is
/// derived from `seed`, so a repeated run reproduces the same report.
struct BenchmarkOptions {
    size_t k = 5;
    uint64_t seed = 7;
    bool subject_wise = true;
    std::string wavelet = "db4";

    // bottleneck-feature branch
    size_t window = 512;
    size_t channel_stride = 4;   // use channels 0, stride, 2*stride, ...
    size_t cae_epochs = 10;
    size_t cae_batch = 32;
    size_t max_cae_train = 1600; // per-fold training-set cap, 0 = unlimited
    double cae_lr = 1e-3;
    size_t knn_k = 5;
    double svc_c = 1.0;
    size_t svc_iterations = 600;
    size_t rf_trees = 50;
    int rf_depth = 12;

    // scalogram + 2D-CNN branch
    size_t image_size = 64;
    size_t cnn_epochs = 20;
    size_t cnn_batch = 8;
    double cnn_lr = 1e-3;
    size_t cnn_channel_stride = 16;  // channel 0 only by default
};

/// CAE feature tensors for every recording, flattened over (subject,
/// channel, window); metadata rows are parallel to the tensor list.
struct PreparedInputs {
    std::vector<nn::Tensor> tensors;
    std::vector<int> labels;
    std::vector<size_t> subject;  // index into the recording list
    std::vector<size_t> channel;
    std::vector<size_t> window_index;
    std::vector<std::string> subject_ids;  // per recording
};

PreparedInputs prepare_benchmark_inputs(const std::vector<EegRecording>& recs,
                                        const BenchmarkOptions& opts);

/// 5-fold (subject-wise) CV of CAE bottleneck features with KNN, SVC, RF
/// and their soft vote. The CAE is retrained inside each fold on the train
/// subjects only. Keys: "knn", "svc", "rf", "vote".
std::map<std::string, EvalReport> run_cae_benchmark(const std::vector<EegRecording>& recs,
                                                    const BenchmarkOptions& opts);

/// Scalogram images per subject/channel classified with the small 2D-CNN,
/// cross-validated subject-wise.
EvalReport run_cnn_benchmark(const std::vector<EegRecording>& recs,
                             const BenchmarkOptions& opts);

/// Scalogram of one channel rendered to a normalized (1 x size x size)
/// tensor in [0, 1] (log intensity scaling).
nn::Tensor scalogram_image_tensor(const std::vector<double>& channel, double fs,
                                  size_t image_size);

/// Encodes prepared inputs through a trained CAE into a feature matrix.
FeatureMatrix encode_features(Cae& cae, const PreparedInputs& prepared,
                              const std::vector<size_t>& tensor_indices);

} // namespace eegsz
