#include "core/bench.hpp"

#include <algorithm>
#include <numeric>

#include "core/cwt.hpp"
#include "core/error.hpp"
#include "core/image.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace eegsz {

PreparedInputs prepare_benchmark_inputs(const std::vector<EegRecording>& recs,
                                        const BenchmarkOptions& opts) {
    if (recs.empty()) throw_data("benchmark: empty dataset");
    const WaveletFilter filter = WaveletFilter::create(opts.wavelet);

    PreparedInputs out;
    for (const auto& rec : recs) out.subject_ids.push_back(rec.subject_id);

    std::vector<std::vector<nn::Tensor>> per_subject(recs.size());
    parallel_for(recs.size(), [&](size_t s) {
        per_subject[s] = prepare_cae_inputs(recs[s], opts.window, filter, opts.channel_stride);
    });

    const size_t windows_per_channel = (recs[0].data.cols() - opts.window) / opts.window + 1;
    for (size_t s = 0; s < recs.size(); ++s) {
        size_t ch = 0, wi = 0;
        for (auto& t : per_subject[s]) {
            out.tensors.push_back(std::move(t));
            out.labels.push_back(static_cast<int>(recs[s].label));
            out.subject.push_back(s);
            out.channel.push_back(ch);
            out.window_index.push_back(wi);
            if (++wi == windows_per_channel) {
                wi = 0;
                ch += opts.channel_stride;
            }
        }
    }
    return out;
}

FeatureMatrix encode_features(Cae& cae, const PreparedInputs& prepared,
                              const std::vector<size_t>& tensor_indices) {
    FeatureMatrix fm;
    fm.cols = cae.bottleneck_width();
    for (size_t i : tensor_indices) {
        const auto feats = cae.encode(prepared.tensors[i]);
        fm.add_row(feats.data(), prepared.labels[i],
                   prepared.subject_ids[prepared.subject[i]]);
    }
    return fm;
}

namespace {

std::vector<size_t> tensors_of_subjects(const PreparedInputs& prepared,
                                        const std::vector<size_t>& subjects) {
    std::vector<bool> keep(prepared.subject_ids.size(), false);
    for (size_t s : subjects) keep[s] = true;
    std::vector<size_t> out;
    for (size_t i = 0; i < prepared.tensors.size(); ++i) {
        if (keep[prepared.subject[i]]) out.push_back(i);
    }
    return out;
}

} // namespace

std::map<std::string, EvalReport> run_cae_benchmark(const std::vector<EegRecording>& recs,
                                                    const BenchmarkOptions& opts) {
    PreparedInputs prepared = prepare_benchmark_inputs(recs, opts);

    // subject-wise folds keep every channel and window of a test subject
    // out of training; sample-wise folds mirror a window-level protocol
    std::vector<std::pair<std::vector<size_t>, std::vector<size_t>>> fold_tensors;
    if (opts.subject_wise) {
        for (const auto& fold : kfold(recs.size(), opts.k, opts.seed)) {
            fold_tensors.push_back({tensors_of_subjects(prepared, fold.train),
                                    tensors_of_subjects(prepared, fold.test)});
        }
    } else {
        for (const auto& fold : kfold(prepared.tensors.size(), opts.k, opts.seed)) {
            fold_tensors.push_back({fold.train, fold.test});
        }
    }

    const char* names[4] = {"knn", "svc", "rf", "vote"};
    std::map<std::string, EvalReport> reports;
    for (const char* n : names) reports[n].pipeline = std::string("cae+") + n;

    struct FoldOut {
        std::map<std::string, FoldResult> results;
    };
    std::vector<FoldOut> fold_outs(fold_tensors.size());

    parallel_for(fold_tensors.size(), [&](size_t f) {
        std::vector<size_t> train_idx = fold_tensors[f].first;
        const std::vector<size_t>& test_idx = fold_tensors[f].second;

        // per-fold CAE training (bounded subsample keeps desk-scale runtime)
        std::vector<size_t> cae_train = train_idx;
        if (opts.max_cae_train > 0 && cae_train.size() > opts.max_cae_train) {
            Rng rng(splitmix64(opts.seed ^ (0xf01dab1eULL + f)));
            rng.shuffle(cae_train);
            cae_train.resize(opts.max_cae_train);
            std::sort(cae_train.begin(), cae_train.end());
        }

        CaeConfig cfg;
        cfg.window = opts.window;
        cfg.epochs = opts.cae_epochs;
        cfg.batch_size = opts.cae_batch;
        cfg.learning_rate = opts.cae_lr;
        cfg.seed = splitmix64(opts.seed + 0xcae0 + f);
        cfg.wavelet = opts.wavelet;
        Cae cae = Cae::build(cfg);
        std::vector<nn::Tensor> train_tensors;
        train_tensors.reserve(cae_train.size());
        for (size_t i : cae_train) train_tensors.push_back(prepared.tensors[i]);
        cae.train(train_tensors);

        FeatureMatrix train_fm = encode_features(cae, prepared, train_idx);
        FeatureMatrix test_fm = encode_features(cae, prepared, test_idx);

        // column-wise standardization fitted on the train rows only
        std::vector<double> mean(train_fm.cols, 0.0), inv_std(train_fm.cols, 1.0);
        const double n_train = static_cast<double>(train_fm.rows());
        for (size_t r = 0; r < train_fm.rows(); ++r) {
            for (size_t c = 0; c < train_fm.cols; ++c) mean[c] += train_fm.row(r)[c];
        }
        for (auto& m : mean) m /= n_train;
        std::vector<double> var(train_fm.cols, 0.0);
        for (size_t r = 0; r < train_fm.rows(); ++r) {
            for (size_t c = 0; c < train_fm.cols; ++c) {
                const double d = train_fm.row(r)[c] - mean[c];
                var[c] += d * d;
            }
        }
        for (size_t c = 0; c < train_fm.cols; ++c) {
            inv_std[c] = var[c] > 0.0 ? 1.0 / std::sqrt(var[c] / n_train) : 1.0;
        }
        auto standardize = [&](FeatureMatrix& fm) {
            for (size_t r = 0; r < fm.rows(); ++r) {
                double* row = fm.values.data() + r * fm.cols;
                for (size_t c = 0; c < fm.cols; ++c) row[c] = (row[c] - mean[c]) * inv_std[c];
            }
        };
        standardize(train_fm);
        standardize(test_fm);

        auto knn = std::make_shared<KnnClassifier>(opts.knn_k);
        auto svc = std::make_shared<LinearSvcClassifier>(opts.svc_c, opts.svc_iterations);
        auto rf = std::make_shared<RandomForestClassifier>(
            opts.rf_trees, opts.rf_depth, splitmix64(opts.seed + 0x4f0 + f));
        knn->fit(train_fm);
        svc->fit(train_fm);
        rf->fit(train_fm);
        SoftVoteClassifier vote({knn, svc, rf});

        auto eval_one = [&](const char* name, const ProbClassifier& clf) {
            std::vector<int> labels;
            std::vector<double> scores;
            for (size_t r = 0; r < test_fm.rows(); ++r) {
                labels.push_back(test_fm.labels[r]);
                scores.push_back(clf.predict_proba(test_fm.row(r), test_fm.cols)[1]);
            }
            fold_outs[f].results[name] = evaluate_predictions(labels, scores);
        };
        eval_one("knn", *knn);
        eval_one("svc", *svc);
        eval_one("rf", *rf);
        eval_one("vote", vote);
    });

    for (auto& out : fold_outs) {
        for (auto& [name, fr] : out.results) reports[name].folds.push_back(fr);
    }
    for (auto& [name, rep] : reports) rep.finalize();
    return reports;
}

nn::Tensor scalogram_image_tensor(const std::vector<double>& channel, double fs,
                                  size_t image_size) {
    const CwtFilterBank bank = build_filterbank(0.5, 50.0, 12, fs);
    const Scalogram scal = cwt(channel, bank);
    const GrayImage img = render_tf_image(scal.magnitudes, image_size, image_size,
                                          IntensityScale::Log, false);
    nn::Tensor t({1, image_size, image_size});
    for (size_t i = 0; i < img.pixels.size(); ++i) {
        t.values[i] = static_cast<double>(img.pixels[i]) / 255.0;
    }
    return t;
}

EvalReport run_cnn_benchmark(const std::vector<EegRecording>& recs,
                             const BenchmarkOptions& opts) {
    if (recs.empty()) throw_data("benchmark: empty dataset");

    // images do not depend on the fold; build them once
    struct ImageRow {
        nn::Tensor tensor;
        int label;
        size_t subject;
    };
    std::vector<std::vector<ImageRow>> per_subject(recs.size());
    parallel_for(recs.size(), [&](size_t s) {
        const auto& rec = recs[s];
        for (size_t ch = 0; ch < rec.data.rows(); ch += opts.cnn_channel_stride) {
            std::vector<double> channel(rec.data.row(ch), rec.data.row(ch) + rec.data.cols());
            per_subject[s].push_back({scalogram_image_tensor(channel, rec.fs, opts.image_size),
                                      static_cast<int>(rec.label), s});
        }
    });
    std::vector<ImageRow> images;
    for (auto& rows : per_subject) {
        for (auto& r : rows) images.push_back(std::move(r));
    }

    const auto folds = kfold(recs.size(), opts.k, opts.seed);
    std::vector<FoldResult> fold_results(folds.size());

    parallel_for(folds.size(), [&](size_t f) {
        const auto& fold = folds[f];
        std::vector<bool> in_train(recs.size(), false);
        for (size_t s : fold.train) in_train[s] = true;

        std::vector<nn::Tensor> train_images;
        std::vector<int> train_labels;
        std::vector<size_t> test_rows;
        for (size_t i = 0; i < images.size(); ++i) {
            if (in_train[images[i].subject]) {
                train_images.push_back(images[i].tensor);
                train_labels.push_back(images[i].label);
            } else {
                test_rows.push_back(i);
            }
        }

        nn::Network net = build_cnn2d(opts.image_size, opts.image_size, 0.2,
                                      splitmix64(opts.seed + 0xc22 + f));
        train_cnn2d(net, train_images, train_labels, opts.cnn_epochs, opts.cnn_batch,
                    opts.cnn_lr, splitmix64(opts.seed + 0x5c1 + f));

        std::vector<int> labels;
        std::vector<double> scores;
        for (size_t i : test_rows) {
            labels.push_back(images[i].label);
            scores.push_back(cnn_predict(net, images[i].tensor));
        }
        fold_results[f] = evaluate_predictions(labels, scores);
    });

    EvalReport report;
    report.pipeline = "scalogram+cnn2d";
    report.folds = std::move(fold_results);
    report.finalize();
    return report;
}

} // namespace eegsz
