#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "eegsz/eegsz.h"

namespace fs = std::filesystem;

TEST_CASE("version and error strings are always valid") {
    CHECK(std::string(eegsz_version()).find("eegsz") != std::string::npos);
    CHECK(eegsz_last_error() != nullptr);
}

TEST_CASE("null pointers are rejected with a status, not a crash") {
    CHECK(eegsz_recording_load(nullptr, "s", 0, nullptr) == EEGSZ_ERR_NULLPTR);
    CHECK(eegsz_recording_synth(0, 1, nullptr) == EEGSZ_ERR_NULLPTR);
    CHECK(std::string(eegsz_last_error()).find("null") != std::string::npos);
}

TEST_CASE("synthetic recording: accessors and channel copy-out") {
    eegsz_recording* rec = nullptr;
    REQUIRE(eegsz_recording_synth(EEGSZ_LABEL_SZ, 5, &rec) == EEGSZ_OK);
    CHECK(eegsz_recording_label(rec) == EEGSZ_LABEL_SZ);
    CHECK(eegsz_recording_fs(rec) == 128.0);
    CHECK(std::string(eegsz_recording_subject_id(rec)).size() > 0);

    std::vector<double> ch(EEGSZ_SAMPLES);
    CHECK(eegsz_recording_channel(rec, 0, ch.data(), ch.size()) == EEGSZ_OK);
    CHECK(eegsz_recording_channel(rec, 16, ch.data(), ch.size()) == EEGSZ_ERR_CONFIG);
    CHECK(eegsz_recording_channel(rec, 0, ch.data(), 10) == EEGSZ_ERR_CONFIG);
    eegsz_recording_free(rec);
}

TEST_CASE("save, load, and normalize through the C surface") {
    eegsz_recording* rec = nullptr;
    REQUIRE(eegsz_recording_synth(EEGSZ_LABEL_HC, 9, &rec) == EEGSZ_OK);
    REQUIRE(eegsz_recording_save(rec, "capi_rec.txt") == EEGSZ_OK);

    eegsz_recording* loaded = nullptr;
    REQUIRE(eegsz_recording_load("capi_rec.txt", "copy", EEGSZ_LABEL_HC, &loaded) == EEGSZ_OK);
    std::vector<double> a(EEGSZ_SAMPLES), b(EEGSZ_SAMPLES);
    eegsz_recording_channel(rec, 3, a.data(), a.size());
    eegsz_recording_channel(loaded, 3, b.data(), b.size());
    CHECK(a == b);

    eegsz_recording* normed = nullptr;
    REQUIRE(eegsz_recording_normalize(loaded, EEGSZ_NORM_ZSCORE, &normed) == EEGSZ_OK);
    eegsz_recording_channel(normed, 3, b.data(), b.size());
    double mean = 0.0;
    for (double v : b) mean += v;
    CHECK(std::abs(mean / static_cast<double>(b.size())) < 1e-9);

    eegsz_recording_free(normed);
    eegsz_recording_free(loaded);
    eegsz_recording_free(rec);
    std::remove("capi_rec.txt");

    eegsz_recording* missing = nullptr;
    CHECK(eegsz_recording_load("no_such.txt", "x", 0, &missing) == EEGSZ_ERR_DATA);
}

TEST_CASE("dwt round trip through the C surface") {
    std::vector<double> x(512);
    for (size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.05 * static_cast<double>(i));

    eegsz_dwt_result* dwt = nullptr;
    REQUIRE(eegsz_dwt(x.data(), x.size(), "db4", 4, EEGSZ_DWT_BOUNDARY_ZERO, &dwt) == EEGSZ_OK);
    CHECK(eegsz_dwt_levels(dwt) == 4);
    CHECK(eegsz_dwt_coeff_count(dwt, 0) > 0);
    CHECK(eegsz_dwt_coeff_count(dwt, 1) > eegsz_dwt_coeff_count(dwt, 4));

    std::vector<double> approx(eegsz_dwt_coeff_count(dwt, 0));
    CHECK(eegsz_dwt_coeffs(dwt, 0, approx.data(), approx.size()) == EEGSZ_OK);

    std::vector<double> back(x.size());
    REQUIRE(eegsz_dwt_reconstruct(dwt, "db4", back.data(), back.size()) == EEGSZ_OK);
    for (size_t i = 0; i < x.size(); ++i) CHECK(std::abs(back[i] - x[i]) < 1e-8);
    eegsz_dwt_free(dwt);

    eegsz_dwt_result* bad = nullptr;
    CHECK(eegsz_dwt(x.data(), x.size(), "db4", 40, 0, &bad) == EEGSZ_ERR_CONFIG);
    CHECK(eegsz_dwt(x.data(), x.size(), "nope", 2, 0, &bad) == EEGSZ_ERR_CONFIG);
}

TEST_CASE("band signals sum to the input through the C surface") {
    std::vector<double> x(512);
    for (size_t i = 0; i < x.size(); ++i) x[i] = std::cos(0.3 * static_cast<double>(i));
    std::vector<double> bands(5 * x.size());
    REQUIRE(eegsz_band_signals(x.data(), x.size(), "db4", bands.data(), bands.size()) ==
            EEGSZ_OK);
    for (size_t i = 0; i < x.size(); ++i) {
        double sum = 0.0;
        for (size_t b = 0; b < 5; ++b) sum += bands[b * x.size() + i];
        CHECK(std::abs(sum - x[i]) < 1e-6);
    }
}

TEST_CASE("fft and cwt bank through the C surface") {
    std::vector<double> re(64, 0.0), im(64, 0.0);
    re[0] = 1.0;
    REQUIRE(eegsz_fft(re.data(), im.data(), 64, 0) == EEGSZ_OK);
    for (double v : re) CHECK(v == doctest::Approx(1.0));

    CHECK(eegsz_fft(re.data(), im.data(), 63, 0) == EEGSZ_ERR_CONFIG);

    eegsz_cwt_bank* bank = nullptr;
    REQUIRE(eegsz_cwt_bank_create(0.5, 50.0, 12, 128.0, 5.0, 0.6, &bank) == EEGSZ_OK);
    CHECK(eegsz_cwt_bank_scales(bank) == 80);
    std::vector<double> freqs(80);
    CHECK(eegsz_cwt_bank_frequencies(bank, freqs.data(), freqs.size()) == EEGSZ_OK);
    CHECK(freqs[0] == doctest::Approx(50.0));

    std::vector<double> tone(1024);
    for (size_t i = 0; i < tone.size(); ++i) {
        tone[i] = std::sin(2.0 * M_PI * 10.0 * static_cast<double>(i) / 128.0);
    }
    eegsz_tfmap* map = nullptr;
    REQUIRE(eegsz_cwt(bank, tone.data(), tone.size(), &map) == EEGSZ_OK);
    CHECK(eegsz_tfmap_rows(map) == 80);
    CHECK(eegsz_tfmap_cols(map) == 1024);
    CHECK(eegsz_tfmap_render(map, 64, 64, 1, "capi_scal.png") == EEGSZ_OK);
    CHECK(fs::exists("capi_scal.png"));
    std::remove("capi_scal.png");
    eegsz_tfmap_free(map);
    eegsz_cwt_bank_free(bank);

    eegsz_cwt_bank* aliasing = nullptr;
    CHECK(eegsz_cwt_bank_create(0.5, 70.0, 12, 128.0, 5.0, 0.6, &aliasing) == EEGSZ_ERR_CONFIG);
}

TEST_CASE("stft shape through the C surface") {
    std::vector<double> x(7680, 0.25);
    eegsz_tfmap* map = nullptr;
    REQUIRE(eegsz_stft(x.data(), x.size(), 128.0, 256, 0.5, 512, &map) == EEGSZ_OK);
    CHECK(eegsz_tfmap_rows(map) == 257);
    CHECK(eegsz_tfmap_cols(map) == 59);
    eegsz_tfmap_free(map);
}

TEST_CASE("cae options, training, encode, checkpoint via the C surface") {
    eegsz_cae_options opts;
    eegsz_cae_options_init(&opts);
    CHECK(opts.window == 512);
    CHECK(opts.bottleneck == 64);
    opts.epochs = 2;
    opts.batch_size = 8;
    opts.channel_stride = 8;

    eegsz_cae* cae = nullptr;
    REQUIRE(eegsz_cae_create(&opts, &cae) == EEGSZ_OK);
    uint64_t trainable = 0, frozen = 0;
    CHECK(eegsz_cae_param_counts(cae, &trainable, &frozen) == EEGSZ_OK);
    CHECK(trainable >= 30000);
    CHECK(trainable <= 50000);

    eegsz_dataset* ds = nullptr;
    REQUIRE(eegsz_dataset_synth(2, 3, &ds) == EEGSZ_OK);
    CHECK(eegsz_dataset_count(ds) == 4);
    REQUIRE(eegsz_cae_train(cae, ds) == EEGSZ_OK);
    CHECK(eegsz_cae_epochs_recorded(cae) == 2);
    double losses[2];
    CHECK(eegsz_cae_loss_history(cae, losses, 2) == EEGSZ_OK);
    CHECK(losses[0] > 0.0);

    const eegsz_recording* rec = eegsz_dataset_get(ds, 0);
    REQUIRE(rec != nullptr);
    std::vector<double> features(opts.bottleneck);
    REQUIRE(eegsz_cae_encode(cae, rec, 0, 0, features.data(), features.size()) == EEGSZ_OK);

    double err = -1.0;
    CHECK(eegsz_cae_reconstruction_error(cae, rec, 0, 0, &err) == EEGSZ_OK);
    CHECK(err >= 0.0);
    CHECK(eegsz_cae_encode(cae, rec, 99, 0, features.data(), features.size()) ==
          EEGSZ_ERR_CONFIG);

    REQUIRE(eegsz_cae_save(cae, "capi_cae.ckpt") == EEGSZ_OK);
    eegsz_cae* back = nullptr;
    REQUIRE(eegsz_cae_load("capi_cae.ckpt", &back) == EEGSZ_OK);
    std::vector<double> features2(opts.bottleneck);
    REQUIRE(eegsz_cae_encode(back, rec, 0, 0, features2.data(), features2.size()) == EEGSZ_OK);
    CHECK(features == features2);
    std::remove("capi_cae.ckpt");

    CHECK(eegsz_cae_features_csv(cae, ds, "capi_features.csv") == EEGSZ_OK);
    CHECK(fs::exists("capi_features.csv"));
    std::remove("capi_features.csv");

    eegsz_cae_free(back);
    eegsz_cae_free(cae);
    eegsz_dataset_free(ds);
}

TEST_CASE("classifiers and metrics via the C surface") {
    // two separable blobs
    std::vector<double> x;
    std::vector<int> labels;
    for (int i = 0; i < 20; ++i) {
        const double v = static_cast<double>(i % 10) * 0.05;
        if (i < 10) {
            x.push_back(1.0 + v);
            x.push_back(0.5);
            labels.push_back(1);
        } else {
            x.push_back(-1.0 - v);
            x.push_back(-0.5);
            labels.push_back(0);
        }
    }

    eegsz_classifier* knn = nullptr;
    eegsz_classifier* svc = nullptr;
    eegsz_classifier* rf = nullptr;
    REQUIRE(eegsz_knn_create(3, &knn) == EEGSZ_OK);
    REQUIRE(eegsz_svc_create(1.0, 500, &svc) == EEGSZ_OK);
    REQUIRE(eegsz_rf_create(15, 8, 7, &rf) == EEGSZ_OK);
    eegsz_classifier* members[3] = {knn, svc, rf};
    eegsz_classifier* vote = nullptr;
    REQUIRE(eegsz_vote_create(members, 3, &vote) == EEGSZ_OK);

    for (auto* clf : {knn, svc, rf}) {
        REQUIRE(eegsz_classifier_fit(clf, x.data(), 20, 2, labels.data(), nullptr) == EEGSZ_OK);
    }
    const double q_pos[2] = {1.2, 0.5};
    const double q_neg[2] = {-1.2, -0.5};
    double p[2];
    for (auto* clf : {knn, svc, rf, vote}) {
        REQUIRE(eegsz_classifier_predict_proba(clf, q_pos, 2, p) == EEGSZ_OK);
        CHECK(p[1] > 0.5);
        CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-9));
        REQUIRE(eegsz_classifier_predict_proba(clf, q_neg, 2, p) == EEGSZ_OK);
        CHECK(p[1] < 0.5);
    }
    eegsz_classifier_free(vote);
    eegsz_classifier_free(rf);
    eegsz_classifier_free(svc);
    eegsz_classifier_free(knn);

    double acc, prec, rec, f1, kappa, auc;
    CHECK(eegsz_metrics(40, 10, 45, 5, &acc, &prec, &rec, &f1) == EEGSZ_OK);
    CHECK(acc == doctest::Approx(0.85));
    CHECK(prec == doctest::Approx(0.8));
    CHECK(eegsz_cohens_kappa(40, 10, 45, 5, &kappa) == EEGSZ_OK);
    CHECK(kappa == doctest::Approx(0.7));

    const double scores[4] = {0.1, 0.4, 0.35, 0.8};
    const int auc_labels[4] = {0, 0, 1, 1};
    CHECK(eegsz_roc_auc(scores, auc_labels, 4, &auc) == EEGSZ_OK);
    CHECK(auc == doctest::Approx(0.75));
}

TEST_CASE("dataset save writes per-subject files plus a manifest") {
    eegsz_dataset* ds = nullptr;
    REQUIRE(eegsz_dataset_synth(2, 11, &ds) == EEGSZ_OK);
    REQUIRE(eegsz_dataset_save(ds, "capi_ds") == EEGSZ_OK);
    CHECK(fs::exists("capi_ds/manifest.csv"));
    size_t files = 0;
    for (const auto& e : fs::directory_iterator("capi_ds")) {
        (void)e;
        ++files;
    }
    CHECK(files == 5);  // 4 subjects + manifest
    eegsz_dataset_free(ds);

    eegsz_dataset* back = nullptr;
    REQUIRE(eegsz_dataset_load_manifest("capi_ds/manifest.csv", &back) == EEGSZ_OK);
    CHECK(eegsz_dataset_count(back) == 4);
    eegsz_dataset_free(back);
    fs::remove_all("capi_ds");
}

TEST_CASE("benchmark options defaults") {
    eegsz_benchmark_options opts;
    eegsz_benchmark_options_init(&opts);
    CHECK(opts.k == 5);
    CHECK(opts.seed == 7);
    CHECK(opts.subject_wise == 1);
    CHECK(opts.window == 512);
    CHECK(opts.image_size == 64);
}
