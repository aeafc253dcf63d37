// Batch front-end over the eegsz C API. Subcommands mirror the pipeline
// stages: synth/ingest data, band decomposition, scalogram/spectrogram
// images, CAE training and feature export, classifier training and the
// cross-validated evaluation harness.
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 numeric divergence.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eegsz/eegsz.h"

namespace fs = std::filesystem;

namespace {

int fail(eegsz_status status) {
    std::cerr << "error: " << eegsz_last_error() << "\n";
    switch (status) {
        case EEGSZ_ERR_DATA: return 3;
        case EEGSZ_ERR_NUMERIC: return 4;
        default: return 2;
    }
}

#define CHECK(call)                                     \
    do {                                                \
        const eegsz_status _st = (call);                \
        if (_st != EEGSZ_OK) return fail(_st);          \
    } while (0)

// Flat key=value configuration files; CLI flags override file entries.
std::map<std::string, std::string> load_config(const std::string& path) {
    std::map<std::string, std::string> kv;
    if (path.empty()) return kv;
    std::ifstream in(path);
    if (!in) {
        throw CLI::ValidationError("config", "cannot open config file: " + path);
    }
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
                s.pop_back();
            }
        };
        trim(key);
        trim(value);
        kv[key] = value;
    }
    return kv;
}

template <typename T>
void config_override(const std::map<std::string, std::string>& kv, const std::string& key,
                     T& value, const CLI::Option* opt) {
    const auto it = kv.find(key);
    if (it == kv.end()) return;
    if (opt && opt->count() > 0) return;  // explicit flag wins
    std::istringstream is(it->second);
    is >> value;
}

struct SubjectRef {
    eegsz_recording* rec = nullptr;
    ~SubjectRef() { eegsz_recording_free(rec); }
};

// Loads a subject either from an explicit file or from a manifest row
// matched by subject id.
int resolve_subject(const std::string& manifest, const std::string& subject,
                    const std::string& file, int label, SubjectRef& out) {
    if (!file.empty()) {
        CHECK(eegsz_recording_load(file.c_str(), subject.empty() ? "subject" : subject.c_str(),
                                   label, &out.rec));
        return 0;
    }
    if (manifest.empty()) {
        std::cerr << "error: provide --file or --manifest\n";
        return 2;
    }
    eegsz_dataset* ds = nullptr;
    CHECK(eegsz_dataset_load_manifest(manifest.c_str(), &ds));
    const size_t n = eegsz_dataset_count(ds);
    for (size_t i = 0; i < n; ++i) {
        const eegsz_recording* rec = eegsz_dataset_get(ds, i);
        if (subject.empty() || subject == eegsz_recording_subject_id(rec)) {
            // copy out through save/load-free path: clone via channel copies
            eegsz_recording* clone = nullptr;
            const std::string tmp =
                (fs::temp_directory_path() / "eegsz_subject_clone.txt").string();
            if (eegsz_recording_save(rec, tmp.c_str()) == EEGSZ_OK &&
                eegsz_recording_load(tmp.c_str(), eegsz_recording_subject_id(rec),
                                     eegsz_recording_label(rec), &clone) == EEGSZ_OK) {
                fs::remove(tmp);
                out.rec = clone;
                eegsz_dataset_free(ds);
                return 0;
            }
            eegsz_dataset_free(ds);
            std::cerr << "error: " << eegsz_last_error() << "\n";
            return 3;
        }
    }
    eegsz_dataset_free(ds);
    std::cerr << "error: subject '" << subject << "' not found in manifest\n";
    return 3;
}

int cmd_synth(size_t n_per_class, uint64_t seed, const std::string& out_dir) {
    eegsz_dataset* ds = nullptr;
    CHECK(eegsz_dataset_synth(n_per_class, seed, &ds));
    const eegsz_status st = eegsz_dataset_save(ds, out_dir.c_str());
    eegsz_dataset_free(ds);
    if (st != EEGSZ_OK) return fail(st);
    std::cout << "wrote " << 2 * n_per_class << " subjects to " << out_dir << "\n";
    return 0;
}

int cmd_ingest(const std::string& manifest, const std::string& out_dir,
               const std::string& mode) {
    eegsz_dataset* ds = nullptr;
    CHECK(eegsz_dataset_load_manifest(manifest.c_str(), &ds));
    fs::create_directories(out_dir);
    const size_t n = eegsz_dataset_count(ds);
    std::ofstream mf(fs::path(out_dir) / "manifest.csv");
    mf << "path,subject_id,label\n";
    for (size_t i = 0; i < n; ++i) {
        const eegsz_recording* rec = eegsz_dataset_get(ds, i);
        eegsz_recording* normed = nullptr;
        const eegsz_status st = eegsz_recording_normalize(
            rec, mode == "minmax" ? EEGSZ_NORM_MINMAX : EEGSZ_NORM_ZSCORE, &normed);
        if (st != EEGSZ_OK) {
            eegsz_dataset_free(ds);
            return fail(st);
        }
        const std::string id = eegsz_recording_subject_id(rec);
        const std::string path = (fs::path(out_dir) / (id + ".txt")).string();
        const eegsz_status st2 = eegsz_recording_save(normed, path.c_str());
        mf << path << ',' << id << ',' << eegsz_recording_label(rec) << '\n';
        eegsz_recording_free(normed);
        if (st2 != EEGSZ_OK) {
            eegsz_dataset_free(ds);
            return fail(st2);
        }
    }
    eegsz_dataset_free(ds);
    std::cout << "validated and cached " << n << " recordings under " << out_dir << "\n";
    return 0;
}

int cmd_bands(const std::string& manifest, const std::string& subject, const std::string& file,
              int label, const std::string& wavelet, const std::string& out_dir) {
    SubjectRef ref;
    if (const int rc = resolve_subject(manifest, subject, file, label, ref)) return rc;
    fs::create_directories(out_dir);
    std::vector<double> channel(EEGSZ_SAMPLES);
    for (size_t ch = 0; ch < EEGSZ_CHANNELS; ++ch) {
        CHECK(eegsz_recording_channel(ref.rec, ch, channel.data(), channel.size()));
        const std::string path =
            (fs::path(out_dir) / ("bands_ch" + std::to_string(ch) + ".csv")).string();
        CHECK(eegsz_band_signals_csv(channel.data(), channel.size(), wavelet.c_str(),
                                     path.c_str()));
    }
    std::cout << "wrote band CSVs for 16 channels to " << out_dir << "\n";
    return 0;
}

int cmd_scalogram(const std::string& manifest, const std::string& subject,
                  const std::string& file, int label, size_t channel, double fmin, double fmax,
                  int voices, size_t width, size_t height, bool linear,
                  const std::string& out_dir) {
    SubjectRef ref;
    if (const int rc = resolve_subject(manifest, subject, file, label, ref)) return rc;
    fs::create_directories(out_dir);

    std::vector<double> samples(EEGSZ_SAMPLES);
    CHECK(eegsz_recording_channel(ref.rec, channel, samples.data(), samples.size()));

    eegsz_cwt_bank* bank = nullptr;
    CHECK(eegsz_cwt_bank_create(fmin, fmax, voices, eegsz_recording_fs(ref.rec), 5.0, 0.6,
                                &bank));
    eegsz_tfmap* map = nullptr;
    const eegsz_status st = eegsz_cwt(bank, samples.data(), samples.size(), &map);
    eegsz_cwt_bank_free(bank);
    if (st != EEGSZ_OK) return fail(st);

    const std::string stem =
        (fs::path(out_dir) / ("scalogram_ch" + std::to_string(channel))).string();
    eegsz_status rc = eegsz_tfmap_save_csv(map, (stem + ".csv").c_str());
    if (rc == EEGSZ_OK) {
        rc = eegsz_tfmap_render(map, width, height, linear ? 0 : 1, (stem + ".png").c_str());
    }
    eegsz_tfmap_free(map);
    if (rc != EEGSZ_OK) return fail(rc);
    std::cout << "wrote " << stem << ".csv and " << stem << ".png (" << width << "x" << height
              << ")\n";
    return 0;
}

int cmd_spectrogram(const std::string& manifest, const std::string& subject,
                    const std::string& file, int label, size_t channel, size_t window,
                    double overlap, size_t nfft, size_t width, size_t height, bool linear,
                    const std::string& out_dir) {
    SubjectRef ref;
    if (const int rc = resolve_subject(manifest, subject, file, label, ref)) return rc;
    fs::create_directories(out_dir);

    std::vector<double> samples(EEGSZ_SAMPLES);
    CHECK(eegsz_recording_channel(ref.rec, channel, samples.data(), samples.size()));

    eegsz_tfmap* map = nullptr;
    CHECK(eegsz_stft(samples.data(), samples.size(), eegsz_recording_fs(ref.rec), window,
                     overlap, nfft, &map));
    const std::string stem =
        (fs::path(out_dir) / ("spectrogram_ch" + std::to_string(channel))).string();
    eegsz_status rc = eegsz_tfmap_save_csv(map, (stem + ".csv").c_str());
    if (rc == EEGSZ_OK) {
        rc = eegsz_tfmap_render(map, width, height, linear ? 0 : 1, (stem + ".png").c_str());
    }
    eegsz_tfmap_free(map);
    if (rc != EEGSZ_OK) return fail(rc);
    std::cout << "wrote " << stem << ".csv and " << stem << ".png\n";
    return 0;
}

int cmd_train_cae(const std::string& manifest, const eegsz_cae_options& opts,
                  const std::string& out_dir) {
    eegsz_dataset* ds = nullptr;
    CHECK(eegsz_dataset_load_manifest(manifest.c_str(), &ds));

    eegsz_cae* cae = nullptr;
    eegsz_status st = eegsz_cae_create(&opts, &cae);
    if (st == EEGSZ_OK) st = eegsz_cae_train(cae, ds);
    eegsz_dataset_free(ds);
    if (st != EEGSZ_OK) {
        eegsz_cae_free(cae);
        return fail(st);
    }

    fs::create_directories(out_dir);
    const std::string ckpt = (fs::path(out_dir) / "cae.ckpt").string();
    st = eegsz_cae_save(cae, ckpt.c_str());
    if (st == EEGSZ_OK) {
        const size_t epochs = eegsz_cae_epochs_recorded(cae);
        std::vector<double> losses(epochs);
        eegsz_cae_loss_history(cae, losses.data(), losses.size());
        std::ofstream curve(fs::path(out_dir) / "loss.csv");
        curve << "epoch,loss\n";
        curve.precision(12);
        for (size_t e = 0; e < epochs; ++e) curve << e << ',' << losses[e] << '\n';

        uint64_t trainable = 0, frozen = 0;
        eegsz_cae_param_counts(cae, &trainable, &frozen);
        std::cout << "trained CAE (" << trainable << " trainable / " << frozen
                  << " non-trainable parameters), checkpoint at " << ckpt << "\n";
        if (!losses.empty()) {
            std::cout << "first-epoch loss " << losses.front() << ", final " << losses.back()
                      << "\n";
        }
    }
    eegsz_cae_free(cae);
    return st == EEGSZ_OK ? 0 : fail(st);
}

int cmd_features(const std::string& checkpoint, const std::string& manifest,
                 const std::string& out_path) {
    eegsz_cae* cae = nullptr;
    CHECK(eegsz_cae_load(checkpoint.c_str(), &cae));
    eegsz_dataset* ds = nullptr;
    eegsz_status st = eegsz_dataset_load_manifest(manifest.c_str(), &ds);
    if (st == EEGSZ_OK) {
        if (!fs::path(out_path).parent_path().empty()) {
            fs::create_directories(fs::path(out_path).parent_path());
        }
        st = eegsz_cae_features_csv(cae, ds, out_path.c_str());
    }
    eegsz_dataset_free(ds);
    eegsz_cae_free(cae);
    if (st != EEGSZ_OK) return fail(st);
    std::cout << "wrote features to " << out_path << "\n";
    return 0;
}

int run_benchmark(eegsz_dataset* ds, const eegsz_benchmark_options& opts, bool with_cnn,
                  const std::string& out_dir) {
    fs::create_directories(out_dir);
    eegsz_report* reports[EEGSZ_BENCH_COUNT] = {};
    const eegsz_status st = eegsz_benchmark_cae(ds, &opts, reports, EEGSZ_BENCH_COUNT);
    if (st != EEGSZ_OK) return fail(st);

    const char* names[EEGSZ_BENCH_COUNT] = {"knn", "svc", "rf", "vote"};
    for (size_t i = 0; i < EEGSZ_BENCH_COUNT; ++i) {
        const std::string dir = (fs::path(out_dir) / (std::string("cae_") + names[i])).string();
        eegsz_status rc = eegsz_report_save(reports[i], dir.c_str());
        double acc = 0.0;
        if (rc == EEGSZ_OK) rc = eegsz_report_mean(reports[i], 0, &acc);
        if (rc == EEGSZ_OK) {
            std::printf("cae+%-4s  mean accuracy %.4f  (report in %s)\n", names[i], acc,
                        dir.c_str());
        }
        eegsz_report_free(reports[i]);
        if (rc != EEGSZ_OK) return fail(rc);
    }

    if (with_cnn) {
        eegsz_report* cnn = nullptr;
        const eegsz_status rc = eegsz_benchmark_cnn(ds, &opts, &cnn);
        if (rc != EEGSZ_OK) return fail(rc);
        const std::string dir = (fs::path(out_dir) / "scalogram_cnn").string();
        eegsz_status rc2 = eegsz_report_save(cnn, dir.c_str());
        double acc = 0.0;
        if (rc2 == EEGSZ_OK) rc2 = eegsz_report_mean(cnn, 0, &acc);
        if (rc2 == EEGSZ_OK) {
            std::printf("scalogram+cnn  mean accuracy %.4f  (report in %s)\n", acc, dir.c_str());
        }
        eegsz_report_free(cnn);
        if (rc2 != EEGSZ_OK) return fail(rc2);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"EEG band/scalogram classification pipeline"};
    app.require_subcommand(1);

    // ----------------------------------------------------------- synth --
    auto* synth = app.add_subcommand("synth", "generate the synthetic benchmark dataset");
    size_t synth_n = 40;
    uint64_t synth_seed = 7;
    std::string synth_out = "synth_data";
    synth->add_option("--n-per-class", synth_n, "subjects per class")->capture_default_str();
    synth->add_option("--seed", synth_seed, "generator seed")->capture_default_str();
    synth->add_option("--out", synth_out, "output directory")->capture_default_str();

    // ---------------------------------------------------------- ingest --
    auto* ingest = app.add_subcommand("ingest", "validate and cache normalized recordings");
    std::string ingest_manifest, ingest_out = "cache";
    std::string ingest_mode = "zscore";
    ingest->add_option("--manifest", ingest_manifest, "manifest CSV")->required();
    ingest->add_option("--out", ingest_out, "cache directory")->capture_default_str();
    ingest->add_option("--mode", ingest_mode, "zscore|minmax")
        ->check(CLI::IsMember({"zscore", "minmax"}))
        ->capture_default_str();

    // ----------------------------------------------------------- bands --
    auto* bands = app.add_subcommand("bands", "emit DWT band CSVs for one subject");
    std::string bands_manifest, bands_subject, bands_file, bands_wavelet = "db4";
    std::string bands_out = "bands";
    int bands_label = 0;
    bands->add_option("--manifest", bands_manifest, "manifest CSV");
    bands->add_option("--subject", bands_subject, "subject id (manifest mode)");
    bands->add_option("--file", bands_file, "recording file (direct mode)");
    bands->add_option("--label", bands_label, "label for direct mode")->capture_default_str();
    bands->add_option("--wavelet", bands_wavelet, "haar|db2|db4|db8")->capture_default_str();
    bands->add_option("--out", bands_out, "output directory")->capture_default_str();

    // ------------------------------------------------------- scalogram --
    auto* scal = app.add_subcommand("scalogram", "emit a bump-CWT scalogram CSV + image");
    std::string scal_manifest, scal_subject, scal_file, scal_out = "scalograms";
    int scal_label = 0;
    size_t scal_channel = 0, scal_w = 224, scal_h = 224;
    double scal_fmin = 0.5, scal_fmax = 50.0;
    int scal_voices = 12;
    bool scal_linear = false;
    scal->add_option("--manifest", scal_manifest, "manifest CSV");
    scal->add_option("--subject", scal_subject, "subject id");
    scal->add_option("--file", scal_file, "recording file (direct mode)");
    scal->add_option("--label", scal_label, "label for direct mode")->capture_default_str();
    scal->add_option("--channel", scal_channel, "channel 0..15")->capture_default_str();
    scal->add_option("--fmin", scal_fmin, "lowest analysis frequency")->capture_default_str();
    scal->add_option("--fmax", scal_fmax, "highest analysis frequency")->capture_default_str();
    scal->add_option("--voices", scal_voices, "voices per octave")->capture_default_str();
    scal->add_option("--width", scal_w, "image width")->capture_default_str();
    scal->add_option("--height", scal_h, "image height")->capture_default_str();
    scal->add_flag("--linear", scal_linear, "linear instead of log intensity");
    scal->add_option("--out", scal_out, "output directory")->capture_default_str();

    // ----------------------------------------------------- spectrogram --
    auto* spec = app.add_subcommand("spectrogram", "emit an STFT spectrogram CSV + image");
    std::string spec_manifest, spec_subject, spec_file, spec_out = "spectrograms";
    int spec_label = 0;
    size_t spec_channel = 0, spec_window = 256, spec_nfft = 512, spec_w = 224, spec_h = 224;
    double spec_overlap = 0.5;
    bool spec_linear = false;
    spec->add_option("--manifest", spec_manifest, "manifest CSV");
    spec->add_option("--subject", spec_subject, "subject id");
    spec->add_option("--file", spec_file, "recording file (direct mode)");
    spec->add_option("--label", spec_label, "label for direct mode")->capture_default_str();
    spec->add_option("--channel", spec_channel, "channel 0..15")->capture_default_str();
    spec->add_option("--window", spec_window, "window length")->capture_default_str();
    spec->add_option("--overlap", spec_overlap, "overlap fraction")->capture_default_str();
    spec->add_option("--nfft", spec_nfft, "FFT points")->capture_default_str();
    spec->add_option("--width", spec_w, "image width")->capture_default_str();
    spec->add_option("--height", spec_h, "image height")->capture_default_str();
    spec->add_flag("--linear", spec_linear, "linear instead of log intensity");
    spec->add_option("--out", spec_out, "output directory")->capture_default_str();

    // ------------------------------------------------------- train-cae --
    auto* tcae = app.add_subcommand("train-cae", "train the CAE, write checkpoint + loss curve");
    std::string tcae_manifest, tcae_config, tcae_out = "cae_out";
    eegsz_cae_options cae_opts;
    eegsz_cae_options_init(&cae_opts);
    tcae->add_option("--manifest", tcae_manifest, "manifest CSV")->required();
    tcae->add_option("--config", tcae_config, "key=value config file");
    auto* o_window = tcae->add_option("--window", cae_opts.window, "samples per window");
    auto* o_epochs = tcae->add_option("--epochs", cae_opts.epochs, "training epochs");
    auto* o_batch = tcae->add_option("--batch", cae_opts.batch_size, "batch size");
    auto* o_lr = tcae->add_option("--lr", cae_opts.learning_rate, "Adam learning rate");
    auto* o_seed = tcae->add_option("--seed", cae_opts.seed, "init/shuffle seed");
    auto* o_stride = tcae->add_option("--channel-stride", cae_opts.channel_stride,
                                      "use every n-th channel");
    tcae->add_option("--out", tcae_out, "output directory")->capture_default_str();

    // -------------------------------------------------------- features --
    auto* feat = app.add_subcommand("features", "encode bottleneck features to CSV");
    std::string feat_ckpt, feat_manifest, feat_out = "features.csv";
    feat->add_option("--checkpoint", feat_ckpt, "CAE checkpoint")->required();
    feat->add_option("--manifest", feat_manifest, "manifest CSV")->required();
    feat->add_option("--out", feat_out, "output CSV")->capture_default_str();

    // ------------------------------------------------------- train-clf --
    auto* tclf = app.add_subcommand(
        "train-clf", "fit classifiers on a feature CSV and report training accuracy");
    std::string tclf_features, tclf_out = "clf_out";
    size_t tclf_knn_k = 5, tclf_rf_trees = 50;
    double tclf_svc_c = 1.0;
    int tclf_rf_depth = 12;
    uint64_t tclf_seed = 7;
    tclf->add_option("--features", tclf_features, "feature CSV from `features`")->required();
    tclf->add_option("--knn-k", tclf_knn_k, "KNN neighbours")->capture_default_str();
    tclf->add_option("--svc-c", tclf_svc_c, "SVC regularization C")->capture_default_str();
    tclf->add_option("--rf-trees", tclf_rf_trees, "forest size")->capture_default_str();
    tclf->add_option("--rf-depth", tclf_rf_depth, "max tree depth")->capture_default_str();
    tclf->add_option("--seed", tclf_seed, "forest seed")->capture_default_str();
    tclf->add_option("--out", tclf_out, "output directory")->capture_default_str();

    // -------------------------------------------------------- evaluate --
    auto* eval = app.add_subcommand(
        "evaluate", "cross-validated benchmark: CAE features + classifiers (+ optional CNN)");
    std::string eval_manifest, eval_config, eval_out = "eval_out";
    size_t eval_n_synth = 0;
    bool eval_with_cnn = false;
    eegsz_benchmark_options bench;
    eegsz_benchmark_options_init(&bench);
    eval->add_option("--manifest", eval_manifest, "manifest CSV (omit with --synth)");
    eval->add_option("--synth", eval_n_synth, "use a synthetic dataset of n per class");
    eval->add_option("--config", eval_config, "key=value config file");
    auto* e_k = eval->add_option("--folds", bench.k, "cross-validation folds");
    auto* e_seed = eval->add_option("--seed", bench.seed, "split/init seed");
    auto* e_win = eval->add_option("--window", bench.window, "CAE window");
    auto* e_cs = eval->add_option("--channel-stride", bench.channel_stride,
                                  "CAE channel stride");
    auto* e_ce = eval->add_option("--cae-epochs", bench.cae_epochs, "CAE epochs per fold");
    auto* e_is = eval->add_option("--image-size", bench.image_size, "CNN image size");
    auto* e_cne = eval->add_option("--cnn-epochs", bench.cnn_epochs, "CNN epochs per fold");
    auto* e_thr = eval->add_option("--threads", bench.threads, "worker cap (0 = hardware)");
    bool sample_wise = false;
    eval->add_flag("--sample-wise", sample_wise,
                   "fold over windows instead of subjects (leaky, for comparison)");
    eval->add_flag("--with-cnn", eval_with_cnn, "also run the scalogram + 2D-CNN branch");
    eval->add_option("--out", eval_out, "output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // unknown flags and bad values are config errors
    }

    try {
        if (synth->parsed()) return cmd_synth(synth_n, synth_seed, synth_out);
        if (ingest->parsed()) return cmd_ingest(ingest_manifest, ingest_out, ingest_mode);
        if (bands->parsed()) {
            return cmd_bands(bands_manifest, bands_subject, bands_file, bands_label,
                             bands_wavelet, bands_out);
        }
        if (scal->parsed()) {
            return cmd_scalogram(scal_manifest, scal_subject, scal_file, scal_label,
                                 scal_channel, scal_fmin, scal_fmax, scal_voices, scal_w,
                                 scal_h, scal_linear, scal_out);
        }
        if (spec->parsed()) {
            return cmd_spectrogram(spec_manifest, spec_subject, spec_file, spec_label,
                                   spec_channel, spec_window, spec_overlap, spec_nfft, spec_w,
                                   spec_h, spec_linear, spec_out);
        }
        if (tcae->parsed()) {
            const auto kv = load_config(tcae_config);
            config_override(kv, "window", cae_opts.window, o_window);
            config_override(kv, "epochs", cae_opts.epochs, o_epochs);
            config_override(kv, "batch", cae_opts.batch_size, o_batch);
            config_override(kv, "lr", cae_opts.learning_rate, o_lr);
            config_override(kv, "seed", cae_opts.seed, o_seed);
            config_override(kv, "channel_stride", cae_opts.channel_stride, o_stride);
            return cmd_train_cae(tcae_manifest, cae_opts, tcae_out);
        }
        if (feat->parsed()) return cmd_features(feat_ckpt, feat_manifest, feat_out);
        if (tclf->parsed()) {
            // classifier fitting over an exported feature CSV
            std::ifstream in(tclf_features);
            if (!in) {
                std::cerr << "error: cannot open " << tclf_features << "\n";
                return 3;
            }
            std::string header;
            std::getline(in, header);
            std::vector<double> xs;
            std::vector<int> labels;
            std::vector<std::string> groups;
            size_t cols = 0;
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                std::istringstream ls(line);
                std::string subject, channel, win, label, tok;
                std::getline(ls, subject, ',');
                std::getline(ls, channel, ',');
                std::getline(ls, win, ',');
                std::getline(ls, label, ',');
                size_t row_cols = 0;
                while (std::getline(ls, tok, ',')) {
                    xs.push_back(std::stod(tok));
                    ++row_cols;
                }
                if (cols == 0) cols = row_cols;
                if (row_cols != cols) {
                    std::cerr << "error: ragged feature CSV\n";
                    return 3;
                }
                labels.push_back(label == "1" ? 1 : 0);
                groups.push_back(subject);
            }
            const size_t rows = labels.size();
            if (rows == 0) {
                std::cerr << "error: empty feature CSV\n";
                return 3;
            }

            eegsz_classifier* knn = nullptr;
            eegsz_classifier* svc = nullptr;
            eegsz_classifier* rf = nullptr;
            eegsz_classifier* vote = nullptr;
            CHECK(eegsz_knn_create(tclf_knn_k, &knn));
            CHECK(eegsz_svc_create(tclf_svc_c, 0, &svc));
            CHECK(eegsz_rf_create(tclf_rf_trees, tclf_rf_depth, tclf_seed, &rf));
            eegsz_classifier* members[3] = {knn, svc, rf};
            CHECK(eegsz_vote_create(members, 3, &vote));

            std::vector<const char*> group_ptrs;
            for (const auto& g : groups) group_ptrs.push_back(g.c_str());
            CHECK(eegsz_classifier_fit(knn, xs.data(), rows, cols, labels.data(),
                                       group_ptrs.data()));
            CHECK(eegsz_classifier_fit(svc, xs.data(), rows, cols, labels.data(),
                                       group_ptrs.data()));
            CHECK(eegsz_classifier_fit(rf, xs.data(), rows, cols, labels.data(),
                                       group_ptrs.data()));

            fs::create_directories(tclf_out);
            std::ofstream pred(fs::path(tclf_out) / "predictions.csv");
            pred << "row,subject_id,label,p1_knn,p1_svc,p1_rf,p1_vote,predicted_vote\n";
            const char* names[4] = {"knn", "svc", "rf", "vote"};
            eegsz_classifier* clfs[4] = {knn, svc, rf, vote};
            size_t correct[4] = {0, 0, 0, 0};
            for (size_t r = 0; r < rows; ++r) {
                double p[4][2];
                for (int c = 0; c < 4; ++c) {
                    CHECK(eegsz_classifier_predict_proba(clfs[c], xs.data() + r * cols, cols,
                                                         p[c]));
                    const int predicted = p[c][1] >= p[c][0] ? 1 : 0;
                    if (predicted == labels[r]) ++correct[c];
                }
                pred << r << ',' << groups[r] << ',' << labels[r] << ',' << p[0][1] << ','
                     << p[1][1] << ',' << p[2][1] << ',' << p[3][1] << ','
                     << (p[3][1] >= p[3][0] ? 1 : 0) << '\n';
            }
            for (int c = 0; c < 4; ++c) {
                std::printf("%-4s training accuracy %.4f\n", names[c],
                            static_cast<double>(correct[c]) / static_cast<double>(rows));
            }
            eegsz_classifier_free(vote);
            eegsz_classifier_free(rf);
            eegsz_classifier_free(svc);
            eegsz_classifier_free(knn);
            std::cout << "wrote predictions to " << tclf_out << "/predictions.csv\n";
            return 0;
        }
        if (eval->parsed()) {
            const auto kv = load_config(eval_config);
            config_override(kv, "folds", bench.k, e_k);
            config_override(kv, "seed", bench.seed, e_seed);
            config_override(kv, "window", bench.window, e_win);
            config_override(kv, "channel_stride", bench.channel_stride, e_cs);
            config_override(kv, "cae_epochs", bench.cae_epochs, e_ce);
            config_override(kv, "image_size", bench.image_size, e_is);
            config_override(kv, "cnn_epochs", bench.cnn_epochs, e_cne);
            config_override(kv, "threads", bench.threads, e_thr);
            bench.subject_wise = sample_wise ? 0 : 1;

            eegsz_dataset* ds = nullptr;
            if (eval_n_synth > 0) {
                CHECK(eegsz_dataset_synth(eval_n_synth, bench.seed, &ds));
            } else if (!eval_manifest.empty()) {
                CHECK(eegsz_dataset_load_manifest(eval_manifest.c_str(), &ds));
            } else {
                std::cerr << "error: provide --manifest or --synth\n";
                return 2;
            }
            const int rc = run_benchmark(ds, bench, eval_with_cnn, eval_out);
            eegsz_dataset_free(ds);
            return rc;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
