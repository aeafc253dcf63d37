#include "eegsz/eegsz.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "core/bench.hpp"
#include "core/cae.hpp"
#include "core/classifiers.hpp"
#include "core/cwt.hpp"
#include "core/dataset.hpp"
#include "core/error.hpp"
#include "core/eval.hpp"
#include "core/fft.hpp"
#include "core/image.hpp"
#include "core/parallel.hpp"
#include "core/stft.hpp"
#include "core/wavelet.hpp"

namespace {

thread_local std::string tl_error;

void set_error(const std::string& msg) { tl_error = msg; }

eegsz_status to_status(const eegsz::Error& e) {
    switch (e.kind()) {
        case eegsz::ErrorKind::Config: return EEGSZ_ERR_CONFIG;
        case eegsz::ErrorKind::Data: return EEGSZ_ERR_DATA;
        case eegsz::ErrorKind::Numeric: return EEGSZ_ERR_NUMERIC;
    }
    return EEGSZ_ERR_CONFIG;
}

template <typename Fn>
eegsz_status guarded(Fn&& fn) {
    try {
        fn();
        return EEGSZ_OK;
    } catch (const eegsz::Error& e) {
        set_error(e.what());
        return to_status(e);
    } catch (const std::exception& e) {
        set_error(e.what());
        return EEGSZ_ERR_CONFIG;
    }
}

#define REQUIRE_PTR(p)                                        \
    do {                                                      \
        if (!(p)) {                                           \
            set_error("null pointer: " #p);                   \
            return EEGSZ_ERR_NULLPTR;                         \
        }                                                     \
    } while (0)

} // namespace

struct eegsz_recording {
    eegsz::EegRecording rec;
};

struct eegsz_dataset {
    std::vector<eegsz::EegRecording> recs;
    mutable std::vector<std::unique_ptr<eegsz_recording>> views;
};

struct eegsz_dwt_result {
    eegsz::DwtDecomposition dec;
};

struct eegsz_tfmap {
    eegsz::Matrix magnitudes;
    std::vector<double> frequencies;
    std::vector<double> times;
    bool rows_ascend_in_frequency = false;
};

struct eegsz_cwt_bank {
    eegsz::CwtFilterBank bank;
};

struct eegsz_cae {
    eegsz::Cae cae;
    size_t channel_stride = 1;
    eegsz::WaveletFilter filter = eegsz::WaveletFilter::create("db4");
};

struct eegsz_classifier {
    std::shared_ptr<eegsz::ProbClassifier> clf;
};

struct eegsz_report {
    eegsz::EvalReport report;
};

namespace {

eegsz::nn::Tensor window_tensor(eegsz_cae* cae, const eegsz_recording* rec, size_t channel,
                                size_t window_index) {
    const size_t window = cae->cae.config().window;
    const size_t per_channel = (rec->rec.data.cols() - window) / window + 1;
    if (channel >= rec->rec.data.rows() || window_index >= per_channel) {
        eegsz::throw_config("channel or window index out of range");
    }
    auto tensors = eegsz::prepare_cae_inputs(rec->rec, window, cae->filter, 1);
    return tensors[channel * per_channel + window_index];
}

eegsz::BenchmarkOptions to_core_options(const eegsz_benchmark_options* opts) {
    eegsz_benchmark_options defaults;
    eegsz_benchmark_options_init(&defaults);
    const eegsz_benchmark_options& o = opts ? *opts : defaults;
    eegsz::BenchmarkOptions core;
    core.k = o.k;
    core.seed = o.seed;
    core.subject_wise = o.subject_wise != 0;
    core.window = o.window;
    core.channel_stride = o.channel_stride;
    core.cae_epochs = o.cae_epochs;
    core.max_cae_train = o.max_cae_train;
    core.knn_k = o.knn_k;
    core.svc_c = o.svc_c;
    core.rf_trees = o.rf_trees;
    core.rf_depth = o.rf_depth;
    core.image_size = o.image_size;
    core.cnn_epochs = o.cnn_epochs;
    core.cnn_channel_stride = o.cnn_channel_stride;
    if (o.threads > 0) eegsz::set_thread_cap(o.threads);
    return core;
}

} // namespace

extern "C" {

const char* eegsz_version(void) { return "eegsz 1.0.0"; }

const char* eegsz_last_error(void) { return tl_error.c_str(); }

/* ------------------------------------------------------------ recordings */

eegsz_status eegsz_recording_load(const char* path, const char* subject_id, int label,
                                  eegsz_recording** out) {
    REQUIRE_PTR(path);
    REQUIRE_PTR(subject_id);
    REQUIRE_PTR(out);
    return guarded([&]() {
        auto rec = std::make_unique<eegsz_recording>();
        rec->rec = eegsz::load_subject(path, subject_id,
                                       label == 1 ? eegsz::ClassLabel::HC
                                                  : eegsz::ClassLabel::SZ);
        *out = rec.release();
    });
}

eegsz_status eegsz_recording_synth(int label, uint64_t seed, eegsz_recording** out) {
    REQUIRE_PTR(out);
    return guarded([&]() {
        auto rec = std::make_unique<eegsz_recording>();
        rec->rec = eegsz::synth_subject(
            label == 1 ? eegsz::ClassLabel::HC : eegsz::ClassLabel::SZ, seed);
        *out = rec.release();
    });
}

void eegsz_recording_free(eegsz_recording* rec) { delete rec; }

eegsz_status eegsz_recording_save(const eegsz_recording* rec, const char* path) {
    REQUIRE_PTR(rec);
    REQUIRE_PTR(path);
    return guarded([&]() { eegsz::save_recording(rec->rec, path); });
}

int eegsz_recording_label(const eegsz_recording* rec) {
    return rec ? static_cast<int>(rec->rec.label) : -1;
}

const char* eegsz_recording_subject_id(const eegsz_recording* rec) {
    return rec ? rec->rec.subject_id.c_str() : "";
}

double eegsz_recording_fs(const eegsz_recording* rec) { return rec ? rec->rec.fs : 0.0; }

eegsz_status eegsz_recording_channel(const eegsz_recording* rec, size_t channel, double* out,
                                     size_t capacity) {
    REQUIRE_PTR(rec);
    REQUIRE_PTR(out);
    return guarded([&]() {
        if (channel >= rec->rec.data.rows()) {
            eegsz::throw_config("channel index out of range");
        }
        if (capacity < rec->rec.data.cols()) {
            eegsz::throw_config("buffer too small for channel");
        }
        const double* row = rec->rec.data.row(channel);
        std::copy(row, row + rec->rec.data.cols(), out);
    });
}

eegsz_status eegsz_recording_normalize(const eegsz_recording* rec, int mode,
                                       eegsz_recording** out) {
    REQUIRE_PTR(rec);
    REQUIRE_PTR(out);
    return guarded([&]() {
        auto result = std::make_unique<eegsz_recording>();
        result->rec = eegsz::normalize(rec->rec,
                                       mode == EEGSZ_NORM_MINMAX
                                           ? eegsz::NormalizeMode::MinMaxPerChannel
                                           : eegsz::NormalizeMode::ZScorePerChannel);
        *out = result.release();
    });
}

/* ------------------------------------------------------------- datasets */

eegsz_status eegsz_dataset_load_manifest(const char* csv_path, eegsz_dataset** out) {
    REQUIRE_PTR(csv_path);
    REQUIRE_PTR(out);
    return guarded([&]() {
        auto ds = std::make_unique<eegsz_dataset>();
        ds->recs = eegsz::load_dataset(eegsz::load_manifest(csv_path));
        *out = ds.release();
    });
}

eegsz_status eegsz_dataset_synth(size_t n_per_class, uint64_t seed, eegsz_dataset** out) {
    REQUIRE_PTR(out);
    return guarded([&]() {
        if (n_per_class == 0) eegsz::throw_config("n_per_class must be positive");
        auto ds = std::make_unique<eegsz_dataset>();
        ds->recs = eegsz::synth_dataset(n_per_class, seed);
        *out = ds.release();
    });
}

void eegsz_dataset_free(eegsz_dataset* ds) { delete ds; }

size_t eegsz_dataset_count(const eegsz_dataset* ds) { return ds ? ds->recs.size() : 0; }

const eegsz_recording* eegsz_dataset_get(const eegsz_dataset* ds, size_t index) {
    if (!ds || index >= ds->recs.size()) return nullptr;
    if (ds->views.size() != ds->recs.size()) {
        ds->views.resize(ds->recs.size());
    }
    if (!ds->views[index]) {
        auto view = std::make_unique<eegsz_recording>();
        view->rec = ds->recs[index];
        ds->views[index] = std::move(view);
    }
    return ds->views[index].get();
}

eegsz_status eegsz_dataset_save(const eegsz_dataset* ds, const char* dir) {
    REQUIRE_PTR(ds);
    REQUIRE_PTR(dir);
    return guarded([&]() {
        namespace fs = std::filesystem;
        fs::create_directories(dir);
        eegsz::DatasetManifest manifest;
        for (const auto& rec : ds->recs) {
            const std::string file = (fs::path(dir) / (rec.subject_id + ".txt")).string();
            eegsz::save_recording(rec, file);
            manifest.entries.push_back({file, rec.subject_id, rec.label});
        }
        eegsz::save_manifest(manifest, (fs::path(dir) / "manifest.csv").string());
    });
}

/* ------------------------------------------------------------------ DWT */

eegsz_status eegsz_dwt(const double* signal, size_t n, const char* wavelet, int levels,
                       int boundary, eegsz_dwt_result** out) {
    REQUIRE_PTR(signal);
    REQUIRE_PTR(wavelet);
    REQUIRE_PTR(out);
    return guarded([&]() {
        const auto filter = eegsz::WaveletFilter::create(wavelet);
        auto res = std::make_unique<eegsz_dwt_result>();
        res->dec = eegsz::dwt_decompose(
            std::vector<double>(signal, signal + n), filter, levels,
            boundary == EEGSZ_DWT_BOUNDARY_SYMMETRIC ? eegsz::DwtBoundary::Symmetric
                                                     : eegsz::DwtBoundary::Zero);
        *out = res.release();
    });
}

void eegsz_dwt_free(eegsz_dwt_result* dwt) { delete dwt; }

int eegsz_dwt_levels(const eegsz_dwt_result* dwt) { return dwt ? dwt->dec.levels : 0; }

size_t eegsz_dwt_coeff_count(const eegsz_dwt_result* dwt, int level) {
    if (!dwt) return 0;
    if (level == 0) return dwt->dec.approx.size();
    if (level < 1 || level > dwt->dec.levels) return 0;
    return dwt->dec.details[static_cast<size_t>(level - 1)].size();
}

eegsz_status eegsz_dwt_coeffs(const eegsz_dwt_result* dwt, int level, double* out,
                              size_t capacity) {
    REQUIRE_PTR(dwt);
    REQUIRE_PTR(out);
    return guarded([&]() {
        const std::vector<double>* src = nullptr;
        if (level == 0) {
            src = &dwt->dec.approx;
        } else if (level >= 1 && level <= dwt->dec.levels) {
            src = &dwt->dec.details[static_cast<size_t>(level - 1)];
        } else {
            eegsz::throw_config("dwt level out of range");
        }
        if (capacity < src->size()) eegsz::throw_config("buffer too small for coefficients");
        std::copy(src->begin(), src->end(), out);
    });
}

eegsz_status eegsz_dwt_reconstruct(const eegsz_dwt_result* dwt, const char* wavelet,
                                   double* out, size_t capacity) {
    REQUIRE_PTR(dwt);
    REQUIRE_PTR(wavelet);
    REQUIRE_PTR(out);
    return guarded([&]() {
        if (capacity < dwt->dec.original_length) {
            eegsz::throw_config("buffer too small for reconstruction");
        }
        const auto filter = eegsz::WaveletFilter::create(wavelet);
        const auto rec = eegsz::dwt_reconstruct(dwt->dec, filter);
        std::copy(rec.begin(), rec.end(), out);
    });
}

eegsz_status eegsz_band_signals(const double* signal, size_t n, const char* wavelet,
                                double* out, size_t capacity) {
    REQUIRE_PTR(signal);
    REQUIRE_PTR(wavelet);
    REQUIRE_PTR(out);
    return guarded([&]() {
        if (capacity < 5 * n) eegsz::throw_config("buffer too small for five bands");
        const auto filter = eegsz::WaveletFilter::create(wavelet);
        const auto bands =
            eegsz::band_signals(std::vector<double>(signal, signal + n), filter);
        for (int b = 0; b < 5; ++b) {
            const auto& sig = bands.band(b);
            std::copy(sig.begin(), sig.end(), out + static_cast<size_t>(b) * n);
        }
    });
}

eegsz_status eegsz_band_signals_csv(const double* signal, size_t n, const char* wavelet,
                                    const char* path) {
    REQUIRE_PTR(signal);
    REQUIRE_PTR(wavelet);
    REQUIRE_PTR(path);
    return guarded([&]() {
        const auto filter = eegsz::WaveletFilter::create(wavelet);
        const auto bands =
            eegsz::band_signals(std::vector<double>(signal, signal + n), filter);
        eegsz::save_band_csv(bands, path);
    });
}

/* ------------------------------------------------------------------ FFT */

eegsz_status eegsz_fft(double* re, double* im, size_t n, int inverse) {
    REQUIRE_PTR(re);
    REQUIRE_PTR(im);
    return guarded([&]() {
        std::vector<eegsz::cdouble> x(n);
        for (size_t i = 0; i < n; ++i) x[i] = eegsz::cdouble(re[i], im[i]);
        eegsz::fft_inplace(x, inverse != 0);
        for (size_t i = 0; i < n; ++i) {
            re[i] = x[i].real();
            im[i] = x[i].imag();
        }
    });
}

/* ------------------------------------------------- time-frequency maps */

void eegsz_tfmap_free(eegsz_tfmap* map) { delete map; }

size_t eegsz_tfmap_rows(const eegsz_tfmap* map) { return map ? map->magnitudes.rows() : 0; }
size_t eegsz_tfmap_cols(const eegsz_tfmap* map) { return map ? map->magnitudes.cols() : 0; }

eegsz_status eegsz_tfmap_magnitudes(const eegsz_tfmap* map, double* out, size_t capacity) {
    REQUIRE_PTR(map);
    REQUIRE_PTR(out);
    return guarded([&]() {
        if (capacity < map->magnitudes.size()) eegsz::throw_config("buffer too small");
        std::copy(map->magnitudes.data().begin(), map->magnitudes.data().end(), out);
    });
}

eegsz_status eegsz_tfmap_frequencies(const eegsz_tfmap* map, double* out, size_t capacity) {
    REQUIRE_PTR(map);
    REQUIRE_PTR(out);
    return guarded([&]() {
        if (capacity < map->frequencies.size()) eegsz::throw_config("buffer too small");
        std::copy(map->frequencies.begin(), map->frequencies.end(), out);
    });
}

eegsz_status eegsz_tfmap_times(const eegsz_tfmap* map, double* out, size_t capacity) {
    REQUIRE_PTR(map);
    REQUIRE_PTR(out);
    return guarded([&]() {
        if (capacity < map->times.size()) eegsz::throw_config("buffer too small");
        std::copy(map->times.begin(), map->times.end(), out);
    });
}

eegsz_status eegsz_tfmap_save_csv(const eegsz_tfmap* map, const char* path) {
    REQUIRE_PTR(map);
    REQUIRE_PTR(path);
    return guarded([&]() {
        eegsz::save_tf_csv(map->magnitudes, map->frequencies, map->times, path);
    });
}

eegsz_status eegsz_tfmap_render(const eegsz_tfmap* map, size_t width, size_t height,
                                int log_scale, const char* path) {
    REQUIRE_PTR(map);
    REQUIRE_PTR(path);
    return guarded([&]() {
        const auto img = eegsz::render_tf_image(
            map->magnitudes, width, height,
            log_scale ? eegsz::IntensityScale::Log : eegsz::IntensityScale::Linear,
            map->rows_ascend_in_frequency);
        eegsz::write_image(img, path);
    });
}

/* ------------------------------------------------------------------ CWT */

eegsz_status eegsz_cwt_bank_create(double f_min, double f_max, int voices, double fs,
                                   double mu, double sigma, eegsz_cwt_bank** out) {
    REQUIRE_PTR(out);
    return guarded([&]() {
        auto bank = std::make_unique<eegsz_cwt_bank>();
        bank->bank = eegsz::build_filterbank(f_min, f_max, voices, fs, mu, sigma);
        *out = bank.release();
    });
}

void eegsz_cwt_bank_free(eegsz_cwt_bank* bank) { delete bank; }

size_t eegsz_cwt_bank_scales(const eegsz_cwt_bank* bank) {
    return bank ? bank->bank.scales.size() : 0;
}

eegsz_status eegsz_cwt_bank_frequencies(const eegsz_cwt_bank* bank, double* out,
                                        size_t capacity) {
    REQUIRE_PTR(bank);
    REQUIRE_PTR(out);
    return guarded([&]() {
        if (capacity < bank->bank.frequencies_hz.size()) {
            eegsz::throw_config("buffer too small");
        }
        std::copy(bank->bank.frequencies_hz.begin(), bank->bank.frequencies_hz.end(), out);
    });
}

eegsz_status eegsz_cwt(const eegsz_cwt_bank* bank, const double* signal, size_t n,
                       eegsz_tfmap** out) {
    REQUIRE_PTR(bank);
    REQUIRE_PTR(signal);
    REQUIRE_PTR(out);
    return guarded([&]() {
        auto scal = eegsz::cwt(std::vector<double>(signal, signal + n), bank->bank);
        auto map = std::make_unique<eegsz_tfmap>();
        map->magnitudes = std::move(scal.magnitudes);
        map->frequencies = std::move(scal.frequencies_hz);
        map->times = std::move(scal.times_s);
        map->rows_ascend_in_frequency = false;  // scalogram rows descend
        *out = map.release();
    });
}

/* ----------------------------------------------------------------- STFT */

eegsz_status eegsz_stft(const double* signal, size_t n, double fs, size_t window,
                        double overlap_fraction, size_t nfft, eegsz_tfmap** out) {
    REQUIRE_PTR(signal);
    REQUIRE_PTR(out);
    return guarded([&]() {
        auto spec = eegsz::stft(std::vector<double>(signal, signal + n), fs, window,
                                overlap_fraction, nfft);
        auto map = std::make_unique<eegsz_tfmap>();
        map->magnitudes = std::move(spec.magnitudes);
        map->frequencies = std::move(spec.frequencies_hz);
        map->times = std::move(spec.times_s);
        map->rows_ascend_in_frequency = true;  // DC bin in row 0
        *out = map.release();
    });
}

/* ------------------------------------------------------------------ CAE */

void eegsz_cae_options_init(eegsz_cae_options* opts) {
    if (!opts) return;
    opts->window = 512;
    opts->bottleneck = 64;
    opts->epochs = 20;
    opts->batch_size = 16;
    opts->learning_rate = 1e-3;
    opts->alpha = 0.2;
    opts->seed = 1;
    opts->channel_stride = 1;
}

eegsz_status eegsz_cae_create(const eegsz_cae_options* opts, eegsz_cae** out) {
    REQUIRE_PTR(out);
    return guarded([&]() {
        eegsz_cae_options defaults;
        eegsz_cae_options_init(&defaults);
        const eegsz_cae_options& o = opts ? *opts : defaults;
        eegsz::CaeConfig cfg;
        cfg.window = o.window;
        cfg.bottleneck = o.bottleneck;
        cfg.epochs = o.epochs;
        cfg.batch_size = o.batch_size;
        cfg.learning_rate = o.learning_rate;
        cfg.alpha = o.alpha;
        cfg.seed = o.seed;
        auto cae = std::make_unique<eegsz_cae>();
        cae->cae = eegsz::Cae::build(cfg);
        cae->channel_stride = o.channel_stride == 0 ? 1 : o.channel_stride;
        *out = cae.release();
    });
}

void eegsz_cae_free(eegsz_cae* cae) { delete cae; }

eegsz_status eegsz_cae_param_counts(const eegsz_cae* cae, uint64_t* trainable,
                                    uint64_t* non_trainable) {
    REQUIRE_PTR(cae);
    return guarded([&]() {
        const auto counts = cae->cae.param_counts();
        if (trainable) *trainable = counts.trainable;
        if (non_trainable) *non_trainable = counts.non_trainable;
    });
}

eegsz_status eegsz_cae_train(eegsz_cae* cae, const eegsz_dataset* ds) {
    REQUIRE_PTR(cae);
    REQUIRE_PTR(ds);
    return guarded([&]() {
        std::vector<eegsz::nn::Tensor> inputs;
        for (const auto& rec : ds->recs) {
            auto tensors = eegsz::prepare_cae_inputs(rec, cae->cae.config().window,
                                                     cae->filter, cae->channel_stride);
            for (auto& t : tensors) inputs.push_back(std::move(t));
        }
        cae->cae.train(inputs);
    });
}

size_t eegsz_cae_epochs_recorded(const eegsz_cae* cae) {
    return cae ? cae->cae.loss_history().size() : 0;
}

eegsz_status eegsz_cae_loss_history(const eegsz_cae* cae, double* out, size_t capacity) {
    REQUIRE_PTR(cae);
    REQUIRE_PTR(out);
    return guarded([&]() {
        const auto& hist = cae->cae.loss_history();
        if (capacity < hist.size()) eegsz::throw_config("buffer too small");
        std::copy(hist.begin(), hist.end(), out);
    });
}

eegsz_status eegsz_cae_encode(eegsz_cae* cae, const eegsz_recording* rec, size_t channel,
                              size_t window_index, double* out, size_t capacity) {
    REQUIRE_PTR(cae);
    REQUIRE_PTR(rec);
    REQUIRE_PTR(out);
    return guarded([&]() {
        if (capacity < cae->cae.bottleneck_width()) {
            eegsz::throw_config("buffer too small for features");
        }
        const auto feats = cae->cae.encode(window_tensor(cae, rec, channel, window_index));
        std::copy(feats.begin(), feats.end(), out);
    });
}

eegsz_status eegsz_cae_reconstruction_error(eegsz_cae* cae, const eegsz_recording* rec,
                                            size_t channel, size_t window_index, double* out) {
    REQUIRE_PTR(cae);
    REQUIRE_PTR(rec);
    REQUIRE_PTR(out);
    return guarded([&]() {
        *out = cae->cae.reconstruction_error(window_tensor(cae, rec, channel, window_index));
    });
}

eegsz_status eegsz_cae_save(const eegsz_cae* cae, const char* path) {
    REQUIRE_PTR(cae);
    REQUIRE_PTR(path);
    return guarded([&]() { cae->cae.save(path); });
}

eegsz_status eegsz_cae_load(const char* path, eegsz_cae** out) {
    REQUIRE_PTR(path);
    REQUIRE_PTR(out);
    return guarded([&]() {
        auto cae = std::make_unique<eegsz_cae>();
        cae->cae = eegsz::Cae::load(path);
        *out = cae.release();
    });
}

eegsz_status eegsz_cae_features_csv(eegsz_cae* cae, const eegsz_dataset* ds, const char* path) {
    REQUIRE_PTR(cae);
    REQUIRE_PTR(ds);
    REQUIRE_PTR(path);
    return guarded([&]() {
        std::ofstream out(path);
        if (!out) eegsz::throw_data(std::string("cannot write features: ") + path);
        const size_t width = cae->cae.bottleneck_width();
        out << "subject_id,channel,window_index,label";
        for (size_t c = 0; c < width; ++c) out << ",f" << c;
        out << '\n';
        out.precision(17);
        const size_t window = cae->cae.config().window;
        for (const auto& rec : ds->recs) {
            auto tensors =
                eegsz::prepare_cae_inputs(rec, window, cae->filter, cae->channel_stride);
            const size_t per_channel = (rec.data.cols() - window) / window + 1;
            for (size_t i = 0; i < tensors.size(); ++i) {
                const size_t channel = (i / per_channel) * cae->channel_stride;
                const size_t win = i % per_channel;
                const auto feats = cae->cae.encode(tensors[i]);
                out << rec.subject_id << ',' << channel << ',' << win << ','
                    << static_cast<int>(rec.label);
                for (double v : feats) out << ',' << v;
                out << '\n';
            }
        }
    });
}

/* ---------------------------------------------------------- classifiers */

eegsz_status eegsz_knn_create(size_t k, eegsz_classifier** out) {
    REQUIRE_PTR(out);
    return guarded([&]() {
        auto wrapper = std::make_unique<eegsz_classifier>();
        wrapper->clf = std::make_shared<eegsz::KnnClassifier>(k);
        *out = wrapper.release();
    });
}

eegsz_status eegsz_svc_create(double c, size_t iterations, eegsz_classifier** out) {
    REQUIRE_PTR(out);
    return guarded([&]() {
        auto wrapper = std::make_unique<eegsz_classifier>();
        wrapper->clf = std::make_shared<eegsz::LinearSvcClassifier>(
            c, iterations == 0 ? 2000 : iterations);
        *out = wrapper.release();
    });
}

eegsz_status eegsz_rf_create(size_t trees, int max_depth, uint64_t seed,
                             eegsz_classifier** out) {
    REQUIRE_PTR(out);
    return guarded([&]() {
        auto wrapper = std::make_unique<eegsz_classifier>();
        wrapper->clf = std::make_shared<eegsz::RandomForestClassifier>(trees, max_depth, seed);
        *out = wrapper.release();
    });
}

eegsz_status eegsz_vote_create(eegsz_classifier* const* members, size_t count,
                               eegsz_classifier** out) {
    REQUIRE_PTR(members);
    REQUIRE_PTR(out);
    return guarded([&]() {
        std::vector<std::shared_ptr<eegsz::ProbClassifier>> list;
        for (size_t i = 0; i < count; ++i) {
            if (!members[i]) eegsz::throw_config("vote: null member");
            list.push_back(members[i]->clf);
        }
        auto wrapper = std::make_unique<eegsz_classifier>();
        wrapper->clf = std::make_shared<eegsz::SoftVoteClassifier>(std::move(list));
        *out = wrapper.release();
    });
}

void eegsz_classifier_free(eegsz_classifier* clf) { delete clf; }

eegsz_status eegsz_classifier_fit(eegsz_classifier* clf, const double* x, size_t rows,
                                  size_t cols, const int* labels, const char* const* groups) {
    REQUIRE_PTR(clf);
    REQUIRE_PTR(x);
    REQUIRE_PTR(labels);
    return guarded([&]() {
        eegsz::FeatureMatrix fm;
        fm.cols = cols;
        for (size_t r = 0; r < rows; ++r) {
            fm.add_row(x + r * cols, labels[r],
                       groups && groups[r] ? std::string(groups[r]) : std::string());
        }
        clf->clf->fit(fm);
    });
}

eegsz_status eegsz_classifier_predict_proba(const eegsz_classifier* clf, const double* x,
                                            size_t dim, double out[2]) {
    REQUIRE_PTR(clf);
    REQUIRE_PTR(x);
    REQUIRE_PTR(out);
    return guarded([&]() {
        const auto p = clf->clf->predict_proba(x, dim);
        out[0] = p[0];
        out[1] = p[1];
    });
}

/* ------------------------------------------------------------ evaluation */

eegsz_status eegsz_metrics(uint64_t tp, uint64_t fp, uint64_t tn, uint64_t fn,
                           double* accuracy, double* precision, double* recall, double* f1) {
    return guarded([&]() {
        const eegsz::Metrics m = eegsz::metrics({tp, fp, tn, fn});
        if (accuracy) *accuracy = m.accuracy;
        if (precision) *precision = m.precision;
        if (recall) *recall = m.recall;
        if (f1) *f1 = m.f1;
    });
}

eegsz_status eegsz_cohens_kappa(uint64_t tp, uint64_t fp, uint64_t tn, uint64_t fn,
                                double* kappa) {
    REQUIRE_PTR(kappa);
    return guarded([&]() { *kappa = eegsz::cohens_kappa({tp, fp, tn, fn}); });
}

eegsz_status eegsz_roc_auc(const double* scores, const int* labels, size_t n, double* auc) {
    REQUIRE_PTR(scores);
    REQUIRE_PTR(labels);
    REQUIRE_PTR(auc);
    return guarded([&]() {
        *auc = eegsz::roc_auc(std::vector<double>(scores, scores + n),
                              std::vector<int>(labels, labels + n));
    });
}

void eegsz_benchmark_options_init(eegsz_benchmark_options* opts) {
    if (!opts) return;
    opts->k = 5;
    opts->seed = 7;
    opts->subject_wise = 1;
    opts->window = 512;
    opts->channel_stride = 4;
    opts->cae_epochs = 10;
    opts->max_cae_train = 1600;
    opts->knn_k = 5;
    opts->svc_c = 1.0;
    opts->rf_trees = 50;
    opts->rf_depth = 12;
    opts->image_size = 64;
    opts->cnn_epochs = 20;
    opts->cnn_channel_stride = 16;
    opts->threads = 0;
}

eegsz_status eegsz_benchmark_cae(const eegsz_dataset* ds, const eegsz_benchmark_options* opts,
                                 eegsz_report** reports, size_t count) {
    REQUIRE_PTR(ds);
    REQUIRE_PTR(reports);
    return guarded([&]() {
        if (count < EEGSZ_BENCH_COUNT) {
            eegsz::throw_config("reports array must hold EEGSZ_BENCH_COUNT entries");
        }
        auto results = eegsz::run_cae_benchmark(ds->recs, to_core_options(opts));
        const char* names[EEGSZ_BENCH_COUNT] = {"knn", "svc", "rf", "vote"};
        for (size_t i = 0; i < EEGSZ_BENCH_COUNT; ++i) {
            auto rep = std::make_unique<eegsz_report>();
            rep->report = std::move(results[names[i]]);
            reports[i] = rep.release();
        }
    });
}

eegsz_status eegsz_benchmark_cnn(const eegsz_dataset* ds, const eegsz_benchmark_options* opts,
                                 eegsz_report** report) {
    REQUIRE_PTR(ds);
    REQUIRE_PTR(report);
    return guarded([&]() {
        auto rep = std::make_unique<eegsz_report>();
        rep->report = eegsz::run_cnn_benchmark(ds->recs, to_core_options(opts));
        *report = rep.release();
    });
}

void eegsz_report_free(eegsz_report* report) { delete report; }

size_t eegsz_report_folds(const eegsz_report* report) {
    return report ? report->report.folds.size() : 0;
}

eegsz_status eegsz_report_mean(const eegsz_report* report, int metric, double* out) {
    REQUIRE_PTR(report);
    REQUIRE_PTR(out);
    return guarded([&]() {
        if (metric < 0 || metric > 5) eegsz::throw_config("metric index out of range");
        *out = report->report.mean[static_cast<size_t>(metric)];
    });
}

eegsz_status eegsz_report_fold_metric(const eegsz_report* report, size_t fold, int metric,
                                      double* out) {
    REQUIRE_PTR(report);
    REQUIRE_PTR(out);
    return guarded([&]() {
        if (fold >= report->report.folds.size()) eegsz::throw_config("fold out of range");
        if (metric < 0 || metric > 5) eegsz::throw_config("metric index out of range");
        const auto& f = report->report.folds[fold];
        const double vals[6] = {f.m.accuracy, f.m.precision, f.m.recall, f.m.f1, f.auc, f.kappa};
        *out = vals[metric];
    });
}

eegsz_status eegsz_report_json(const eegsz_report* report, char** out) {
    REQUIRE_PTR(report);
    REQUIRE_PTR(out);
    return guarded([&]() {
        const std::string json = report->report.to_json();
        char* buf = new char[json.size() + 1];
        std::memcpy(buf, json.c_str(), json.size() + 1);
        *out = buf;
    });
}

eegsz_status eegsz_report_save(const eegsz_report* report, const char* dir) {
    REQUIRE_PTR(report);
    REQUIRE_PTR(dir);
    return guarded([&]() {
        namespace fs = std::filesystem;
        fs::create_directories(dir);
        const auto& rep = report->report;

        std::ofstream json((fs::path(dir) / "report.json").string());
        if (!json) eegsz::throw_data("cannot write report.json");
        json << rep.to_json();
        rep.save_csv((fs::path(dir) / "report.csv").string());

        // pooled confusion + ROC over all folds
        eegsz::ConfusionMatrix total;
        std::vector<int> labels;
        std::vector<double> scores;
        for (const auto& f : rep.folds) {
            total.tp += f.cm.tp;
            total.fp += f.cm.fp;
            total.tn += f.cm.tn;
            total.fn += f.cm.fn;
            labels.insert(labels.end(), f.labels.begin(), f.labels.end());
            scores.insert(scores.end(), f.scores.begin(), f.scores.end());
        }
        eegsz::write_image(eegsz::plot_confusion(static_cast<double>(total.tp),
                                                 static_cast<double>(total.fp),
                                                 static_cast<double>(total.tn),
                                                 static_cast<double>(total.fn)),
                           (fs::path(dir) / "confusion.png").string());
        bool two_class = false;
        for (size_t i = 1; i < labels.size(); ++i) {
            if (labels[i] != labels[0]) { two_class = true; break; }
        }
        if (two_class) {
            const auto curve = eegsz::roc_curve(scores, labels);
            std::vector<double> xs, ys;
            std::ofstream roc_csv((fs::path(dir) / "roc.csv").string());
            roc_csv << "fpr,tpr\n";
            for (const auto& p : curve) {
                xs.push_back(p[0]);
                ys.push_back(p[1]);
                roc_csv << p[0] << ',' << p[1] << '\n';
            }
            eegsz::write_image(eegsz::plot_line(xs, ys),
                               (fs::path(dir) / "roc.png").string());
        }
    });
}

void eegsz_string_free(char* s) { delete[] s; }

} /* extern "C" */
