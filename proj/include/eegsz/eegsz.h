/* eegsz: EEG schizophrenia-classification pipeline.
 *
 * C interface over the C++ core. Objects are opaque handles created and
 * destroyed through these functions; every fallible call returns an
 * eegsz_status, with a thread-local message available from
 * eegsz_last_error(). Output parameters are written only on EEGSZ_OK.
 */
#ifndef EEGSZ_H
#define EEGSZ_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define EEGSZ_API __declspec(dllexport)
#else
#define EEGSZ_API __attribute__((visibility("default")))
#endif

typedef enum eegsz_status {
    EEGSZ_OK = 0,
    EEGSZ_ERR_CONFIG = 2,  /* invalid parameters, shapes or specs */
    EEGSZ_ERR_DATA = 3,    /* malformed or degenerate input data */
    EEGSZ_ERR_NUMERIC = 4, /* divergence or non-finite values */
    EEGSZ_ERR_NULLPTR = 5
} eegsz_status;

EEGSZ_API const char* eegsz_version(void);

/* Message describing the most recent failure on this thread. */
EEGSZ_API const char* eegsz_last_error(void);

/* ------------------------------------------------------------ recordings */

typedef struct eegsz_recording eegsz_recording;

#define EEGSZ_LABEL_SZ 0
#define EEGSZ_LABEL_HC 1

#define EEGSZ_CHANNELS 16
#define EEGSZ_SAMPLES 7680

/* Reads 16x7680 values from a numeric text file (channel-major). */
EEGSZ_API eegsz_status eegsz_recording_load(const char* path, const char* subject_id,
                                            int label, eegsz_recording** out);

/* Deterministic synthetic subject with a class-dependent band-power profile. */
EEGSZ_API eegsz_status eegsz_recording_synth(int label, uint64_t seed,
                                             eegsz_recording** out);

EEGSZ_API void eegsz_recording_free(eegsz_recording* rec);

EEGSZ_API eegsz_status eegsz_recording_save(const eegsz_recording* rec, const char* path);

EEGSZ_API int eegsz_recording_label(const eegsz_recording* rec);
EEGSZ_API const char* eegsz_recording_subject_id(const eegsz_recording* rec);
EEGSZ_API double eegsz_recording_fs(const eegsz_recording* rec);

/* Copies one channel (EEGSZ_SAMPLES values) into out. */
EEGSZ_API eegsz_status eegsz_recording_channel(const eegsz_recording* rec, size_t channel,
                                               double* out, size_t capacity);

#define EEGSZ_NORM_ZSCORE 0
#define EEGSZ_NORM_MINMAX 1

EEGSZ_API eegsz_status eegsz_recording_normalize(const eegsz_recording* rec, int mode,
                                                 eegsz_recording** out);

/* ------------------------------------------------------------- datasets */

typedef struct eegsz_dataset eegsz_dataset;

/* CSV manifest with header `path,subject_id,label`. */
EEGSZ_API eegsz_status eegsz_dataset_load_manifest(const char* csv_path,
                                                   eegsz_dataset** out);

EEGSZ_API eegsz_status eegsz_dataset_synth(size_t n_per_class, uint64_t seed,
                                           eegsz_dataset** out);

EEGSZ_API void eegsz_dataset_free(eegsz_dataset* ds);
EEGSZ_API size_t eegsz_dataset_count(const eegsz_dataset* ds);
/* Borrowed reference, valid while the dataset lives. */
EEGSZ_API const eegsz_recording* eegsz_dataset_get(const eegsz_dataset* ds, size_t index);

/* Writes per-subject recording files plus manifest.csv under dir. */
EEGSZ_API eegsz_status eegsz_dataset_save(const eegsz_dataset* ds, const char* dir);

/* ------------------------------------------------------------------ DWT */

typedef struct eegsz_dwt_result eegsz_dwt_result;

#define EEGSZ_DWT_BOUNDARY_ZERO 0
#define EEGSZ_DWT_BOUNDARY_SYMMETRIC 1

EEGSZ_API eegsz_status eegsz_dwt(const double* signal, size_t n, const char* wavelet,
                                 int levels, int boundary, eegsz_dwt_result** out);
EEGSZ_API void eegsz_dwt_free(eegsz_dwt_result* dwt);

EEGSZ_API int eegsz_dwt_levels(const eegsz_dwt_result* dwt);
/* level 0 = approximation, level 1..L = detail d_level */
EEGSZ_API size_t eegsz_dwt_coeff_count(const eegsz_dwt_result* dwt, int level);
EEGSZ_API eegsz_status eegsz_dwt_coeffs(const eegsz_dwt_result* dwt, int level, double* out,
                                        size_t capacity);

EEGSZ_API eegsz_status eegsz_dwt_reconstruct(const eegsz_dwt_result* dwt, const char* wavelet,
                                             double* out, size_t capacity);

/* Five rows (delta..gamma), each n values, written contiguously into out
 * (capacity >= 5*n). The rows sum to the input signal. */
EEGSZ_API eegsz_status eegsz_band_signals(const double* signal, size_t n, const char* wavelet,
                                          double* out, size_t capacity);

EEGSZ_API eegsz_status eegsz_band_signals_csv(const double* signal, size_t n,
                                              const char* wavelet, const char* path);

/* ------------------------------------------------------------------ FFT */

/* In-place complex FFT; n must be a power of two. inverse != 0 applies the
 * 1/n factor. */
EEGSZ_API eegsz_status eegsz_fft(double* re, double* im, size_t n, int inverse);

/* ------------------------------------------------- time-frequency maps */

/* Shared scalogram/spectrogram handle: magnitudes with per-row frequencies
 * and per-column times. */
typedef struct eegsz_tfmap eegsz_tfmap;

EEGSZ_API void eegsz_tfmap_free(eegsz_tfmap* map);
EEGSZ_API size_t eegsz_tfmap_rows(const eegsz_tfmap* map);
EEGSZ_API size_t eegsz_tfmap_cols(const eegsz_tfmap* map);
EEGSZ_API eegsz_status eegsz_tfmap_magnitudes(const eegsz_tfmap* map, double* out,
                                              size_t capacity);
EEGSZ_API eegsz_status eegsz_tfmap_frequencies(const eegsz_tfmap* map, double* out,
                                               size_t capacity);
EEGSZ_API eegsz_status eegsz_tfmap_times(const eegsz_tfmap* map, double* out, size_t capacity);
EEGSZ_API eegsz_status eegsz_tfmap_save_csv(const eegsz_tfmap* map, const char* path);

#define EEGSZ_SCALE_LINEAR 0
#define EEGSZ_SCALE_LOG 1

/* Renders to 8-bit grayscale (PGM for any extension except .png). */
EEGSZ_API eegsz_status eegsz_tfmap_render(const eegsz_tfmap* map, size_t width, size_t height,
                                          int log_scale, const char* path);

/* ------------------------------------------------------------------ CWT */

typedef struct eegsz_cwt_bank eegsz_cwt_bank;

/* Bump-wavelet bank; defaults mu = 5, sigma = 0.6, 12 voices/octave over
 * 0.5..50 Hz at fs = 128. */
EEGSZ_API eegsz_status eegsz_cwt_bank_create(double f_min, double f_max, int voices, double fs,
                                             double mu, double sigma, eegsz_cwt_bank** out);
EEGSZ_API void eegsz_cwt_bank_free(eegsz_cwt_bank* bank);
EEGSZ_API size_t eegsz_cwt_bank_scales(const eegsz_cwt_bank* bank);
EEGSZ_API eegsz_status eegsz_cwt_bank_frequencies(const eegsz_cwt_bank* bank, double* out,
                                                  size_t capacity);

EEGSZ_API eegsz_status eegsz_cwt(const eegsz_cwt_bank* bank, const double* signal, size_t n,
                                 eegsz_tfmap** out);

/* ----------------------------------------------------------------- STFT */

EEGSZ_API eegsz_status eegsz_stft(const double* signal, size_t n, double fs, size_t window,
                                  double overlap_fraction, size_t nfft, eegsz_tfmap** out);

/* ------------------------------------------------------------------ CAE */

typedef struct eegsz_cae eegsz_cae;

typedef struct eegsz_cae_options {
    size_t window;        /* samples per band slice (default 512) */
    size_t bottleneck;    /* feature width (default 64) */
    size_t epochs;        /* default 20 */
    size_t batch_size;    /* default 16 */
    double learning_rate; /* default 1e-3 */
    double alpha;         /* leaky-relu slope (default 0.2) */
    uint64_t seed;        /* default 1 */
    size_t channel_stride;/* use every n-th channel when training (default 1) */
} eegsz_cae_options;

EEGSZ_API void eegsz_cae_options_init(eegsz_cae_options* opts);

EEGSZ_API eegsz_status eegsz_cae_create(const eegsz_cae_options* opts, eegsz_cae** out);
EEGSZ_API void eegsz_cae_free(eegsz_cae* cae);

EEGSZ_API eegsz_status eegsz_cae_param_counts(const eegsz_cae* cae, uint64_t* trainable,
                                              uint64_t* non_trainable);

/* Trains on band-decomposed windows of every recording in the dataset. */
EEGSZ_API eegsz_status eegsz_cae_train(eegsz_cae* cae, const eegsz_dataset* ds);

EEGSZ_API size_t eegsz_cae_epochs_recorded(const eegsz_cae* cae);
EEGSZ_API eegsz_status eegsz_cae_loss_history(const eegsz_cae* cae, double* out,
                                              size_t capacity);

/* Bottleneck features for one channel window of a recording. */
EEGSZ_API eegsz_status eegsz_cae_encode(eegsz_cae* cae, const eegsz_recording* rec,
                                        size_t channel, size_t window_index, double* out,
                                        size_t capacity);

EEGSZ_API eegsz_status eegsz_cae_reconstruction_error(eegsz_cae* cae,
                                                      const eegsz_recording* rec,
                                                      size_t channel, size_t window_index,
                                                      double* out);

EEGSZ_API eegsz_status eegsz_cae_save(const eegsz_cae* cae, const char* path);
EEGSZ_API eegsz_status eegsz_cae_load(const char* path, eegsz_cae** out);

/* Encodes the whole dataset into a feature CSV
 * (subject_id,label,f0..f{width-1} per window). */
EEGSZ_API eegsz_status eegsz_cae_features_csv(eegsz_cae* cae, const eegsz_dataset* ds,
                                              const char* path);

/* ---------------------------------------------------------- classifiers */

typedef struct eegsz_classifier eegsz_classifier;

EEGSZ_API eegsz_status eegsz_knn_create(size_t k, eegsz_classifier** out);
EEGSZ_API eegsz_status eegsz_svc_create(double c, size_t iterations, eegsz_classifier** out);
EEGSZ_API eegsz_status eegsz_rf_create(size_t trees, int max_depth, uint64_t seed,
                                       eegsz_classifier** out);
/* The vote borrows no ownership; members must outlive it. */
EEGSZ_API eegsz_status eegsz_vote_create(eegsz_classifier* const* members, size_t count,
                                         eegsz_classifier** out);
EEGSZ_API void eegsz_classifier_free(eegsz_classifier* clf);

/* Row-major features with parallel labels (0/1). Group ids are optional
 * (NULL) and keep subject-wise splits possible. */
EEGSZ_API eegsz_status eegsz_classifier_fit(eegsz_classifier* clf, const double* x,
                                            size_t rows, size_t cols, const int* labels,
                                            const char* const* groups);
EEGSZ_API eegsz_status eegsz_classifier_predict_proba(const eegsz_classifier* clf,
                                                      const double* x, size_t dim,
                                                      double out[2]);

/* ------------------------------------------------------------ evaluation */

EEGSZ_API eegsz_status eegsz_metrics(uint64_t tp, uint64_t fp, uint64_t tn, uint64_t fn,
                                     double* accuracy, double* precision, double* recall,
                                     double* f1);
EEGSZ_API eegsz_status eegsz_cohens_kappa(uint64_t tp, uint64_t fp, uint64_t tn, uint64_t fn,
                                          double* kappa);
EEGSZ_API eegsz_status eegsz_roc_auc(const double* scores, const int* labels, size_t n,
                                     double* auc);

typedef struct eegsz_report eegsz_report;

typedef struct eegsz_benchmark_options {
    size_t k;               /* folds (default 5) */
    uint64_t seed;          /* default 7 */
    int subject_wise;       /* 1 = group folds by subject (default) */
    size_t window;          /* CAE window (default 512) */
    size_t channel_stride;  /* CAE channels subsample (default 4) */
    size_t cae_epochs;      /* default 10 */
    size_t max_cae_train;   /* per-fold CAE training cap, 0 = all (default 1600) */
    size_t knn_k;           /* default 5 */
    double svc_c;           /* default 1.0 */
    size_t rf_trees;        /* default 50 */
    int rf_depth;           /* default 12 */
    size_t image_size;      /* CNN input (default 64) */
    size_t cnn_epochs;      /* default 20 */
    size_t cnn_channel_stride; /* default 16 (channel 0 only) */
    size_t threads;         /* worker cap, 0 = hardware (default 0) */
} eegsz_benchmark_options;

EEGSZ_API void eegsz_benchmark_options_init(eegsz_benchmark_options* opts);

/* Cross-validates CAE features with KNN/SVC/RF/vote. Returns one report
 * per classifier; reports[] receives `count` handles owned by the caller. */
EEGSZ_API eegsz_status eegsz_benchmark_cae(const eegsz_dataset* ds,
                                           const eegsz_benchmark_options* opts,
                                           eegsz_report** reports, size_t count);
#define EEGSZ_BENCH_KNN 0
#define EEGSZ_BENCH_SVC 1
#define EEGSZ_BENCH_RF 2
#define EEGSZ_BENCH_VOTE 3
#define EEGSZ_BENCH_COUNT 4

EEGSZ_API eegsz_status eegsz_benchmark_cnn(const eegsz_dataset* ds,
                                           const eegsz_benchmark_options* opts,
                                           eegsz_report** report);

EEGSZ_API void eegsz_report_free(eegsz_report* report);
EEGSZ_API size_t eegsz_report_folds(const eegsz_report* report);
/* metric: 0 accuracy, 1 precision, 2 recall, 3 f1, 4 auc, 5 kappa */
EEGSZ_API eegsz_status eegsz_report_mean(const eegsz_report* report, int metric, double* out);
EEGSZ_API eegsz_status eegsz_report_fold_metric(const eegsz_report* report, size_t fold,
                                                int metric, double* out);
/* Serialized JSON; free with eegsz_string_free. */
EEGSZ_API eegsz_status eegsz_report_json(const eegsz_report* report, char** out);
/* Writes report.json, report.csv, confusion + ROC plots under dir. */
EEGSZ_API eegsz_status eegsz_report_save(const eegsz_report* report, const char* dir);

EEGSZ_API void eegsz_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* EEGSZ_H */
