#pragma once

#include <string>
#include <vector>

#include "core/matrix.hpp"

namespace eegsz {

enum class ClassLabel : int { SZ = 0, HC = 1 };

constexpr size_t kChannels = 16;
constexpr size_t kSamplesPerChannel = 7680;
constexpr double kSampleRateHz = 128.0;

/// One subject: 16 channels x 7680 samples at 128 Hz.
struct EegRecording {
    std::string subject_id;
    ClassLabel label = ClassLabel::SZ;
    Matrix data;  // [16 x 7680]
    double fs = kSampleRateHz;
};

enum class NormalizeMode { ZScorePerChannel, MinMaxPerChannel };

struct Segment {
    std::string subject_id;
    size_t channel = 0;
    size_t window_index = 0;
    ClassLabel label = ClassLabel::SZ;
    std::vector<double> samples;
};

struct ManifestEntry {
    std::string path;
    std::string subject_id;
    ClassLabel label = ClassLabel::SZ;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    size_t count_sz = 0;
    size_t count_hc = 0;
};

/// Reads 122880 whitespace-separated numeric tokens; the first 7680 values
/// become channel 0, the next 7680 channel 1, and so on.
EegRecording load_subject(const std::string& path, const std::string& subject_id,
                          ClassLabel label);

/// Text layout mirror of load_subject: one channel per line, 17 significant
/// digits so values survive a write/read round trip bit-for-bit.
void save_recording(const EegRecording& rec, const std::string& path);

EegRecording normalize(const EegRecording& rec, NormalizeMode mode);

std::vector<Segment> segment(const EegRecording& rec, size_t window, size_t hop);

/// Deterministic synthetic subject. SZ-class signals carry elevated
/// 0.5-8 Hz power and reduced 8-13 Hz power relative to HC-class signals,
/// plus broadband noise.
EegRecording synth_subject(ClassLabel label, uint64_t seed);

DatasetManifest load_manifest(const std::string& csv_path);
void save_manifest(const DatasetManifest& manifest, const std::string& csv_path);

std::vector<EegRecording> load_dataset(const DatasetManifest& manifest);
std::vector<EegRecording> synth_dataset(size_t n_per_class, uint64_t seed);

} // namespace eegsz
