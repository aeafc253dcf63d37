#include "core/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace eegsz {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr size_t kTotalValues = kChannels * kSamplesPerChannel;
} // namespace

EegRecording load_subject(const std::string& path, const std::string& subject_id,
                          ClassLabel label) {
    std::ifstream in(path);
    if (!in) throw_data("cannot open recording: " + path);

    EegRecording rec;
    rec.subject_id = subject_id;
    rec.label = label;
    rec.data = Matrix(kChannels, kSamplesPerChannel);

    size_t count = 0;
    size_t line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            const char* begin = tok.data();
            const char* end = begin + tok.size();
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(begin, end, value);
            if (ec != std::errc() || ptr != end) {
                throw_data(path + ": non-numeric token '" + tok + "' on line " +
                           std::to_string(line_no));
            }
            if (!std::isfinite(value)) {
                throw_data(path + ": non-finite value on line " + std::to_string(line_no));
            }
            if (count >= kTotalValues) {
                throw_data(path + ": malformed recording, more than " +
                           std::to_string(kTotalValues) + " values");
            }
            rec.data.data()[count++] = value;
        }
    }
    if (count != kTotalValues) {
        throw_data(path + ": malformed recording, expected " + std::to_string(kTotalValues) +
                   " values but found " + std::to_string(count));
    }
    return rec;
}

void save_recording(const EegRecording& rec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw_data("cannot write recording: " + path);
    out.precision(17);
    for (size_t ch = 0; ch < kChannels; ++ch) {
        const double* row = rec.data.row(ch);
        for (size_t i = 0; i < kSamplesPerChannel; ++i) {
            if (i) out << ' ';
            out << row[i];
        }
        out << '\n';
    }
}

EegRecording normalize(const EegRecording& rec, NormalizeMode mode) {
    EegRecording out = rec;
    const size_t n = rec.data.cols();
    for (size_t ch = 0; ch < rec.data.rows(); ++ch) {
        const double* src = rec.data.row(ch);
        double* dst = out.data.row(ch);
        if (mode == NormalizeMode::ZScorePerChannel) {
            double mean = 0.0;
            for (size_t i = 0; i < n; ++i) mean += src[i];
            mean /= static_cast<double>(n);
            double var = 0.0;
            for (size_t i = 0; i < n; ++i) {
                const double d = src[i] - mean;
                var += d * d;
            }
            var /= static_cast<double>(n);
            if (var <= 0.0) {
                throw_data("normalize: degenerate channel " + std::to_string(ch) +
                           " has zero variance");
            }
            const double inv = 1.0 / std::sqrt(var);
            for (size_t i = 0; i < n; ++i) dst[i] = (src[i] - mean) * inv;
        } else {
            double lo = src[0], hi = src[0];
            for (size_t i = 0; i < n; ++i) {
                lo = std::min(lo, src[i]);
                hi = std::max(hi, src[i]);
            }
            if (hi <= lo) {
                throw_data("normalize: degenerate channel " + std::to_string(ch) +
                           " has zero range");
            }
            const double inv = 1.0 / (hi - lo);
            for (size_t i = 0; i < n; ++i) dst[i] = (src[i] - lo) * inv;
        }
    }
    return out;
}

std::vector<Segment> segment(const EegRecording& rec, size_t window, size_t hop) {
    const size_t n = rec.data.cols();
    if (window == 0 || window > n) {
        throw_config("segment: window " + std::to_string(window) +
                     " invalid for recording length " + std::to_string(n));
    }
    if (hop == 0) throw_config("segment: hop must be positive");

    const size_t per_channel = (n - window) / hop + 1;
    std::vector<Segment> segs;
    segs.reserve(per_channel * rec.data.rows());
    for (size_t ch = 0; ch < rec.data.rows(); ++ch) {
        const double* row = rec.data.row(ch);
        for (size_t w = 0; w < per_channel; ++w) {
            Segment s;
            s.subject_id = rec.subject_id;
            s.channel = ch;
            s.window_index = w;
            s.label = rec.label;
            s.samples.assign(row + w * hop, row + w * hop + window);
            segs.push_back(std::move(s));
        }
    }
    return segs;
}

EegRecording synth_subject(ClassLabel label, uint64_t seed) {
    // tone frequencies per clinical band; gains differ by class
    static const double kTones[5][2] = {
        {1.0, 2.5},    // delta
        {5.0, 6.5},    // theta
        {9.5, 11.0},   // alpha
        {18.0, 24.0},  // beta
        {35.0, 42.0},  // gamma
    };
    const bool sz = (label == ClassLabel::SZ);
    const double gains[5] = {
        sz ? 2.6 : 0.6,  // delta
        sz ? 1.8 : 0.6,  // theta
        sz ? 0.6 : 2.8,  // alpha
        0.5,             // beta
        0.4,             // gamma
    };

    EegRecording rec;
    rec.subject_id = (sz ? std::string("synth_sz_") : std::string("synth_hc_")) +
                     std::to_string(seed);
    rec.label = label;
    rec.fs = kSampleRateHz;
    rec.data = Matrix(kChannels, kSamplesPerChannel);

    for (size_t ch = 0; ch < kChannels; ++ch) {
        Rng rng(splitmix64(seed * 31 + ch) ^ (sz ? 0x5a5a5a5aULL : 0xc3c3c3c3ULL));
        double* row = rec.data.row(ch);
        for (int band = 0; band < 5; ++band) {
            for (double tone : kTones[band]) {
                const double amp = gains[band] * rng.uniform(0.9, 1.1);
                const double phase = rng.uniform(0.0, 2.0 * kPi);
                const double w = 2.0 * kPi * tone / kSampleRateHz;
                for (size_t i = 0; i < kSamplesPerChannel; ++i) {
                    row[i] += amp * std::sin(w * static_cast<double>(i) + phase);
                }
            }
        }
        for (size_t i = 0; i < kSamplesPerChannel; ++i) {
            row[i] += 0.7 * rng.normal();
        }
    }
    return rec;
}

DatasetManifest load_manifest(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw_data("cannot open manifest: " + csv_path);
    std::string line;
    if (!std::getline(in, line)) throw_data("manifest is empty: " + csv_path);
    // tolerate trailing carriage returns from foreign line endings
    auto strip = [](std::string s) {
        while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
        return s;
    };
    if (strip(line) != "path,subject_id,label") {
        throw_data("manifest header must be 'path,subject_id,label': " + csv_path);
    }

    DatasetManifest m;
    std::set<std::string> seen;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip(line);
        if (line.empty()) continue;
        std::istringstream ls(line);
        ManifestEntry e;
        std::string label_str;
        if (!std::getline(ls, e.path, ',') || !std::getline(ls, e.subject_id, ',') ||
            !std::getline(ls, label_str)) {
            throw_data(csv_path + ": malformed manifest row on line " + std::to_string(line_no));
        }
        label_str = strip(label_str);
        if (label_str == "0" || label_str == "SZ" || label_str == "sz") {
            e.label = ClassLabel::SZ;
        } else if (label_str == "1" || label_str == "HC" || label_str == "hc") {
            e.label = ClassLabel::HC;
        } else {
            throw_data(csv_path + ": unknown label '" + label_str + "' on line " +
                       std::to_string(line_no));
        }
        if (!seen.insert(e.subject_id).second) {
            throw_data(csv_path + ": duplicate subject_id '" + e.subject_id + "'");
        }
        (e.label == ClassLabel::SZ ? m.count_sz : m.count_hc)++;
        m.entries.push_back(std::move(e));
    }
    return m;
}

void save_manifest(const DatasetManifest& manifest, const std::string& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw_data("cannot write manifest: " + csv_path);
    out << "path,subject_id,label\n";
    for (const auto& e : manifest.entries) {
        out << e.path << ',' << e.subject_id << ',' << static_cast<int>(e.label) << '\n';
    }
}

std::vector<EegRecording> load_dataset(const DatasetManifest& manifest) {
    std::vector<EegRecording> recs;
    recs.reserve(manifest.entries.size());
    for (const auto& e : manifest.entries) {
        recs.push_back(load_subject(e.path, e.subject_id, e.label));
    }
    return recs;
}

std::vector<EegRecording> synth_dataset(size_t n_per_class, uint64_t seed) {
    std::vector<EegRecording> recs;
    recs.reserve(2 * n_per_class);
    for (size_t i = 0; i < n_per_class; ++i) {
        auto sz = synth_subject(ClassLabel::SZ, seed + i);
        sz.subject_id = "sz_" + std::to_string(i);
        recs.push_back(std::move(sz));
        auto hc = synth_subject(ClassLabel::HC, seed + i);
        hc.subject_id = "hc_" + std::to_string(i);
        recs.push_back(std::move(hc));
    }
    return recs;
}

} // namespace eegsz
