#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "core/dataset.hpp"
#include "core/error.hpp"
#include "core/fft.hpp"
#include "doctest.h"

using namespace eegsz;

namespace {

void write_values(const std::string& path, size_t count, double base = 0.0, double step = 0.0) {
    std::ofstream out(path);
    out.precision(17);
    for (size_t i = 0; i < count; ++i) {
        out << (base + step * static_cast<double>(i));
        out << ((i % 8 == 7) ? '\n' : ' ');
    }
}

// independent periodogram band power over [lo, hi) Hz
double band_power(const double* x, size_t n, double fs, double lo, double hi) {
    std::vector<cdouble> buf(next_pow2(n), cdouble(0, 0));
    for (size_t i = 0; i < n; ++i) buf[i] = cdouble(x[i], 0.0);
    fft_inplace(buf, false);
    double acc = 0.0;
    const size_t nfft = buf.size();
    for (size_t k = 0; k <= nfft / 2; ++k) {
        const double f = static_cast<double>(k) * fs / static_cast<double>(nfft);
        if (f >= lo && f < hi) acc += std::norm(buf[k]);
    }
    return acc;
}

double slow_fast_ratio(const EegRecording& rec) {
    double slow = 0.0, alpha = 0.0;
    for (size_t ch = 0; ch < rec.data.rows(); ++ch) {
        slow += band_power(rec.data.row(ch), rec.data.cols(), rec.fs, 0.5, 8.0);
        alpha += band_power(rec.data.row(ch), rec.data.cols(), rec.fs, 8.0, 13.0);
    }
    return slow / alpha;
}

} // namespace

TEST_CASE("load_subject reshapes channel-major") {
    const char* path = "test_subject_idx.txt";
    write_values(path, 122880, 0.0, 1.0);  // token i has value i
    const auto rec = load_subject(path, "s1", ClassLabel::SZ);
    CHECK(rec.data.rows() == 16);
    CHECK(rec.data.cols() == 7680);
    CHECK(rec.data(0, 0) == 0.0);
    CHECK(rec.data(1, 0) == 7680.0);  // channel 1, sample 0
    CHECK(rec.data(15, 7679) == 122879.0);
    CHECK(rec.subject_id == "s1");
    CHECK(rec.fs == 128.0);
    std::remove(path);
}

TEST_CASE("load_subject accepts an all-zero file") {
    const char* path = "test_subject_zero.txt";
    write_values(path, 122880);
    const auto rec = load_subject(path, "z", ClassLabel::HC);
    for (double v : rec.data.data()) CHECK(v == 0.0);
    std::remove(path);
}

TEST_CASE("load_subject rejects short, long, and non-numeric files") {
    write_values("test_short.txt", 122879);
    CHECK_THROWS_AS(load_subject("test_short.txt", "s", ClassLabel::SZ), Error);
    std::remove("test_short.txt");

    write_values("test_long.txt", 122881);
    CHECK_THROWS_AS(load_subject("test_long.txt", "s", ClassLabel::SZ), Error);
    std::remove("test_long.txt");

    {
        std::ofstream out("test_bad.txt");
        out << "1.0 2.0\nbogus 4.0\n";
    }
    try {
        load_subject("test_bad.txt", "s", ClassLabel::SZ);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Data);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    std::remove("test_bad.txt");

    CHECK_THROWS_AS(load_subject("no_such_file.txt", "s", ClassLabel::SZ), Error);
}

TEST_CASE("save/load round trip is exact") {
    const auto rec = synth_subject(ClassLabel::SZ, 5);
    save_recording(rec, "test_roundtrip.txt");
    const auto back = load_subject("test_roundtrip.txt", rec.subject_id, rec.label);
    CHECK(back.data == rec.data);
    std::remove("test_roundtrip.txt");
}

TEST_CASE("zscore normalization yields zero mean unit variance per channel") {
    const auto rec = synth_subject(ClassLabel::HC, 3);
    const auto normed = normalize(rec, NormalizeMode::ZScorePerChannel);
    for (size_t ch = 0; ch < normed.data.rows(); ++ch) {
        double mean = 0.0, var = 0.0;
        const double* row = normed.data.row(ch);
        const double n = static_cast<double>(normed.data.cols());
        for (size_t i = 0; i < normed.data.cols(); ++i) mean += row[i];
        mean /= n;
        for (size_t i = 0; i < normed.data.cols(); ++i) var += (row[i] - mean) * (row[i] - mean);
        var /= n;
        CHECK(std::abs(mean) < 1e-9);
        CHECK(std::abs(var - 1.0) < 1e-6);
    }
}

TEST_CASE("zscore is idempotent") {
    const auto rec = synth_subject(ClassLabel::SZ, 11);
    const auto once = normalize(rec, NormalizeMode::ZScorePerChannel);
    const auto twice = normalize(once, NormalizeMode::ZScorePerChannel);
    for (size_t i = 0; i < once.data.size(); ++i) {
        CHECK(std::abs(once.data.data()[i] - twice.data.data()[i]) < 1e-9);
    }
}

TEST_CASE("minmax maps channels into [0,1]") {
    const auto rec = synth_subject(ClassLabel::SZ, 2);
    const auto normed = normalize(rec, NormalizeMode::MinMaxPerChannel);
    for (double v : normed.data.data()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("constant channel raises a degenerate-channel error naming it") {
    EegRecording rec;
    rec.subject_id = "flat";
    rec.data = Matrix(kChannels, kSamplesPerChannel, 0.0);
    for (size_t ch = 0; ch < kChannels; ++ch) {
        for (size_t i = 0; i < kSamplesPerChannel; ++i) {
            rec.data(ch, i) = (ch == 7) ? 5.0 : std::sin(static_cast<double>(i));
        }
    }
    try {
        normalize(rec, NormalizeMode::ZScorePerChannel);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Data);
        CHECK(std::string(e.what()).find("7") != std::string::npos);
    }
}

TEST_CASE("segment counts follow the hop formula") {
    const auto rec = synth_subject(ClassLabel::HC, 1);

    auto full = segment(rec, 7680, 7680);
    CHECK(full.size() == 16);

    auto tiled = segment(rec, 512, 512);
    CHECK(tiled.size() == 15 * 16);

    auto hopped = segment(rec, 256, 128);
    CHECK(hopped.size() == 59 * 16);
    CHECK(hopped[0].samples.size() == 256);
    CHECK(hopped[0].label == rec.label);

    CHECK_THROWS_AS(segment(rec, 8000, 512), Error);
    CHECK_THROWS_AS(segment(rec, 512, 0), Error);
}

TEST_CASE("concatenating hop=window segments reconstructs channel prefixes") {
    const auto rec = synth_subject(ClassLabel::SZ, 21);
    const size_t window = 512;
    const auto segs = segment(rec, window, window);
    for (const auto& s : segs) {
        const double* row = rec.data.row(s.channel);
        for (size_t i = 0; i < window; ++i) {
            CHECK(s.samples[i] == row[s.window_index * window + i]);
        }
    }
}

TEST_CASE("synthetic subjects are deterministic and finite") {
    const auto a = synth_subject(ClassLabel::SZ, 42);
    const auto b = synth_subject(ClassLabel::SZ, 42);
    CHECK(a.data == b.data);
    CHECK(a.data.rows() == 16);
    CHECK(a.data.cols() == 7680);
    for (double v : a.data.data()) CHECK(std::isfinite(v));

    const auto c = synth_subject(ClassLabel::SZ, 43);
    CHECK(!(a.data == c.data));
}

TEST_CASE("class band-power separation holds for 20 seeds") {
    // SZ must show a strictly larger slow/alpha power ratio than HC
    int wins = 0;
    for (uint64_t seed = 0; seed < 20; ++seed) {
        const auto sz = synth_subject(ClassLabel::SZ, seed);
        const auto hc = synth_subject(ClassLabel::HC, seed);
        if (slow_fast_ratio(sz) > slow_fast_ratio(hc)) ++wins;
    }
    CHECK(wins >= 19);
}

TEST_CASE("manifest round trip, duplicate detection, and label parsing") {
    DatasetManifest m;
    m.entries.push_back({"a.txt", "s1", ClassLabel::SZ});
    m.entries.push_back({"b.txt", "s2", ClassLabel::HC});
    save_manifest(m, "test_manifest.csv");

    const auto back = load_manifest("test_manifest.csv");
    REQUIRE(back.entries.size() == 2);
    CHECK(back.entries[0].subject_id == "s1");
    CHECK(back.entries[0].label == ClassLabel::SZ);
    CHECK(back.entries[1].label == ClassLabel::HC);
    CHECK(back.count_sz == 1);
    CHECK(back.count_hc == 1);
    std::remove("test_manifest.csv");

    {
        std::ofstream out("test_dup.csv");
        out << "path,subject_id,label\na.txt,s1,0\nb.txt,s1,1\n";
    }
    CHECK_THROWS_AS(load_manifest("test_dup.csv"), Error);
    std::remove("test_dup.csv");

    {
        std::ofstream out("test_hdr.csv");
        out << "file,id,y\na.txt,s1,0\n";
    }
    CHECK_THROWS_AS(load_manifest("test_hdr.csv"), Error);
    std::remove("test_hdr.csv");
}

TEST_CASE("synth_dataset produces balanced unique subjects") {
    const auto recs = synth_dataset(5, 7);
    CHECK(recs.size() == 10);
    std::set<std::string> ids;
    size_t sz = 0;
    for (const auto& r : recs) {
        ids.insert(r.subject_id);
        if (r.label == ClassLabel::SZ) ++sz;
    }
    CHECK(ids.size() == 10);
    CHECK(sz == 5);
}
