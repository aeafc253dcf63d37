#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <vector>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "core/wavelet.hpp"
#include "doctest.h"

using namespace eegsz;

namespace {

double energy(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return acc;
}

double decomposition_energy(const DwtDecomposition& d) {
    double acc = energy(d.approx);
    for (const auto& det : d.details) acc += energy(det);
    return acc;
}

std::vector<double> random_signal(size_t n, uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    return x;
}

} // namespace

TEST_CASE("filter invariants: unit norm and quadrature mirror") {
    for (const char* name : {"haar", "db2", "db4", "db8"}) {
        const auto f = WaveletFilter::create(name);
        CHECK(f.dec_lo.size() == f.dec_hi.size());
        CHECK(f.dec_lo.size() % 2 == 0);
        CHECK(energy(f.dec_lo) == doctest::Approx(1.0).epsilon(1e-10));
        const size_t L = f.length();
        for (size_t k = 0; k < L; ++k) {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            CHECK(f.dec_hi[k] == doctest::Approx(sign * f.dec_lo[L - 1 - k]).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(WaveletFilter::create("sym5"), Error);
}

TEST_CASE("filter tables load from a text file") {
    const char* path = "test_wavelet_taps.txt";
    {
        std::ofstream out(path);
        out << "haarcopy 0.70710678118654746 0.70710678118654746\n";
    }
    const auto f = WaveletFilter::from_file(path);
    CHECK(f.name == "haarcopy");
    CHECK(f.dec_lo.size() == 2);
    std::remove(path);
}

TEST_CASE("zero vector decomposes to zero coefficients") {
    const auto f = WaveletFilter::create("db4");
    const auto d = dwt_decompose(std::vector<double>(256, 0.0), f, 4);
    CHECK(energy(d.approx) == 0.0);
    for (const auto& det : d.details) CHECK(energy(det) == 0.0);
}

TEST_CASE("haar on [1,1] gives a=[sqrt2], d=[0]") {
    const auto f = WaveletFilter::create("haar");
    const auto d = dwt_decompose({1.0, 1.0}, f, 1);
    REQUIRE(d.approx.size() == 1);
    REQUIRE(d.details[0].size() == 1);
    CHECK(d.approx[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(d.details[0][0] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("db4 energy conservation on random signals") {
    const auto f = WaveletFilter::create("db4");
    for (uint64_t seed = 0; seed < 10; ++seed) {
        const auto x = random_signal(1024, seed);
        const auto d = dwt_decompose(x, f, 4);
        const double ex = energy(x);
        CHECK(std::abs(ex - decomposition_energy(d)) / ex < 1e-8);
    }
}

TEST_CASE("perfect reconstruction, multiple filters and lengths") {
    for (const char* name : {"haar", "db2", "db4"}) {
        const auto f = WaveletFilter::create(name);
        for (uint64_t seed = 0; seed < 5; ++seed) {
            const auto x = random_signal(64 + 97 * seed, 100 + seed);
            const auto d = dwt_decompose(x, f, 3);
            const auto xr = dwt_reconstruct(d, f);
            REQUIRE(xr.size() == x.size());
            for (size_t i = 0; i < x.size(); ++i) {
                CHECK(std::abs(xr[i] - x[i]) < 1e-8);
            }
        }
    }
}

TEST_CASE("symmetric boundary mode also reconstructs perfectly") {
    const auto f = WaveletFilter::create("db4");
    const auto x = random_signal(512, 9);
    const auto d = dwt_decompose(x, f, 4, DwtBoundary::Symmetric);
    const auto xr = dwt_reconstruct(d, f);
    for (size_t i = 0; i < x.size(); ++i) CHECK(std::abs(xr[i] - x[i]) < 1e-8);
}

TEST_CASE("linearity of the transform") {
    const auto f = WaveletFilter::create("db4");
    const auto x = random_signal(300, 1);
    const auto y = random_signal(300, 2);
    std::vector<double> mix(300);
    for (size_t i = 0; i < 300; ++i) mix[i] = 1.5 * x[i] - 0.25 * y[i];

    const auto dx = dwt_decompose(x, f, 3);
    const auto dy = dwt_decompose(y, f, 3);
    const auto dm = dwt_decompose(mix, f, 3);
    for (size_t i = 0; i < dm.approx.size(); ++i) {
        CHECK(dm.approx[i] ==
              doctest::Approx(1.5 * dx.approx[i] - 0.25 * dy.approx[i]).epsilon(1e-9));
    }
    for (int lvl = 0; lvl < 3; ++lvl) {
        for (size_t i = 0; i < dm.details[lvl].size(); ++i) {
            CHECK(dm.details[lvl][i] ==
                  doctest::Approx(1.5 * dx.details[lvl][i] - 0.25 * dy.details[lvl][i])
                      .epsilon(1e-9));
        }
    }
}

TEST_CASE("zero decomposition reconstructs to the zero vector") {
    const auto f = WaveletFilter::create("db4");
    auto d = dwt_decompose(random_signal(256, 4), f, 3);
    std::fill(d.approx.begin(), d.approx.end(), 0.0);
    for (auto& det : d.details) std::fill(det.begin(), det.end(), 0.0);
    const auto xr = dwt_reconstruct(d, f);
    CHECK(energy(xr) == 0.0);
}

TEST_CASE("approximation-only reconstruction is a lower-energy lowpass") {
    const auto f = WaveletFilter::create("db4");
    const auto x = random_signal(1024, 12);
    auto d = dwt_decompose(x, f, 4);
    for (auto& det : d.details) std::fill(det.begin(), det.end(), 0.0);
    const auto lowpass = dwt_reconstruct(d, f);
    CHECK(energy(lowpass) <= energy(x));
    CHECK(energy(lowpass) > 0.0);
}

TEST_CASE("depth and size preconditions") {
    const auto f = WaveletFilter::create("db4");
    CHECK_THROWS_AS(dwt_decompose(random_signal(64, 0), f, 12), Error);
    CHECK_THROWS_AS(dwt_decompose(std::vector<double>(4, 1.0), f, 1), Error);
    CHECK_THROWS_AS(dwt_decompose(random_signal(64, 0), f, 0), Error);
}

TEST_CASE("pure tones land in their clinical bands") {
    const auto f = WaveletFilter::create("db4");
    const double fs = 128.0;
    const size_t n = 1024;
    // tone frequency -> expected dominant band index (delta..gamma = 0..4)
    const std::pair<double, int> cases[] = {
        {2.0, 0}, {6.0, 1}, {10.0, 2}, {20.0, 3}, {40.0, 4}};
    for (const auto& [tone, expected] : cases) {
        std::vector<double> x(n);
        for (size_t i = 0; i < n; ++i) {
            x[i] = std::sin(2.0 * M_PI * tone * static_cast<double>(i) / fs);
        }
        const auto bands = band_signals(x, f);
        int argmax = 0;
        double best = -1.0;
        for (int b = 0; b < 5; ++b) {
            const double e = energy(bands.band(b));
            if (e > best) {
                best = e;
                argmax = b;
            }
        }
        CHECK(argmax == expected);
    }
}

TEST_CASE("bands sum back to the input signal") {
    const auto x = random_signal(1024, 77);
    const auto bands = band_signals(x, WaveletFilter::create("db4"));
    for (size_t i = 0; i < x.size(); ++i) {
        const double sum = bands.delta[i] + bands.theta[i] + bands.alpha[i] +
                           bands.beta[i] + bands.gamma[i];
        CHECK(std::abs(sum - x[i]) < 1e-6);
    }
}

TEST_CASE("zero signal produces five zero bands") {
    const auto bands = band_signals(std::vector<double>(512, 0.0),
                                    WaveletFilter::create("db4"));
    for (int b = 0; b < 5; ++b) CHECK(energy(bands.band(b)) == 0.0);
}

TEST_CASE("band csv export") {
    const auto bands = band_signals(random_signal(512, 3), WaveletFilter::create("db4"));
    const char* path = "test_bands.csv";
    save_band_csv(bands, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "delta,theta,alpha,beta,gamma");
    size_t rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 512);
    std::remove(path);
}
