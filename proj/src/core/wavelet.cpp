#include "core/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace eegsz {

namespace {

// Daubechies scaling (analysis lowpass) taps, increasing index convention.
const std::vector<double> kHaarLo = {
    0.7071067811865476, 0.7071067811865476};

const std::vector<double> kDb2Lo = {
    -0.12940952255092145, 0.22414386804185735,
    0.836516303737469, 0.48296291314469025};

const std::vector<double> kDb4Lo = {
    -0.010597401784997278, 0.032883011666982945,
    0.030841381835986965, -0.18703481171888114,
    -0.02798376941698385, 0.6308807679295904,
    0.7148465705525415, 0.23037781330885523};

const std::vector<double> kDb8Lo = {
    -0.00011747678400228192, 0.0006754494059985568,
    -0.0003917403729959771, -0.00487035299301066,
    0.008746094047015655, 0.013981027917015516,
    -0.04408825393106472, -0.01736930100202211,
    0.128747426620186, 0.00047248457399797254,
    -0.2840155429624281, -0.015829105256023893,
    0.5853546836548691, 0.6756307362980128,
    0.3128715909144659, 0.05441584224308161};

std::vector<double> extend(const std::vector<double>& x, size_t pad, DwtBoundary boundary) {
    const size_t n = x.size();
    std::vector<double> ext(n + 2 * pad, 0.0);
    std::copy(x.begin(), x.end(), ext.begin() + static_cast<std::ptrdiff_t>(pad));
    if (boundary == DwtBoundary::Symmetric) {
        for (size_t i = 0; i < pad; ++i) {
            ext[pad - 1 - i] = x[std::min(i, n - 1)];
            ext[pad + n + i] = x[n - 1 - std::min(i, n - 1)];
        }
    }
    return ext;
}

} // namespace

WaveletFilter WaveletFilter::from_lowpass(const std::string& name, std::vector<double> lowpass) {
    if (lowpass.size() < 2 || lowpass.size() % 2 != 0) {
        throw_config("wavelet '" + name + "': lowpass filter must have even length >= 2");
    }
    WaveletFilter f;
    f.name = name;
    f.dec_lo = std::move(lowpass);
    const size_t L = f.dec_lo.size();
    f.dec_hi.resize(L);
    for (size_t k = 0; k < L; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        f.dec_hi[k] = sign * f.dec_lo[L - 1 - k];
    }
    f.rec_lo.assign(f.dec_lo.rbegin(), f.dec_lo.rend());
    f.rec_hi.assign(f.dec_hi.rbegin(), f.dec_hi.rend());
    return f;
}

WaveletFilter WaveletFilter::create(const std::string& name) {
    if (name == "haar" || name == "db1") return from_lowpass("haar", kHaarLo);
    if (name == "db2") return from_lowpass("db2", kDb2Lo);
    if (name == "db4") return from_lowpass("db4", kDb4Lo);
    if (name == "db8") return from_lowpass("db8", kDb8Lo);
    throw_config("unknown wavelet '" + name + "' (builtin: haar, db2, db4, db8)");
}

WaveletFilter WaveletFilter::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_data("cannot open wavelet file: " + path);
    std::string name;
    in >> name;
    std::vector<double> taps;
    double v;
    while (in >> v) taps.push_back(v);
    if (name.empty() || taps.empty()) throw_data("wavelet file is empty: " + path);
    return from_lowpass(name, std::move(taps));
}

const std::vector<double>& BandSet::band(int i) const {
    switch (i) {
        case 0: return delta;
        case 1: return theta;
        case 2: return alpha;
        case 3: return beta;
        default: return gamma;
    }
}

const char* BandSet::band_name(int i) {
    static const char* names[5] = {"delta", "theta", "alpha", "beta", "gamma"};
    return names[i < 0 ? 0 : (i > 4 ? 4 : i)];
}

int max_dwt_levels(size_t signal_length, size_t filter_length) {
    if (filter_length < 2 || signal_length < filter_length) return 0;
    return static_cast<int>(std::floor(
        std::log2(static_cast<double>(signal_length) / static_cast<double>(filter_length - 1))));
}

std::pair<std::vector<double>, std::vector<double>>
dwt_single(const std::vector<double>& x, const WaveletFilter& f, DwtBoundary boundary) {
    const size_t n = x.size();
    const size_t L = f.length();
    if (n < L) {
        throw_config("dwt: signal length " + std::to_string(n) +
                     " shorter than filter length " + std::to_string(L));
    }
    const std::vector<double> ext = extend(x, L - 1, boundary);
    const size_t out_len = (n + L - 1) / 2;
    std::vector<double> a(out_len, 0.0), d(out_len, 0.0);
    // full convolution downsampled at odd phase: c[k] = sum_j h[j] ext[2k+1 + (L-1) - j]
    for (size_t k = 0; k < out_len; ++k) {
        const size_t base = 2 * k + 1 + (L - 1);
        double sa = 0.0, sd = 0.0;
        for (size_t j = 0; j < L; ++j) {
            const double v = ext[base - j];
            sa += f.dec_lo[j] * v;
            sd += f.dec_hi[j] * v;
        }
        a[k] = sa;
        d[k] = sd;
    }
    return {std::move(a), std::move(d)};
}

std::vector<double> idwt_single(const std::vector<double>& approx,
                                const std::vector<double>& detail,
                                size_t out_length, const WaveletFilter& f) {
    const size_t L = f.length();
    if (approx.size() != detail.size()) {
        throw_config("idwt: approx/detail length mismatch (" + std::to_string(approx.size()) +
                     " vs " + std::to_string(detail.size()) + ")");
    }
    const size_t m = approx.size();
    const size_t expect = (out_length + L - 1) / 2;
    if (m != expect) {
        throw_config("idwt: coefficient length " + std::to_string(m) +
                     " inconsistent with output length " + std::to_string(out_length));
    }
    // upsample by two, convolve with synthesis filters, keep the center
    const size_t full = 2 * m + L - 2;
    std::vector<double> r(full, 0.0);
    for (size_t k = 0; k < m; ++k) {
        const double av = approx[k];
        const double dv = detail[k];
        const size_t base = 2 * k;
        for (size_t j = 0; j < L; ++j) {
            r[base + j] += av * f.rec_lo[j] + dv * f.rec_hi[j];
        }
    }
    std::vector<double> out(out_length);
    for (size_t i = 0; i < out_length; ++i) out[i] = r[L - 2 + i];
    return out;
}

DwtDecomposition dwt_decompose(const std::vector<double>& signal, const WaveletFilter& f,
                               int levels, DwtBoundary boundary) {
    if (levels < 1) throw_config("dwt_decompose: levels must be >= 1");
    const int max_levels = max_dwt_levels(signal.size(), f.length());
    if (levels > max_levels) {
        throw_config("dwt_decompose: " + std::to_string(levels) + " levels requested but only " +
                     std::to_string(max_levels) + " supported for length " +
                     std::to_string(signal.size()) + " with filter " + f.name);
    }
    DwtDecomposition dec;
    dec.levels = levels;
    dec.original_length = signal.size();
    dec.boundary = boundary;
    std::vector<double> cur = signal;
    for (int lvl = 0; lvl < levels; ++lvl) {
        auto [a, d] = dwt_single(cur, f, boundary);
        dec.details.push_back(std::move(d));
        cur = std::move(a);
    }
    dec.approx = std::move(cur);
    return dec;
}

std::vector<double> dwt_reconstruct(const DwtDecomposition& dec, const WaveletFilter& f) {
    if (dec.levels < 1 || dec.details.size() != static_cast<size_t>(dec.levels)) {
        throw_config("dwt_reconstruct: decomposition has inconsistent levels");
    }
    // lengths per level, finest first
    std::vector<size_t> lengths(static_cast<size_t>(dec.levels));
    size_t n = dec.original_length;
    const size_t L = f.length();
    for (int lvl = 0; lvl < dec.levels; ++lvl) {
        lengths[static_cast<size_t>(lvl)] = n;
        n = (n + L - 1) / 2;
    }
    std::vector<double> cur = dec.approx;
    for (int lvl = dec.levels - 1; lvl >= 0; --lvl) {
        cur = idwt_single(cur, dec.details[static_cast<size_t>(lvl)],
                          lengths[static_cast<size_t>(lvl)], f);
    }
    return cur;
}

BandSet band_signals(const std::vector<double>& signal, const WaveletFilter& f,
                     DwtBoundary boundary) {
    constexpr int kLevels = 5;
    if (signal.size() < (1u << kLevels) * f.length()) {
        throw_config("band_signals: signal too short for a 5-level decomposition");
    }
    DwtDecomposition dec = dwt_decompose(signal, f, kLevels, boundary);

    auto single_band = [&](int keep_detail, bool keep_approx) {
        DwtDecomposition part = dec;
        if (!keep_approx) std::fill(part.approx.begin(), part.approx.end(), 0.0);
        for (int lvl = 0; lvl < kLevels; ++lvl) {
            if (lvl != keep_detail) {
                auto& d = part.details[static_cast<size_t>(lvl)];
                std::fill(d.begin(), d.end(), 0.0);
            }
        }
        return dwt_reconstruct(part, f);
    };

    BandSet bands;
    bands.gamma = single_band(0, false);  // d1: 32-64 Hz
    bands.beta = single_band(1, false);   // d2: 16-32
    bands.alpha = single_band(2, false);  // d3: 8-16
    bands.theta = single_band(3, false);  // d4: 4-8
    bands.delta = single_band(4, true);   // a5 + d5: 0-4
    return bands;
}

void save_band_csv(const BandSet& bands, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw_data("cannot write band csv: " + path);
    out << "delta,theta,alpha,beta,gamma\n";
    out.precision(17);
    for (size_t i = 0; i < bands.delta.size(); ++i) {
        out << bands.delta[i] << ',' << bands.theta[i] << ',' << bands.alpha[i] << ','
            << bands.beta[i] << ',' << bands.gamma[i] << '\n';
    }
}

} // namespace eegsz
