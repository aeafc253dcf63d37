#pragma once

#include <string>
#include <vector>

namespace eegsz {

enum class DwtBoundary {
    Zero,       // zero extension; orthogonal filters conserve energy exactly
    Symmetric,  // half-point reflection; avoids edge discontinuities
};

/// Two-channel analysis/synthesis filter pair. Orthogonal families are
/// derived from the scaling (lowpass) taps via the quadrature mirror
/// relation g[k] = (-1)^k h[L-1-k]; synthesis filters are time reversals.
struct WaveletFilter {
    std::string name;
    std::vector<double> dec_lo;
    std::vector<double> dec_hi;
    std::vector<double> rec_lo;
    std::vector<double> rec_hi;

    size_t length() const { return dec_lo.size(); }

    /// Builtin families: "haar", "db2", "db4", "db8".
    static WaveletFilter create(const std::string& name);

    /// One filter per file: first token is the name, the rest are lowpass taps.
    static WaveletFilter from_file(const std::string& path);

    static WaveletFilter from_lowpass(const std::string& name, std::vector<double> lowpass);
};

struct DwtDecomposition {
    int levels = 0;
    size_t original_length = 0;
    std::vector<double> approx;                // a_L
    std::vector<std::vector<double>> details;  // d_1 (finest) .. d_L (coarsest)
    DwtBoundary boundary = DwtBoundary::Zero;
};

/// Clinical EEG bands reconstructed from single subbands of a 5-level
/// decomposition at fs = 128 Hz. Each signal has the input's length and
/// the five sum back to the input.
struct BandSet {
    std::vector<double> delta;  // a5 + d5 (0-4 Hz nominal)
    std::vector<double> theta;  // d4 (4-8)
    std::vector<double> alpha;  // d3 (8-16)
    std::vector<double> beta;   // d2 (16-32)
    std::vector<double> gamma;  // d1 (32-64)

    const std::vector<double>& band(int i) const;
    static const char* band_name(int i);
};

std::pair<std::vector<double>, std::vector<double>>
dwt_single(const std::vector<double>& x, const WaveletFilter& f, DwtBoundary boundary);

std::vector<double> idwt_single(const std::vector<double>& approx,
                                const std::vector<double>& detail,
                                size_t out_length, const WaveletFilter& f);

DwtDecomposition dwt_decompose(const std::vector<double>& signal, const WaveletFilter& f,
                               int levels, DwtBoundary boundary = DwtBoundary::Zero);

std::vector<double> dwt_reconstruct(const DwtDecomposition& d, const WaveletFilter& f);

int max_dwt_levels(size_t signal_length, size_t filter_length);

BandSet band_signals(const std::vector<double>& signal, const WaveletFilter& f,
                     DwtBoundary boundary = DwtBoundary::Zero);

void save_band_csv(const BandSet& bands, const std::string& path);

} // namespace eegsz
