#pragma once

#include <cstddef>
#include <vector>

#include "core/matrix.hpp"

namespace eegsz {

/// Analytic bump-wavelet filter bank with geometrically spaced scales.
/// Scale a maps to frequency f = mu * fs / (2*pi*a); consecutive scales
/// differ by a factor of 2^(1/voices).
struct CwtFilterBank {
    double mu = 5.0;
    double sigma = 0.6;
    int voices_per_octave = 12;
    double f_min_hz = 0.5;
    double f_max_hz = 50.0;
    double fs = 128.0;
    std::vector<double> scales;         // ascending (highest frequency first)
    std::vector<double> frequencies_hz; // strictly decreasing, parallel to scales
};

/// CWT magnitudes. Row r corresponds to bank.frequencies_hz[r]
/// (descending frequency), columns to sample times.
struct Scalogram {
    Matrix magnitudes;                  // [n_scales x n_samples]
    std::vector<double> frequencies_hz;
    std::vector<double> times_s;
};

CwtFilterBank build_filterbank(double f_min_hz, double f_max_hz, int voices, double fs,
                               double mu = 5.0, double sigma = 0.6);

/// Frequency-domain evaluation: for each scale the signal spectrum is
/// multiplied by the bump window at a*omega and inverse transformed; the
/// modulus of the analytic result is kept.
Scalogram cwt(const std::vector<double>& signal, const CwtFilterBank& bank);

void save_tf_csv(const Matrix& magnitudes, const std::vector<double>& frequencies_hz,
                 const std::vector<double>& times_s, const std::string& path);

} // namespace eegsz
