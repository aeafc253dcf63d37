#pragma once

#include <cstddef>
#include <vector>

#include "core/matrix.hpp"

namespace eegsz {

/// One-sided STFT magnitudes. Rows are frequency bins in ascending order
/// (row 0 = DC), columns are frames.
struct Spectrogram {
    Matrix magnitudes;                  // [nfft/2+1 x n_frames]
    std::vector<double> frequencies_hz; // per row
    std::vector<double> times_s;        // frame centers, per column
    size_t window = 0;
    size_t hop = 0;
    size_t nfft = 0;
};

/// Rectangular-window STFT; frames are zero-padded to nfft before the FFT.
Spectrogram stft(const std::vector<double>& signal, double fs, size_t window = 256,
                 double overlap_fraction = 0.5, size_t nfft = 512);

} // namespace eegsz
