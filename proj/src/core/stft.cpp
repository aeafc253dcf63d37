#include "core/stft.hpp"

#include <cmath>

#include "core/error.hpp"
#include "core/fft.hpp"

namespace eegsz {

Spectrogram stft(const std::vector<double>& signal, double fs, size_t window,
                 double overlap_fraction, size_t nfft) {
    if (signal.size() < window) {
        throw_config("stft: signal length " + std::to_string(signal.size()) +
                     " shorter than window " + std::to_string(window));
    }
    if (nfft < window || !is_pow2(nfft)) {
        throw_config("stft: nfft must be a power of two >= window");
    }
    if (overlap_fraction < 0.0 || overlap_fraction >= 1.0) {
        throw_config("stft: overlap fraction must be in [0, 1)");
    }
    const size_t hop = static_cast<size_t>(
        std::llround(static_cast<double>(window) * (1.0 - overlap_fraction)));
    if (hop == 0) throw_config("stft: hop collapsed to zero");

    const size_t n_frames = (signal.size() - window) / hop + 1;
    const size_t n_bins = nfft / 2 + 1;

    Spectrogram spec;
    spec.window = window;
    spec.hop = hop;
    spec.nfft = nfft;
    spec.magnitudes = Matrix(n_bins, n_frames);
    spec.frequencies_hz.resize(n_bins);
    spec.times_s.resize(n_frames);
    for (size_t k = 0; k < n_bins; ++k) {
        spec.frequencies_hz[k] = static_cast<double>(k) * fs / static_cast<double>(nfft);
    }

    std::vector<cdouble> frame(nfft);
    for (size_t t = 0; t < n_frames; ++t) {
        const size_t start = t * hop;
        spec.times_s[t] = (static_cast<double>(start) +
                           (static_cast<double>(window) - 1.0) / 2.0) / fs;
        for (size_t i = 0; i < window; ++i) frame[i] = cdouble(signal[start + i], 0.0);
        for (size_t i = window; i < nfft; ++i) frame[i] = cdouble(0.0, 0.0);
        fft_inplace(frame, false);
        for (size_t k = 0; k < n_bins; ++k) {
            spec.magnitudes(k, t) = std::abs(frame[k]);
        }
    }
    return spec;
}

} // namespace eegsz
