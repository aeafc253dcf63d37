#include "core/cwt.hpp"

#include <cmath>
#include <fstream>

#include "core/error.hpp"
#include "core/fft.hpp"

namespace eegsz {

namespace {
constexpr double kPi = 3.14159265358979323846;

// compactly supported frequency window: exp(1 - 1/(1 - u^2)) for |u| < 1
inline double bump_window(double a_omega, double mu, double sigma) {
    const double u = (a_omega - mu) / sigma;
    if (std::abs(u) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
}
} // namespace

CwtFilterBank build_filterbank(double f_min_hz, double f_max_hz, int voices, double fs,
                               double mu, double sigma) {
    if (f_min_hz <= 0.0) throw_config("cwt filterbank: f_min must be positive");
    if (f_max_hz <= f_min_hz) throw_config("cwt filterbank: f_max must exceed f_min");
    if (f_max_hz > fs / 2.0) {
        throw_config("cwt filterbank: f_max " + std::to_string(f_max_hz) +
                     " Hz exceeds the Nyquist frequency " + std::to_string(fs / 2.0) + " Hz");
    }
    if (voices < 1) throw_config("cwt filterbank: voices must be >= 1");
    if (sigma <= 0.0 || mu <= 0.0) throw_config("cwt filterbank: mu and sigma must be positive");

    CwtFilterBank bank;
    bank.mu = mu;
    bank.sigma = sigma;
    bank.voices_per_octave = voices;
    bank.f_min_hz = f_min_hz;
    bank.f_max_hz = f_max_hz;
    bank.fs = fs;

    const int n_scales = static_cast<int>(std::floor(
        static_cast<double>(voices) * std::log2(f_max_hz / f_min_hz))) + 1;
    const double a0 = mu * fs / (2.0 * kPi * f_max_hz);  // smallest scale
    const double ratio = std::pow(2.0, 1.0 / static_cast<double>(voices));
    bank.scales.resize(static_cast<size_t>(n_scales));
    bank.frequencies_hz.resize(static_cast<size_t>(n_scales));
    for (int k = 0; k < n_scales; ++k) {
        const double a = a0 * std::pow(ratio, static_cast<double>(k));
        bank.scales[static_cast<size_t>(k)] = a;
        bank.frequencies_hz[static_cast<size_t>(k)] = mu * fs / (2.0 * kPi * a);
    }
    return bank;
}

Scalogram cwt(const std::vector<double>& signal, const CwtFilterBank& bank) {
    const size_t n = signal.size();
    if (n < 2) throw_config("cwt: signal must have at least 2 samples");
    for (double v : signal) {
        if (!std::isfinite(v)) throw_data("cwt: input contains non-finite values");
    }

    const size_t nfft = next_pow2(n);
    std::vector<cdouble> spectrum(nfft, cdouble(0.0, 0.0));
    for (size_t i = 0; i < n; ++i) spectrum[i] = cdouble(signal[i], 0.0);
    fft_inplace(spectrum, false);

    const size_t n_scales = bank.scales.size();
    Scalogram scal;
    scal.magnitudes = Matrix(n_scales, n);
    scal.frequencies_hz = bank.frequencies_hz;
    scal.times_s.resize(n);
    for (size_t i = 0; i < n; ++i) scal.times_s[i] = static_cast<double>(i) / bank.fs;

    std::vector<cdouble> buf(nfft);
    for (size_t s = 0; s < n_scales; ++s) {
        const double a = bank.scales[s];
        // analytic wavelet: window only over the nonnegative half of the spectrum
        for (size_t j = 0; j <= nfft / 2; ++j) {
            const double omega = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(nfft);
            buf[j] = spectrum[j] * bump_window(a * omega, bank.mu, bank.sigma);
        }
        for (size_t j = nfft / 2 + 1; j < nfft; ++j) buf[j] = cdouble(0.0, 0.0);
        fft_inplace(buf, true);
        double* row = scal.magnitudes.row(s);
        for (size_t i = 0; i < n; ++i) row[i] = std::abs(buf[i]);
    }
    return scal;
}

void save_tf_csv(const Matrix& magnitudes, const std::vector<double>& frequencies_hz,
                 const std::vector<double>& times_s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw_data("cannot write csv: " + path);
    out.precision(17);
    out << "freq_hz";
    for (double t : times_s) out << ',' << t;
    out << '\n';
    for (size_t r = 0; r < magnitudes.rows(); ++r) {
        out << frequencies_hz[r];
        const double* row = magnitudes.row(r);
        for (size_t c = 0; c < magnitudes.cols(); ++c) out << ',' << row[c];
        out << '\n';
    }
}

} // namespace eegsz
