#include "core/fft.hpp"

#include <cmath>

#include "core/error.hpp"

namespace eegsz {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft_inplace(std::vector<cdouble>& x, bool inverse) {
    const size_t n = x.size();
    if (!is_pow2(n)) {
        throw_config("fft: length " + std::to_string(n) + " is not a power of two");
    }
    if (n <= 1) return;

    // bit-reversal permutation
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }

    // one table of exact twiddles; stages index it with a stride
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<cdouble> tw(n / 2);
    for (size_t k = 0; k < n / 2; ++k) {
        const double ang = sign * 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
        tw[k] = cdouble(std::cos(ang), std::sin(ang));
    }

    for (size_t len = 2; len <= n; len <<= 1) {
        const size_t half = len >> 1;
        const size_t stride = n / len;
        for (size_t i = 0; i < n; i += len) {
            for (size_t k = 0; k < half; ++k) {
                const cdouble w = tw[k * stride];
                const cdouble u = x[i + k];
                const cdouble v = x[i + k + half] * w;
                x[i + k] = u + v;
                x[i + k + half] = u - v;
            }
        }
    }

    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& v : x) v *= inv;
    }
}

std::vector<cdouble> fft(const std::vector<cdouble>& x) {
    std::vector<cdouble> y = x;
    fft_inplace(y, false);
    return y;
}

std::vector<cdouble> ifft(const std::vector<cdouble>& x) {
    std::vector<cdouble> y = x;
    fft_inplace(y, true);
    return y;
}

std::vector<cdouble> fft_real(const std::vector<double>& x) {
    std::vector<cdouble> y(x.size());
    for (size_t i = 0; i < x.size(); ++i) y[i] = cdouble(x[i], 0.0);
    fft_inplace(y, false);
    return y;
}

} // namespace eegsz
