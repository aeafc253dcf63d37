#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace eegsz {

using cdouble = std::complex<double>;

size_t next_pow2(size_t n);
bool is_pow2(size_t n);

/// In-place radix-2 FFT. Length must be a power of two.
/// Forward: X[k] = sum_n x[n] e^(-2*pi*i*k*n/N). Inverse applies the 1/N factor.
void fft_inplace(std::vector<cdouble>& x, bool inverse = false);

std::vector<cdouble> fft(const std::vector<cdouble>& x);
std::vector<cdouble> ifft(const std::vector<cdouble>& x);
std::vector<cdouble> fft_real(const std::vector<double>& x);

} // namespace eegsz
