#pragma once

#include <complex>
#include <vector>

namespace sqz::fft {

// Forward real-to-complex DFT (FFTW convention, e^{-i..}), unnormalized.
// Returns n/2+1 bins.
std::vector<std::complex<double>> r2c(const std::vector<double> &in);

// Inverse complex(half-spectrum)-to-real DFT, unnormalized (scale by 1/n for
// a round trip). n is the real output length; in must hold n/2+1 bins.
std::vector<double> c2r(const std::vector<std::complex<double>> &in, size_t n);

} // namespace sqz::fft
