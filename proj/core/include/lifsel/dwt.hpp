#pragma once

#include <span>
#include <vector>

namespace lifsel {

//! Periodized orthonormal wavelet coefficients of a length-2^J vector.
//! details[i] holds the 2^(coarse_level + i) detail coefficients of level
//! coarse_level + i.
struct WaveletCoefficients {
    int coarse_level = 0;
    std::vector<double> scaling;
    std::vector<std::vector<double>> details;
};

//! Forward transform with the low-pass filter h and the matching high-pass
//! g_l = (-1)^l h_{L-1-l}; a_k = sum_l h_l x_{(2k+l) mod len}.
WaveletCoefficients periodic_dwt(std::span<const double> x, std::span<const double> filter, int coarse_level);

std::vector<double> inverse_periodic_dwt(const WaveletCoefficients& coeffs, std::span<const double> filter);

} // namespace lifsel
