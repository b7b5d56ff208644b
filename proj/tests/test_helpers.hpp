#pragma once

// Shared test utilities: naive DFT oracle and finite-difference helpers.
// Everything here is intentionally independent of the library's FFT and
// autodiff paths (direct O(n^2) sums, explicit loops).

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "msfno/rng.hpp"

namespace testutil {

/// Direct O(n^2) DFT sum: modes[k] = sum_j x[j] e^{-2 pi i k j / n}.
inline std::vector<std::complex<double>> naive_dft(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> modes(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double theta = -2.0 * std::numbers::pi * static_cast<double>(k) *
                                 static_cast<double>(j) / static_cast<double>(n);
            s += x[j] * std::complex<double>(std::cos(theta), std::sin(theta));
        }
        modes[k] = s;
    }
    return modes;
}

/// Best k_max-mode trigonometric reconstruction from naive DFT modes
/// (Hermitian completion, 1/n inverse normalization).
inline std::vector<double> naive_truncated_inverse(const std::vector<std::complex<double>>& modes,
                                                   std::size_t n, std::size_t k_max) {
    std::vector<double> out(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double s = modes[0].real();
        for (std::size_t k = 1; k < k_max; ++k) {
            const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) *
                                 static_cast<double>(j) / static_cast<double>(n);
            const bool nyquist = (n % 2 == 0) && (k == n / 2);
            const double w = nyquist ? 1.0 : 2.0;
            s += w * (modes[k].real() * std::cos(theta) -
                      (nyquist ? 0.0 : modes[k].imag()) * std::sin(theta));
        }
        out[j] = s / static_cast<double>(n);
    }
    return out;
}

/// Central finite difference of a scalar function of one flat parameter.
inline double central_diff(const std::function<double()>& f, double& param, double step = 1e-5) {
    const double saved = param;
    param = saved + step;
    const double up = f();
    param = saved - step;
    const double down = f();
    param = saved;
    return (up - down) / (2.0 * step);
}

inline std::vector<double> random_vector(std::size_t n, msfno::SplitMix64& rng, double lo = -1.0,
                                         double hi = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

}  // namespace testutil
