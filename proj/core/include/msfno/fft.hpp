#pragma once

#include <complex>
#include <cstddef>

namespace msfno::fft {

/// Unnormalized forward complex DFT, in place: X[k] = sum_j x[j] e^{-2*pi*i*k*j/n}.
/// Handles any n >= 1 (mixed radix / prime sizes included).
void forward(std::complex<double>* buf, std::size_t n);

/// Unnormalized inverse complex DFT, in place: x[j] = sum_k X[k] e^{+2*pi*i*k*j/n}.
/// No 1/n factor; callers apply their own normalization.
void inverse_unnormalized(std::complex<double>* buf, std::size_t n);

}  // namespace msfno::fft
