#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace msfno {

enum class Dtype { Real, Complex };

/// Dense row-major f64 tensor. Complex tensors store interleaved
/// (re, im) pairs, so data.size() == 2 * numel() for Dtype::Complex.
struct Tensor {
    std::vector<std::size_t> shape;
    Dtype dtype = Dtype::Real;
    std::vector<double> data;

    Tensor() = default;

    static Tensor zeros(std::vector<std::size_t> shape, Dtype dtype = Dtype::Real);
    static Tensor scalar(double value);
    static Tensor from_vector(const std::vector<double>& values);

    std::size_t numel() const;
    bool is_scalar() const { return numel() == 1 && dtype == Dtype::Real; }
    bool same_shape(const Tensor& other) const {
        return shape == other.shape && dtype == other.dtype;
    }

    double re(std::size_t i) const { return data[dtype == Dtype::Complex ? 2 * i : i]; }
    double im(std::size_t i) const { return dtype == Dtype::Complex ? data[2 * i + 1] : 0.0; }
};

std::string shape_to_string(const std::vector<std::size_t>& shape);

}  // namespace msfno
