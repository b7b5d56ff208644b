#include "msfno/tensor.hpp"

#include <sstream>

namespace msfno {

Tensor Tensor::zeros(std::vector<std::size_t> shape, Dtype dtype) {
    Tensor t;
    t.shape = std::move(shape);
    t.dtype = dtype;
    std::size_t n = 1;
    for (std::size_t s : t.shape) n *= s;
    t.data.assign(dtype == Dtype::Complex ? 2 * n : n, 0.0);
    return t;
}

Tensor Tensor::scalar(double value) {
    Tensor t;
    t.shape = {1};
    t.data = {value};
    return t;
}

Tensor Tensor::from_vector(const std::vector<double>& values) {
    Tensor t;
    t.shape = {values.size()};
    t.data = values;
    return t;
}

std::size_t Tensor::numel() const {
    std::size_t n = 1;
    for (std::size_t s : shape) n *= s;
    return n;
}

std::string shape_to_string(const std::vector<std::size_t>& shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ", ";
        os << shape[i];
    }
    os << "]";
    return os.str();
}

}  // namespace msfno
