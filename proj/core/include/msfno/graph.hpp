#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "msfno/tensor.hpp"

namespace msfno {

using NodeId = std::int32_t;

/// Define-by-run reverse-mode autodiff tape over dense f64 tensors.
///
/// Nodes are appended in construction order, which is therefore a valid
/// topological order; backward() walks the tape in reverse exactly once.
/// Complex tensors are differentiated in the real-view convention: the
/// stored gradient holds the partials of the (real) loss with respect to
/// the real and imaginary parts independently.
class Graph {
public:
    /// Leaf that participates in differentiation (parameters).
    NodeId leaf(Tensor value);
    /// Leaf that never receives a gradient (inputs, targets).
    NodeId constant(Tensor value);

    const Tensor& value(NodeId id) const { return nodes_[id].value; }
    /// Gradient of the last backward() w.r.t. node `id` (zeros if untouched).
    const Tensor& grad(NodeId id);

    // Elementwise ops (real tensors; shapes must match exactly, or one
    // operand of add/sub/mul may be a real scalar).
    NodeId add(NodeId a, NodeId b);
    NodeId sub(NodeId a, NodeId b);
    NodeId mul(NodeId a, NodeId b);
    NodeId scale(NodeId a, double s);
    NodeId sin_(NodeId a);
    NodeId gelu(NodeId a);

    /// y[j,o] = sum_i x[j,i] * w[i,o]     (x: [n,d_in], w: [d_in,d_out])
    NodeId matmul(NodeId x, NodeId w);
    /// y[j,o] = x[j,o] + b[o]             (row-broadcast bias)
    NodeId bias_add(NodeId x, NodeId b);
    /// matmul + bias_add
    NodeId affine(NodeId x, NodeId w, NodeId b);

    /// Scalar sum of all entries (real input).
    NodeId sum(NodeId a);
    /// Elementwise sqrt (real, positive entries).
    NodeId sqrt_(NodeId a);
    /// Extract entry i of a real vector as a scalar node.
    NodeId index_scalar(NodeId v, std::size_t i);

    // Spectral ops (see spectral.cpp). Spectra are complex [k_max, d_v]
    // tensors holding the k_max lowest nonnegative-frequency DFT modes of
    // each channel; negative frequencies are implied by Hermitian symmetry.

    /// Unnormalized truncated real-input DFT of x: [n, d_v] -> complex [k_max, d_v].
    NodeId rdft(NodeId x, std::size_t k_max);
    /// Per-mode channel mixing: out[k,l] = sum_i r[k,l,i] * spec[k,i],
    /// r complex [k_max, d_v, d_v].
    NodeId spectral_mix(NodeId spec, NodeId r);
    /// Inverse DFT with 1/n normalization onto an n-point grid; modes
    /// beyond k_max are zero and Hermitian symmetry is enforced, so the
    /// result is real [n, d_v].
    NodeId irdft(NodeId spec, std::size_t n);

    /// Reverse pass from a real scalar loss node. Intermediate gradients
    /// persist on the tape, so call zero_grad() before reusing it.
    void backward(NodeId loss);
    void zero_grad();

    std::size_t size() const { return nodes_.size(); }

private:
    struct Node {
        Tensor value;
        Tensor grad;  // lazily allocated
        bool needs_grad = false;
        std::function<void(Graph&)> back;  // empty for leaves/constants
    };

    NodeId push(Tensor value, bool needs_grad, std::function<void(Graph&)> back);
    Tensor& grad_buffer(NodeId id);
    bool has_grad(NodeId id) const { return !nodes_[id].grad.data.empty(); }

    std::vector<Node> nodes_;

    friend struct GraphOps;
};

}  // namespace msfno
