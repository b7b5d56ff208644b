#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msfno/graph.hpp"
#include "msfno/tensor.hpp"

namespace msfno {

enum class Activation { Sine, Gelu };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct FnoConfig {
    std::size_t d = 1;    // spatial input dimension
    std::size_t d_a = 1;  // input-function channels
    std::size_t d_u = 1;  // output channels
    std::size_t d_v = 32; // lifted channel width
    std::size_t k_max = 16;
    std::size_t T = 1;    // number of Fourier layers
    Activation activation = Activation::Gelu;

    void validate() const;
};

/// Exact trainable-parameter count; each complex entry of R_t counts once.
std::size_t count_parameters(const FnoConfig& config);

/// One named trainable array. `tensor` points into the owning parameter
/// struct; enumeration order is fixed so checkpoints round-trip exactly.
struct ParamSection {
    std::string name;
    Tensor* tensor;
};

struct FnoParams {
    FnoConfig config;

    Tensor lift_ax;  // [d, d_v]
    Tensor lift_aa;  // [d_a, d_v]
    Tensor lift_b;   // [d_v]

    struct Layer {
        Tensor w;   // [d_v, d_v]
        Tensor b;   // [d_v]
        Tensor r;   // complex [k_max, d_v, d_v]
        Tensor a1;  // [d_v, d_v]
        Tensor b1;  // [d_v]
        Tensor a2;  // [d_v, d_v]
        Tensor b2;  // [d_v]
    };
    std::vector<Layer> layers;

    Tensor proj_am;  // [d_v, 2 d_v]
    Tensor proj_bm;  // [2 d_v]
    Tensor proj_aq;  // [2 d_v, d_u]
    Tensor proj_bq;  // [d_u]

    /// Stable flat enumeration (lift, layer 1..T, projection).
    std::vector<ParamSection> sections();
    std::vector<ParamSection> sections() const;
    /// Logical parameter count of the enumeration (complex entries once).
    std::size_t param_count() const;
};

/// Fresh parameters: affine weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)],
/// R entries with real/imag uniform in [-1/d_v, 1/d_v], biases zero.
FnoParams init_params(const FnoConfig& config, std::uint64_t seed);

/// Graph-side handles for one set of FNO parameters, aligned with sections().
struct FnoLeaves {
    std::vector<NodeId> ids;
};

FnoLeaves insert_leaves(Graph& g, const FnoParams& params);

/// Full forward pass: lift, T Fourier layers (local path + MLP-wrapped
/// spectral path, shared activation), two-layer GELU projection.
/// x: [n, d] grid coordinates, a: [n, d_a] input-function values.
NodeId fno_forward(Graph& g, const FnoConfig& config, const FnoLeaves& leaves, NodeId x,
                   NodeId a);

/// Evaluation-only forward (builds and discards a local graph).
Tensor fno_apply(const FnoParams& params, const Tensor& x, const Tensor& a);

}  // namespace msfno
