#pragma once

#include <cstdint>
#include <vector>

#include "msfno/fno.hpp"

namespace msfno {

/// N parallel FNO branches with trainable input scales c_i (applied to both
/// the grid and the input function) combined by trainable weights gamma_i:
///   u(x) = sum_i gamma_i * FNO_i(c_i * x, c_i * a(x))
struct MscaleParams {
    FnoConfig config;                // shared by all branches
    std::vector<FnoParams> branches;
    Tensor scales;   // [N], trainable c_i
    Tensor weights;  // [N], trainable gamma_i

    std::size_t num_branches() const { return branches.size(); }
    /// Branch sections (prefixed branch{i}.) followed by "scales", "weights".
    std::vector<ParamSection> sections();
    std::vector<ParamSection> sections() const;
    std::size_t param_count() const;
};

/// N * count_parameters(config) + 2N
std::size_t mscale_count(const FnoConfig& config, std::size_t n_branches);

/// Branches get independent derived seeds; gamma_i start at 1/N.
MscaleParams init_mscale(const FnoConfig& config, std::size_t n_branches,
                         const std::vector<double>& initial_scales, std::uint64_t seed);

struct MscaleLeaves {
    std::vector<FnoLeaves> branches;
    NodeId scales;
    NodeId weights;
    /// Flat view aligned with MscaleParams::sections().
    std::vector<NodeId> ordered() const;
};

MscaleLeaves insert_leaves(Graph& g, const MscaleParams& params);

NodeId mscale_forward(Graph& g, const MscaleParams& params, const MscaleLeaves& leaves,
                      NodeId x, NodeId a);

Tensor mscale_apply(const MscaleParams& params, const Tensor& x, const Tensor& a);

/// Per-branch terms gamma_i * FNO_i(c_i x, c_i a); they sum to the forward output.
std::vector<Tensor> branch_contributions(const MscaleParams& params, const Tensor& x,
                                         const Tensor& a);

}  // namespace msfno
