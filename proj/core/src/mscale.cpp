#include "msfno/mscale.hpp"

#include "msfno/errors.hpp"
#include "msfno/rng.hpp"

namespace msfno {

std::size_t mscale_count(const FnoConfig& config, std::size_t n_branches) {
    if (n_branches < 1) throw config_error("mscale_count: need at least one branch");
    return n_branches * count_parameters(config) + 2 * n_branches;
}

namespace {

template <typename Params>
std::vector<ParamSection> enumerate_sections(Params& p) {
    std::vector<ParamSection> out;
    for (std::size_t i = 0; i < p.branches.size(); ++i) {
        const std::string prefix = "branch" + std::to_string(i) + ".";
        for (auto& s : p.branches[i].sections()) out.push_back({prefix + s.name, s.tensor});
    }
    out.push_back({"scales", &p.scales});
    out.push_back({"weights", &p.weights});
    return out;
}

}  // namespace

std::vector<ParamSection> MscaleParams::sections() { return enumerate_sections(*this); }

std::vector<ParamSection> MscaleParams::sections() const {
    return enumerate_sections(const_cast<MscaleParams&>(*this));
}

std::size_t MscaleParams::param_count() const {
    std::size_t n = 0;
    for (const auto& s : sections()) n += s.tensor->numel();
    return n;
}

MscaleParams init_mscale(const FnoConfig& config, std::size_t n_branches,
                         const std::vector<double>& initial_scales, std::uint64_t seed) {
    if (n_branches < 1) throw config_error("init_mscale: need at least one branch");
    if (initial_scales.size() != n_branches)
        throw config_error("init_mscale: got " + std::to_string(initial_scales.size()) +
                           " initial scales for " + std::to_string(n_branches) + " branches");
    MscaleParams p;
    p.config = config;
    for (std::size_t i = 0; i < n_branches; ++i)
        p.branches.push_back(init_params(config, derive_seed(seed, i)));
    p.scales = Tensor::from_vector(initial_scales);
    p.weights = Tensor::zeros({n_branches});
    for (double& w : p.weights.data) w = 1.0 / static_cast<double>(n_branches);
    return p;
}

std::vector<NodeId> MscaleLeaves::ordered() const {
    std::vector<NodeId> out;
    for (const auto& b : branches) out.insert(out.end(), b.ids.begin(), b.ids.end());
    out.push_back(scales);
    out.push_back(weights);
    return out;
}

MscaleLeaves insert_leaves(Graph& g, const MscaleParams& params) {
    MscaleLeaves leaves;
    for (const auto& b : params.branches) leaves.branches.push_back(insert_leaves(g, b));
    leaves.scales = g.leaf(params.scales);
    leaves.weights = g.leaf(params.weights);
    return leaves;
}

NodeId mscale_forward(Graph& g, const MscaleParams& params, const MscaleLeaves& leaves,
                      NodeId x, NodeId a) {
    NodeId out = -1;
    for (std::size_t i = 0; i < params.branches.size(); ++i) {
        NodeId ci = g.index_scalar(leaves.scales, i);
        NodeId gi = g.index_scalar(leaves.weights, i);
        NodeId branch_out =
            fno_forward(g, params.config, leaves.branches[i], g.mul(x, ci), g.mul(a, ci));
        NodeId contrib = g.mul(branch_out, gi);
        out = (out < 0) ? contrib : g.add(out, contrib);
    }
    return out;
}

Tensor mscale_apply(const MscaleParams& params, const Tensor& x, const Tensor& a) {
    Graph g;
    MscaleLeaves leaves = insert_leaves(g, params);
    NodeId out = mscale_forward(g, params, leaves, g.constant(x), g.constant(a));
    return g.value(out);
}

std::vector<Tensor> branch_contributions(const MscaleParams& params, const Tensor& x,
                                         const Tensor& a) {
    std::vector<Tensor> out;
    for (std::size_t i = 0; i < params.branches.size(); ++i) {
        const double ci = params.scales.data[i];
        const double gi = params.weights.data[i];
        Tensor sx = x;
        for (double& v : sx.data) v *= ci;
        Tensor sa = a;
        for (double& v : sa.data) v *= ci;
        Tensor branch = fno_apply(params.branches[i], sx, sa);
        for (double& v : branch.data) v *= gi;
        out.push_back(std::move(branch));
    }
    return out;
}

}  // namespace msfno
