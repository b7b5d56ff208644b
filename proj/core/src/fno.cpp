#include "msfno/fno.hpp"

#include <cmath>

#include "msfno/errors.hpp"
#include "msfno/rng.hpp"

namespace msfno {

std::string activation_name(Activation a) { return a == Activation::Sine ? "sine" : "gelu"; }

Activation activation_from_name(const std::string& name) {
    if (name == "sine") return Activation::Sine;
    if (name == "gelu") return Activation::Gelu;
    throw config_error("unknown activation '" + name + "' (expected sine or gelu)");
}

void FnoConfig::validate() const {
    if (d < 1 || d_a < 1 || d_u < 1 || d_v < 1 || k_max < 1 || T < 1)
        throw config_error("FnoConfig: all dimensions must be >= 1");
}

std::size_t count_parameters(const FnoConfig& c) {
    c.validate();
    const std::size_t dv2 = c.d_v * c.d_v;
    return (c.d + c.d_a + 1) * c.d_v + c.T * ((c.k_max + 3) * dv2 + 3 * c.d_v) +
           (2 * dv2 + (2 * c.d_u + 2) * c.d_v + c.d_u);
}

namespace {

template <typename Params, typename Section>
std::vector<Section> enumerate_sections(Params& p) {
    std::vector<Section> out;
    out.push_back({"lift.a_x", &p.lift_ax});
    out.push_back({"lift.a_a", &p.lift_aa});
    out.push_back({"lift.b", &p.lift_b});
    for (std::size_t t = 0; t < p.layers.size(); ++t) {
        auto& l = p.layers[t];
        const std::string prefix = "layer" + std::to_string(t) + ".";
        out.push_back({prefix + "w", &l.w});
        out.push_back({prefix + "b", &l.b});
        out.push_back({prefix + "r", &l.r});
        out.push_back({prefix + "mlp.a1", &l.a1});
        out.push_back({prefix + "mlp.b1", &l.b1});
        out.push_back({prefix + "mlp.a2", &l.a2});
        out.push_back({prefix + "mlp.b2", &l.b2});
    }
    out.push_back({"proj.a_m", &p.proj_am});
    out.push_back({"proj.b_m", &p.proj_bm});
    out.push_back({"proj.a_q", &p.proj_aq});
    out.push_back({"proj.b_q", &p.proj_bq});
    return out;
}

}  // namespace

std::vector<ParamSection> FnoParams::sections() {
    return enumerate_sections<FnoParams, ParamSection>(*this);
}

std::vector<ParamSection> FnoParams::sections() const {
    // Read-only callers still get mutable Tensor pointers; the enumeration
    // itself is what must stay stable.
    return enumerate_sections<FnoParams, ParamSection>(const_cast<FnoParams&>(*this));
}

std::size_t FnoParams::param_count() const {
    std::size_t n = 0;
    for (const auto& s : sections()) n += s.tensor->numel();
    return n;
}

FnoParams init_params(const FnoConfig& config, std::uint64_t seed) {
    config.validate();
    FnoParams p;
    p.config = config;
    const std::size_t dv = config.d_v;

    p.lift_ax = Tensor::zeros({config.d, dv});
    p.lift_aa = Tensor::zeros({config.d_a, dv});
    p.lift_b = Tensor::zeros({dv});
    p.layers.resize(config.T);
    for (auto& l : p.layers) {
        l.w = Tensor::zeros({dv, dv});
        l.b = Tensor::zeros({dv});
        l.r = Tensor::zeros({config.k_max, dv, dv}, Dtype::Complex);
        l.a1 = Tensor::zeros({dv, dv});
        l.b1 = Tensor::zeros({dv});
        l.a2 = Tensor::zeros({dv, dv});
        l.b2 = Tensor::zeros({dv});
    }
    p.proj_am = Tensor::zeros({dv, 2 * dv});
    p.proj_bm = Tensor::zeros({2 * dv});
    p.proj_aq = Tensor::zeros({2 * dv, config.d_u});
    p.proj_bq = Tensor::zeros({config.d_u});

    SplitMix64 rng(seed);
    for (auto& s : p.sections()) {
        Tensor& t = *s.tensor;
        if (t.dtype == Dtype::Complex) {
            const double bound = 1.0 / static_cast<double>(dv);
            for (double& v : t.data) v = rng.uniform(-bound, bound);
        } else if (t.shape.size() == 2) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(t.shape[0]));
            for (double& v : t.data) v = rng.uniform(-bound, bound);
        }
        // biases (rank-1 real tensors) stay zero
    }
    return p;
}

FnoLeaves insert_leaves(Graph& g, const FnoParams& params) {
    FnoLeaves leaves;
    for (const auto& s : params.sections()) leaves.ids.push_back(g.leaf(*s.tensor));
    return leaves;
}

namespace {

// Offsets into the sections()/FnoLeaves enumeration.
constexpr std::size_t kLiftAx = 0, kLiftAa = 1, kLiftB = 2;
constexpr std::size_t kLayerStride = 7;
inline std::size_t layer_base(std::size_t t) { return 3 + t * kLayerStride; }
inline std::size_t proj_base(std::size_t T) { return 3 + T * kLayerStride; }

}  // namespace

NodeId fno_forward(Graph& g, const FnoConfig& config, const FnoLeaves& leaves, NodeId x,
                   NodeId a) {
    const Tensor& vx = g.value(x);
    const Tensor& va = g.value(a);
    if (vx.shape.size() != 2 || vx.shape[1] != config.d)
        throw config_error("fno_forward: grid must be [n, " + std::to_string(config.d) +
                           "], got " + shape_to_string(vx.shape));
    if (va.shape.size() != 2 || va.shape[1] != config.d_a || va.shape[0] != vx.shape[0])
        throw config_error("fno_forward: input function must be [" +
                           std::to_string(vx.shape[0]) + ", " + std::to_string(config.d_a) +
                           "], got " + shape_to_string(va.shape));
    const std::size_t n = vx.shape[0];
    if (config.k_max > n / 2 + 1)
        throw config_error("fno_forward: k_max " + std::to_string(config.k_max) +
                           " exceeds floor(n/2)+1 = " + std::to_string(n / 2 + 1));

    const auto& L = leaves.ids;
    auto act = [&](NodeId v) {
        return config.activation == Activation::Sine ? g.sin_(v) : g.gelu(v);
    };

    // v0 = A_p^x x + A_p^a a + b_p
    NodeId v = g.add(g.matmul(x, L[kLiftAx]), g.affine(a, L[kLiftAa], L[kLiftB]));

    for (std::size_t t = 0; t < config.T; ++t) {
        const std::size_t base = layer_base(t);
        NodeId local = g.affine(v, L[base + 0], L[base + 1]);
        NodeId spec = g.rdft(v, config.k_max);
        NodeId mixed = g.spectral_mix(spec, L[base + 2]);
        NodeId conv = g.irdft(mixed, n);
        NodeId hidden = g.gelu(g.affine(conv, L[base + 3], L[base + 4]));
        NodeId mlp = g.affine(hidden, L[base + 5], L[base + 6]);
        v = act(g.add(local, mlp));
    }

    const std::size_t pb = proj_base(config.T);
    NodeId hidden = g.gelu(g.affine(v, L[pb + 0], L[pb + 1]));
    return g.affine(hidden, L[pb + 2], L[pb + 3]);
}

Tensor fno_apply(const FnoParams& params, const Tensor& x, const Tensor& a) {
    Graph g;
    NodeId xn = g.constant(x);
    NodeId an = g.constant(a);
    FnoLeaves leaves;
    for (const auto& s : params.sections()) leaves.ids.push_back(g.constant(*s.tensor));
    NodeId out = fno_forward(g, params.config, leaves, xn, an);
    return g.value(out);
}

}  // namespace msfno
