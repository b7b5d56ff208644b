#pragma once

#include <string>
#include <variant>

#include "msfno/fno.hpp"
#include "msfno/mscale.hpp"

namespace msfno {

/// A trainable operator: either a single FNO or an MscaleFNO. Gives the
/// optimizer, checkpoint I/O, and CLI one surface for both.
struct Model {
    std::variant<FnoParams, MscaleParams> params;

    static Model make_fno(FnoParams p) { return Model{std::move(p)}; }
    static Model make_mscale(MscaleParams p) { return Model{std::move(p)}; }

    bool is_mscale() const { return std::holds_alternative<MscaleParams>(params); }
    std::string kind_name() const { return is_mscale() ? "mscale-fno" : "normal-fno"; }

    const FnoConfig& config() const;
    std::vector<ParamSection> sections();
    std::vector<ParamSection> sections() const;
    std::size_t param_count() const;

    Tensor apply(const Tensor& x, const Tensor& a) const;
};

struct ModelForward {
    std::vector<NodeId> leaf_ids;  // aligned with Model::sections()
    NodeId output;
};

ModelForward model_forward(Graph& g, const Model& model, NodeId x, NodeId a);

/// Copy all parameter values into / out of one flat f64 vector (complex
/// entries contribute two values). Order follows sections().
std::vector<double> flatten_params(const Model& model);
void unflatten_params(Model& model, const std::vector<double>& flat);

}  // namespace msfno
