#include "msfno/model.hpp"

#include "msfno/errors.hpp"

namespace msfno {

const FnoConfig& Model::config() const {
    if (is_mscale()) return std::get<MscaleParams>(params).config;
    return std::get<FnoParams>(params).config;
}

std::vector<ParamSection> Model::sections() {
    return std::visit([](auto& p) { return p.sections(); }, params);
}

std::vector<ParamSection> Model::sections() const {
    return std::visit([](const auto& p) { return p.sections(); }, params);
}

std::size_t Model::param_count() const {
    return std::visit([](const auto& p) { return p.param_count(); }, params);
}

Tensor Model::apply(const Tensor& x, const Tensor& a) const {
    if (is_mscale()) return mscale_apply(std::get<MscaleParams>(params), x, a);
    return fno_apply(std::get<FnoParams>(params), x, a);
}

ModelForward model_forward(Graph& g, const Model& model, NodeId x, NodeId a) {
    ModelForward fwd;
    if (model.is_mscale()) {
        const auto& p = std::get<MscaleParams>(model.params);
        MscaleLeaves leaves = insert_leaves(g, p);
        fwd.leaf_ids = leaves.ordered();
        fwd.output = mscale_forward(g, p, leaves, x, a);
    } else {
        const auto& p = std::get<FnoParams>(model.params);
        FnoLeaves leaves = insert_leaves(g, p);
        fwd.leaf_ids = leaves.ids;
        fwd.output = fno_forward(g, p.config, leaves, x, a);
    }
    return fwd;
}

std::vector<double> flatten_params(const Model& model) {
    std::vector<double> flat;
    for (const auto& s : model.sections())
        flat.insert(flat.end(), s.tensor->data.begin(), s.tensor->data.end());
    return flat;
}

void unflatten_params(Model& model, const std::vector<double>& flat) {
    std::size_t off = 0;
    for (auto& s : model.sections()) {
        if (off + s.tensor->data.size() > flat.size())
            throw data_error("unflatten_params: flat vector too short");
        std::copy(flat.begin() + off, flat.begin() + off + s.tensor->data.size(),
                  s.tensor->data.begin());
        off += s.tensor->data.size();
    }
    if (off != flat.size()) throw data_error("unflatten_params: flat vector size mismatch");
}

}  // namespace msfno
