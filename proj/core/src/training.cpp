#include "msfno/training.hpp"

#include <chrono>
#include <cmath>

#include "msfno/errors.hpp"
#include "msfno/rng.hpp"

namespace msfno {

void TrainConfig::validate() const {
    if (batch_size < 1) throw config_error("TrainConfig: batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw config_error("TrainConfig: learning_rate must be > 0");
}

void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state,
               const TrainConfig& cfg, const std::vector<ParamSection>& sections) {
    if (params.size() != grads.size() || state.m.size() != params.size())
        throw config_error("adam_step: parameter/gradient/state size mismatch");
    for (std::size_t i = 0; i < grads.size(); ++i) {
        if (std::isfinite(grads[i])) continue;
        // Locate the section for the error message.
        std::size_t off = 0;
        std::string where = "<unknown>";
        for (const auto& s : sections) {
            if (i < off + s.tensor->data.size()) {
                where = s.name;
                break;
            }
            off += s.tensor->data.size();
        }
        throw numeric_error("adam_step: non-finite gradient in section '" + where + "'");
    }
    state.t += 1;
    const double b1 = cfg.adam.beta1, b2 = cfg.adam.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * grads[i];
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam.eps);
    }
}

double relative_l2(const Tensor& pred, const Tensor& target) {
    if (pred.data.size() != target.data.size())
        throw config_error("relative_l2: shape mismatch " + shape_to_string(pred.shape) +
                           " vs " + shape_to_string(target.shape));
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const double d = pred.data[i] - target.data[i];
        num += d * d;
        den += target.data[i] * target.data[i];
    }
    if (den == 0.0) throw numeric_error("relative_l2: target has zero norm (degenerate sample)");
    return std::sqrt(num) / std::sqrt(den);
}

NodeId relative_l2_node(Graph& g, NodeId pred, const Tensor& target) {
    double den = 0.0;
    for (double v : target.data) den += v * v;
    if (den == 0.0) throw numeric_error("relative_l2: target has zero norm (degenerate sample)");
    NodeId diff = g.sub(pred, g.constant(target));
    NodeId norm = g.sqrt_(g.sum(g.mul(diff, diff)));
    return g.scale(norm, 1.0 / std::sqrt(den));
}

Tensor grid_tensor(const std::vector<double>& grid) {
    Tensor t;
    t.shape = {grid.size(), 1};
    t.data = grid;
    return t;
}

Tensor column_tensor(const Tensor& flat) {
    Tensor t = flat;
    t.shape = {flat.numel(), 1};
    return t;
}

double evaluate_split(const Model& model, const SampleSet& data,
                      const std::vector<std::size_t>& indices) {
    if (indices.empty()) return 0.0;
    const Tensor x = grid_tensor(data.grid);
    double sum = 0.0;
    for (std::size_t idx : indices) {
        Tensor pred = model.apply(x, column_tensor(data.inputs[idx]));
        sum += relative_l2(pred, column_tensor(data.targets[idx]));
    }
    return sum / static_cast<double>(indices.size());
}

TrainResult train(Model model, const SampleSet& data, const TrainConfig& cfg) {
    cfg.validate();
    if (cfg.epochs > 0 && data.train_idx.empty())
        throw data_error("train: dataset has an empty train split");

    TrainResult result;
    result.final_model = model;
    result.best_model = model;
    result.best_val_err = INFINITY;
    if (cfg.epochs == 0) return result;

    Model& live = result.final_model;
    const Tensor x = grid_tensor(data.grid);
    std::vector<double> flat = flatten_params(live);
    AdamState state(flat.size());
    const auto sections = live.sections();

    std::vector<std::size_t> order = data.train_idx;
    std::vector<double> batch_grads(flat.size());

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();

        // Seeded Fisher-Yates shuffle, re-derived per epoch.
        SplitMix64 shuffle_rng(derive_seed(cfg.seed, epoch));
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(shuffle_rng.next() % i);
            std::swap(order[i - 1], order[j]);
        }

        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, order.size());
            const double inv_batch = 1.0 / static_cast<double>(end - start);
            std::fill(batch_grads.begin(), batch_grads.end(), 0.0);

            for (std::size_t s = start; s < end; ++s) {
                const std::size_t idx = order[s];
                Graph g;
                NodeId xn = g.constant(x);
                NodeId an = g.constant(column_tensor(data.inputs[idx]));
                ModelForward fwd = model_forward(g, live, xn, an);
                NodeId loss = relative_l2_node(g, fwd.output, column_tensor(data.targets[idx]));
                loss_sum += g.value(loss).data[0];
                g.backward(loss);
                // Gradients reduced in fixed sample order: deterministic.
                std::size_t off = 0;
                for (NodeId leaf : fwd.leaf_ids) {
                    const Tensor& gl = g.grad(leaf);
                    for (std::size_t i = 0; i < gl.data.size(); ++i)
                        batch_grads[off + i] += inv_batch * gl.data[i];
                    off += gl.data.size();
                }
            }
            adam_step(flat, batch_grads, state, cfg, sections);
            unflatten_params(live, flat);
        }

        EpochRecord rec;
        rec.epoch = epoch + 1;  // 1-based in records and CSVs
        rec.train_loss = loss_sum / static_cast<double>(order.size());
        rec.val_err = evaluate_split(live, data, data.val_idx);
        rec.test_err = evaluate_split(live, data, data.test_idx);
        rec.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.records.push_back(rec);

        if (rec.val_err < result.best_val_err) {
            result.best_val_err = rec.val_err;
            result.best_epoch = epoch + 1;
            result.best_model = live;
        }
    }
    return result;
}

}  // namespace msfno
