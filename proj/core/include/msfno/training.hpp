#pragma once

#include <cstdint>
#include <vector>

#include "msfno/datagen.hpp"
#include "msfno/model.hpp"

namespace msfno {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct TrainConfig {
    double learning_rate = 0.001;
    std::size_t batch_size = 20;
    std::size_t epochs = 0;
    std::uint64_t seed = 0;
    AdamConfig adam;

    void validate() const;
};

/// First/second moment estimates over the flat f64 parameter vector
/// (complex parameters are two independent reals to the optimizer).
struct AdamState {
    std::vector<double> m, v;
    std::uint64_t t = 0;

    explicit AdamState(std::size_t n_flat) : m(n_flat, 0.0), v(n_flat, 0.0) {}
};

/// One bias-corrected Adam update in place. Throws numeric_error on a
/// non-finite gradient, naming the offending parameter section.
void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state,
               const TrainConfig& cfg, const std::vector<ParamSection>& sections);

/// Discrete relative L2 error: ||pred - target||_2 / ||target||_2.
double relative_l2(const Tensor& pred, const Tensor& target);

/// Graph-side relative L2 against a constant target (for training losses).
NodeId relative_l2_node(Graph& g, NodeId pred, const Tensor& target);

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_err = 0.0;
    double test_err = 0.0;
    double seconds = 0.0;  // wall time of the epoch
};

struct TrainResult {
    Model final_model;
    Model best_model;  // lowest validation error seen
    std::size_t best_epoch = 0;
    double best_val_err = 0.0;
    std::vector<EpochRecord> records;
};

/// Epoch loop: seeded shuffle of the train split, batches of
/// cfg.batch_size, loss = mean per-sample relative L2 over the batch, one
/// Adam step per batch; validation and test errors after every epoch.
/// (seed, data, config) fully determine the result.
TrainResult train(Model model, const SampleSet& data, const TrainConfig& cfg);

/// Mean per-sample relative error of a model over a split.
double evaluate_split(const Model& model, const SampleSet& data,
                      const std::vector<std::size_t>& indices);

/// Grid tensor [n, 1] from a SampleSet grid.
Tensor grid_tensor(const std::vector<double>& grid);
/// Column tensor [n, 1] from a flat sample.
Tensor column_tensor(const Tensor& flat);

}  // namespace msfno
