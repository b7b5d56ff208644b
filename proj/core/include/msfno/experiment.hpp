#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msfno/io.hpp"
#include "msfno/model.hpp"
#include "msfno/training.hpp"

namespace msfno {

/// One experiment: model architecture, training knobs, dataset, output dir.
/// Parsed from a flat sectioned key-value file; round-trips losslessly
/// through serialize()/parse_experiment_config().
struct ExperimentConfig {
    std::string model_kind = "normal-fno";  // or "mscale-fno"
    FnoConfig fno;
    std::size_t branches = 1;             // mscale only
    std::vector<double> initial_scales;   // mscale only, length == branches
    TrainConfig train;
    std::string dataset_prefix;
    std::string output_dir;

    void validate() const;
    std::string serialize() const;
};

ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

/// FNV-1a over the canonical serialization; identifies a config in manifests.
std::string config_hash(const ExperimentConfig& cfg);

/// Fresh model per the config; init seed derived from the training seed.
Model build_model(const ExperimentConfig& cfg);

/// Per-block parameter counts (lift / layers / projection, plus branch and
/// scale/weight blocks for mscale). Sums to the total.
struct CountBreakdown {
    std::vector<std::pair<std::string, std::size_t>> blocks;
    std::size_t total = 0;
};
CountBreakdown count_breakdown(const ExperimentConfig& cfg);

/// Train per config: writes best/final checkpoints, metrics.csv, and a run
/// manifest into output_dir. Returns the training result.
TrainResult run_training(const ExperimentConfig& cfg);

struct EvalSummary {
    double mean = 0.0, median = 0.0, max = 0.0;
    std::vector<double> per_sample;
};

EvalSummary run_eval(const Model& model, const BuiltDataset& ds, const std::string& split);

/// Mode-magnitude report for one sample: target, prediction, and optionally
/// one column per mscale branch contribution.
SpectrumReport build_spectrum_report(const Model& model, const BuiltDataset& ds,
                                     std::size_t sample_index, bool with_branches);

}  // namespace msfno
