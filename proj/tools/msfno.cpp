// msfno: data generation, training, evaluation, and spectral diagnostics
// for (multi-scale) Fourier neural operators.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "msfno/errors.hpp"
#include "msfno/experiment.hpp"

using namespace msfno;

namespace {

int cmd_gen(const std::string& preset_name, std::uint64_t seed, const std::string& out_dir,
            const PresetOptions& opts) {
    DatasetPreset preset = make_preset(preset_name, opts);
    BuiltDataset ds = build_dataset(preset, seed);
    std::filesystem::create_directories(out_dir);
    const std::string prefix = out_dir + "/dataset";
    write_dataset(prefix, ds);
    std::cout << "preset " << preset.name << ": " << ds.samples.sample_count()
              << " samples on a " << ds.samples.grid_size() << "-point grid (train/val/test = "
              << ds.samples.train_idx.size() << "/" << ds.samples.val_idx.size() << "/"
              << ds.samples.test_idx.size() << ")\n";
    std::cout << "wrote " << prefix << ".json and " << prefix << ".bin\n";
    return 0;
}

int cmd_train(const std::string& config_path) {
    ExperimentConfig cfg = load_experiment_config(config_path);
    Model probe = build_model(cfg);
    std::cout << "model " << cfg.model_kind << " with " << probe.param_count()
              << " parameters\n";
    TrainResult result = run_training(cfg);
    for (const auto& r : result.records)
        std::printf("epoch %4zu  train %.6e  val %.6e  test %.6e  (%.1fs)\n", r.epoch,
                    r.train_loss, r.val_err, r.test_err, r.seconds);
    std::cout << "best validation error " << result.best_val_err << " at epoch "
              << result.best_epoch << "\n";
    std::cout << "artifacts in " << cfg.output_dir << "\n";
    return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& data, const std::string& split,
             const std::string& per_sample_csv) {
    Model model = read_checkpoint(checkpoint);
    BuiltDataset ds = read_dataset(data);
    EvalSummary s = run_eval(model, ds, split);
    std::printf("split %s: mean %.6e  median %.6e  max %.6e  (%zu samples)\n", split.c_str(),
                s.mean, s.median, s.max, s.per_sample.size());
    if (!per_sample_csv.empty()) {
        std::string text = "sample,relative_l2\n";
        for (std::size_t i = 0; i < s.per_sample.size(); ++i)
            text += std::to_string(i) + "," + format_double(s.per_sample[i]) + "\n";
        std::ofstream out(per_sample_csv);
        if (!out) throw data_error("cannot write " + per_sample_csv);
        out << text;
        std::cout << "per-sample errors in " << per_sample_csv << "\n";
    }
    return 0;
}

int cmd_spectrum(const std::string& checkpoint, const std::string& data, std::size_t sample,
                 bool with_branches, const std::string& out_path) {
    Model model = read_checkpoint(checkpoint);
    BuiltDataset ds = read_dataset(data);
    SpectrumReport report = build_spectrum_report(model, ds, sample, with_branches);
    write_spectrum_csv(out_path, report);
    std::cout << "wrote " << report.columns.size() << " columns x " << report.values[0].size()
              << " modes to " << out_path << "\n";
    return 0;
}

int cmd_count(const std::string& config_path) {
    ExperimentConfig cfg = load_experiment_config(config_path);
    CountBreakdown breakdown = count_breakdown(cfg);
    for (const auto& [name, n] : breakdown.blocks)
        std::cout << "  " << name << ": " << n << "\n";
    std::cout << "total: " << breakdown.total << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fourier neural operator experiments (normal FNO and MscaleFNO)"};
    app.require_subcommand(1);

    // gen
    std::string preset, out_dir;
    std::uint64_t seed = 0;
    std::size_t opt_m = 0, opt_grid = 0, opt_nmax = 0;
    std::size_t opt_train = 0, opt_val = 0, opt_test = 0;
    double opt_l = 0.0;
    auto* gen = app.add_subcommand("gen", "generate a dataset from an experiment preset");
    gen->add_option("--preset", preset, "preset name (ex4.1, ex4.2, ex4.3, ex4.4, ex4.5)")
        ->required();
    gen->add_option("--seed", seed, "dataset seed");
    gen->add_option("--out", out_dir, "output directory")->required();
    gen->add_option("--M", opt_m, "frequency-term count (ex4.2)");
    gen->add_option("--L", opt_l, "domain half-length (ex4.4/ex4.5)");
    gen->add_option("--grid", opt_grid, "override training grid size");
    gen->add_option("--n-max", opt_nmax, "override input-series order");
    gen->add_option("--train", opt_train, "override train sample count");
    gen->add_option("--val", opt_val, "override validation sample count");
    gen->add_option("--test", opt_test, "override test sample count");

    // train / count
    std::string config_path;
    auto* train_cmd = app.add_subcommand("train", "train a model from a config file");
    train_cmd->add_option("config", config_path, "experiment config (ini)")->required();
    auto* count = app.add_subcommand("count", "print the exact trainable-parameter count");
    count->add_option("config", config_path, "experiment config (ini)")->required();

    // eval
    std::string checkpoint, data, split = "test", per_sample_csv;
    auto* eval_cmd = app.add_subcommand("eval", "relative-L2 error summary on a dataset split");
    eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint prefix")->required();
    eval_cmd->add_option("--data", data, "dataset prefix")->required();
    eval_cmd->add_option("--split", split, "train|val|test");
    eval_cmd->add_option("--per-sample", per_sample_csv, "write per-sample errors to CSV");

    // spectrum
    std::size_t sample = 0;
    bool with_branches = false;
    std::string spectrum_out;
    auto* spectrum = app.add_subcommand("spectrum", "DFT magnitudes of target and prediction");
    spectrum->add_option("--checkpoint", checkpoint, "checkpoint prefix")->required();
    spectrum->add_option("--data", data, "dataset prefix")->required();
    spectrum->add_option("--sample", sample, "sample index");
    spectrum->add_flag("--with-branches", with_branches, "add one column per mscale branch");
    spectrum->add_option("--out", spectrum_out, "output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            PresetOptions opts;
            if (gen->count("--M")) opts.M = opt_m;
            if (gen->count("--L")) opts.L = opt_l;
            if (gen->count("--grid")) opts.grid_n = opt_grid;
            if (gen->count("--n-max")) opts.n_max = opt_nmax;
            if (gen->count("--train")) opts.n_train = opt_train;
            if (gen->count("--val")) opts.n_val = opt_val;
            if (gen->count("--test")) opts.n_test = opt_test;
            return cmd_gen(preset, seed, out_dir, opts);
        }
        if (train_cmd->parsed()) return cmd_train(config_path);
        if (count->parsed()) return cmd_count(config_path);
        if (eval_cmd->parsed()) return cmd_eval(checkpoint, data, split, per_sample_csv);
        if (spectrum->parsed())
            return cmd_spectrum(checkpoint, data, sample, with_branches, spectrum_out);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const numeric_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
