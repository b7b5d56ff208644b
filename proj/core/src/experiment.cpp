#include "msfno/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "msfno/errors.hpp"
#include "msfno/rng.hpp"

namespace msfno {

namespace {

constexpr std::uint64_t kInitSeedStream = 0x696e69742d736565ULL;

struct IniEntry {
    std::string value;
    int line = 0;
    bool used = false;
};

using IniSections = std::map<std::string, std::map<std::string, IniEntry>>;

IniSections parse_ini(const std::string& text) {
    IniSections sections;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw config_error("config line " + std::to_string(lineno) +
                                   ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            sections[section];
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        if (key.empty())
            throw config_error("config line " + std::to_string(lineno) + ": empty key");
        sections[section][key] = {trim(t.substr(eq + 1)), lineno, false};
    }
    return sections;
}

class IniReader {
public:
    explicit IniReader(IniSections sections) : sections_(std::move(sections)) {}

    std::optional<std::string> get(const std::string& section, const std::string& key) {
        auto s = sections_.find(section);
        if (s == sections_.end()) return std::nullopt;
        auto k = s->second.find(key);
        if (k == s->second.end()) return std::nullopt;
        k->second.used = true;
        return k->second.value;
    }

    std::string require(const std::string& section, const std::string& key) {
        auto v = get(section, key);
        if (!v) throw config_error("config: missing [" + section + "] " + key);
        return *v;
    }

    template <typename T>
    T number(const std::string& section, const std::string& key, T fallback) {
        auto v = get(section, key);
        if (!v) return fallback;
        std::istringstream is(*v);
        T out;
        is >> out;
        if (is.fail())
            throw config_error("config line " + std::to_string(line(section, key)) +
                               ": cannot parse [" + section + "] " + key + " = '" + *v + "'");
        return out;
    }

    void check_all_used() const {
        for (const auto& [sname, keys] : sections_)
            for (const auto& [kname, entry] : keys)
                if (!entry.used)
                    throw config_error("config line " + std::to_string(entry.line) +
                                       ": unknown key [" + sname + "] " + kname);
    }

private:
    int line(const std::string& section, const std::string& key) const {
        return sections_.at(section).at(key).line;
    }
    IniSections sections_;
};

std::vector<double> parse_scale_list(const std::string& text, int line_hint) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        std::istringstream is(item);
        double v;
        is >> v;
        if (is.fail())
            throw config_error("config line " + std::to_string(line_hint) +
                               ": bad scale entry '" + item + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (model_kind != "normal-fno" && model_kind != "mscale-fno")
        throw config_error("model kind must be normal-fno or mscale-fno, got '" + model_kind +
                           "'");
    fno.validate();
    train.validate();
    if (model_kind == "mscale-fno") {
        if (branches < 1) throw config_error("mscale-fno needs at least one branch");
        if (initial_scales.size() != branches)
            throw config_error("got " + std::to_string(initial_scales.size()) +
                               " scales for " + std::to_string(branches) + " branches");
    }
}

std::string ExperimentConfig::serialize() const {
    std::ostringstream out;
    out << "[model]\n";
    out << "kind = " << model_kind << "\n";
    out << "d_v = " << fno.d_v << "\n";
    out << "k_max = " << fno.k_max << "\n";
    out << "layers = " << fno.T << "\n";
    out << "activation = " << activation_name(fno.activation) << "\n";
    out << "d = " << fno.d << "\n";
    out << "d_a = " << fno.d_a << "\n";
    out << "d_u = " << fno.d_u << "\n";
    if (model_kind == "mscale-fno") {
        out << "branches = " << branches << "\n";
        out << "scales = ";
        for (std::size_t i = 0; i < initial_scales.size(); ++i)
            out << (i ? ", " : "") << format_double(initial_scales[i]);
        out << "\n";
    }
    out << "\n[train]\n";
    out << "learning_rate = " << format_double(train.learning_rate) << "\n";
    out << "batch_size = " << train.batch_size << "\n";
    out << "epochs = " << train.epochs << "\n";
    out << "seed = " << train.seed << "\n";
    out << "\n[data]\n";
    out << "path = " << dataset_prefix << "\n";
    out << "\n[output]\n";
    out << "dir = " << output_dir << "\n";
    return out.str();
}

ExperimentConfig parse_experiment_config(const std::string& text) {
    IniReader ini(parse_ini(text));
    ExperimentConfig cfg;
    cfg.model_kind = ini.require("model", "kind");
    cfg.fno.d_v = ini.number<std::size_t>("model", "d_v", 32);
    cfg.fno.k_max = ini.number<std::size_t>("model", "k_max", 16);
    cfg.fno.T = ini.number<std::size_t>("model", "layers", 1);
    cfg.fno.d = ini.number<std::size_t>("model", "d", 1);
    cfg.fno.d_a = ini.number<std::size_t>("model", "d_a", 1);
    cfg.fno.d_u = ini.number<std::size_t>("model", "d_u", 1);
    if (auto act = ini.get("model", "activation")) {
        cfg.fno.activation = activation_from_name(*act);
    } else {
        // Unstated: normal FNO defaults to GELU, branches of the mscale
        // model to sine.
        cfg.fno.activation =
            cfg.model_kind == "mscale-fno" ? Activation::Sine : Activation::Gelu;
    }
    if (cfg.model_kind == "mscale-fno") {
        cfg.branches = ini.number<std::size_t>("model", "branches", 1);
        cfg.initial_scales = parse_scale_list(ini.require("model", "scales"), 0);
    } else {
        ini.get("model", "branches");  // tolerated but ignored for normal-fno
        ini.get("model", "scales");
    }
    cfg.train.learning_rate = ini.number<double>("train", "learning_rate", 0.001);
    cfg.train.batch_size = ini.number<std::size_t>("train", "batch_size", 20);
    cfg.train.epochs = ini.number<std::size_t>("train", "epochs", 0);
    cfg.train.seed = ini.number<std::uint64_t>("train", "seed", 0);
    cfg.dataset_prefix = ini.get("data", "path").value_or("");
    cfg.output_dir = ini.get("output", "dir").value_or("");
    ini.check_all_used();
    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config(buf.str());
}

std::string config_hash(const ExperimentConfig& cfg) {
    const std::string text = cfg.serialize();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Model build_model(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::uint64_t init_seed = derive_seed(cfg.train.seed, kInitSeedStream);
    if (cfg.model_kind == "mscale-fno")
        return Model::make_mscale(
            init_mscale(cfg.fno, cfg.branches, cfg.initial_scales, init_seed));
    return Model::make_fno(init_params(cfg.fno, init_seed));
}

CountBreakdown count_breakdown(const ExperimentConfig& cfg) {
    cfg.validate();
    CountBreakdown out;
    const FnoConfig& c = cfg.fno;
    const std::size_t lift = (c.d + c.d_a + 1) * c.d_v;
    const std::size_t per_layer = (c.k_max + 3) * c.d_v * c.d_v + 3 * c.d_v;
    const std::size_t proj = 2 * c.d_v * c.d_v + (2 * c.d_u + 2) * c.d_v + c.d_u;
    if (cfg.model_kind == "mscale-fno") {
        const std::size_t per_branch = count_parameters(c);
        for (std::size_t i = 0; i < cfg.branches; ++i)
            out.blocks.emplace_back("branch" + std::to_string(i), per_branch);
        out.blocks.emplace_back("scales", cfg.branches);
        out.blocks.emplace_back("weights", cfg.branches);
    } else {
        out.blocks.emplace_back("lift", lift);
        for (std::size_t t = 0; t < c.T; ++t)
            out.blocks.emplace_back("layer" + std::to_string(t), per_layer);
        out.blocks.emplace_back("projection", proj);
    }
    for (const auto& [name, n] : out.blocks) out.total += n;
    return out;
}

TrainResult run_training(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.output_dir.empty()) throw config_error("config: [output] dir is required for train");
    if (cfg.dataset_prefix.empty()) throw config_error("config: [data] path is required for train");

    BuiltDataset ds = read_dataset(cfg.dataset_prefix);
    Model model = build_model(cfg);
    if (cfg.fno.k_max > ds.samples.grid_size() / 2 + 1)
        throw config_error("k_max " + std::to_string(cfg.fno.k_max) +
                           " too large for dataset grid of " +
                           std::to_string(ds.samples.grid_size()) + " points");

    TrainResult result = train(std::move(model), ds.samples, cfg.train);

    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    const std::string dir = cfg.output_dir + "/";
    write_checkpoint(dir + "best", result.best_model, cfg.train.seed);
    write_checkpoint(dir + "final", result.final_model, cfg.train.seed);
    write_metrics_csv(dir + "metrics.csv", result.records);

    nlohmann::json manifest{
        {"config_hash", config_hash(cfg)},
        {"config", cfg.serialize()},
        {"seeds",
         {{"train", cfg.train.seed}, {"init", derive_seed(cfg.train.seed, kInitSeedStream)}}},
        {"param_count", result.final_model.param_count()},
        {"dataset", cfg.dataset_prefix},
        {"best_epoch", result.best_epoch},
        {"best_val_err", result.best_val_err},
        {"model_selection", "best-validation checkpoint (reported model)"}};
    std::ofstream out(dir + "run.json");
    out << manifest.dump(2) << "\n";

    std::ofstream cfg_out(dir + "config.ini");
    cfg_out << cfg.serialize();
    return result;
}

EvalSummary run_eval(const Model& model, const BuiltDataset& ds, const std::string& split) {
    const std::vector<std::size_t>* idx = nullptr;
    if (split == "train") idx = &ds.samples.train_idx;
    else if (split == "val") idx = &ds.samples.val_idx;
    else if (split == "test") idx = &ds.samples.test_idx;
    else throw config_error("unknown split '" + split + "' (train|val|test)");
    if (idx->empty()) throw data_error("split '" + split + "' is empty");

    if (model.config().k_max > ds.samples.grid_size() / 2 + 1)
        throw data_error("checkpoint k_max incompatible with dataset grid of " +
                         std::to_string(ds.samples.grid_size()) + " points");

    EvalSummary s;
    const Tensor x = grid_tensor(ds.samples.grid);
    for (std::size_t i : *idx) {
        Tensor pred = model.apply(x, column_tensor(ds.samples.inputs[i]));
        s.per_sample.push_back(relative_l2(pred, column_tensor(ds.samples.targets[i])));
    }
    std::vector<double> sorted = s.per_sample;
    std::sort(sorted.begin(), sorted.end());
    for (double v : s.per_sample) s.mean += v;
    s.mean /= static_cast<double>(s.per_sample.size());
    s.median = sorted[sorted.size() / 2];
    s.max = sorted.back();
    return s;
}

SpectrumReport build_spectrum_report(const Model& model, const BuiltDataset& ds,
                                     std::size_t sample_index, bool with_branches) {
    if (sample_index >= ds.samples.sample_count())
        throw data_error("sample index " + std::to_string(sample_index) +
                         " out of range (dataset has " +
                         std::to_string(ds.samples.sample_count()) + " samples)");
    if (with_branches && !model.is_mscale())
        throw config_error("--with-branches requires an mscale-fno checkpoint");

    const Tensor x = grid_tensor(ds.samples.grid);
    const Tensor a = column_tensor(ds.samples.inputs[sample_index]);
    const Tensor& target = ds.samples.targets[sample_index];
    Tensor pred = model.apply(x, a);

    SpectrumReport report;
    const std::size_t modes = ds.samples.grid_size() / 2 + 1;
    report.columns = {"mode", "target", "prediction"};
    std::vector<double> mode_index(modes);
    for (std::size_t k = 0; k < modes; ++k) mode_index[k] = static_cast<double>(k);
    report.values.push_back(std::move(mode_index));
    report.values.push_back(dft_magnitudes(target));
    report.values.push_back(dft_magnitudes(pred));

    if (with_branches) {
        const auto& ms = std::get<MscaleParams>(model.params);
        auto contributions = branch_contributions(ms, x, a);
        for (std::size_t i = 0; i < contributions.size(); ++i) {
            report.columns.push_back("branch_" + std::to_string(i));
            report.values.push_back(dft_magnitudes(contributions[i]));
        }
    }
    return report;
}

}  // namespace msfno
