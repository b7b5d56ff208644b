#include "msfno/io.hpp"

#include <bit>
#include <charconv>
#include <complex>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "msfno/errors.hpp"
#include "msfno/fft.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary formats are little-endian; big-endian hosts need byte swaps");

namespace msfno {

using nlohmann::json;

namespace {

constexpr char kDatasetMagic[8] = {'M', 'S', 'F', 'N', 'D', 'S', '0', '1'};
constexpr char kCheckpointMagic[8] = {'M', 'S', 'F', 'N', 'C', 'K', '0', '1'};

void write_blob(const std::string& path, const char magic[8],
                const std::vector<const std::vector<double>*>& blocks) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot open for writing: " + path);
    out.write(magic, 8);
    for (const auto* block : blocks)
        out.write(reinterpret_cast<const char*>(block->data()),
                  static_cast<std::streamsize>(block->size() * sizeof(double)));
    if (!out) throw data_error("write failed: " + path);
}

std::vector<double> read_blob(const std::string& path, const char magic[8]) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open: " + path);
    char header[8];
    in.read(header, 8);
    if (!in || !std::equal(header, header + 8, magic))
        throw data_error("bad magic header in " + path);
    std::vector<double> data;
    in.seekg(0, std::ios::end);
    const auto bytes = static_cast<std::size_t>(in.tellg()) - 8;
    if (bytes % sizeof(double) != 0) throw data_error("truncated blob: " + path);
    data.resize(bytes / sizeof(double));
    in.seekg(8);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw data_error("read failed: " + path);
    return data;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw data_error("write failed: " + path);
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw data_error("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

json preset_to_json(const DatasetPreset& p) {
    return json{{"name", p.name},
                {"family", static_cast<int>(p.family)},
                {"n_max", p.input_spec.n_max},
                {"use_sin", p.input_spec.use_sin},
                {"use_cos", p.input_spec.use_cos},
                {"map_M", p.map_M},
                {"single_frequency_m", p.single_frequency_m},
                {"L", p.L},
                {"grid_n", p.grid_n},
                {"fine_n", p.fine_n},
                {"n_train", p.n_train},
                {"n_val", p.n_val},
                {"n_test", p.n_test}};
}

DatasetPreset preset_from_json(const json& j) {
    DatasetPreset p;
    p.name = j.at("name");
    p.family = static_cast<PresetFamily>(j.at("family").get<int>());
    p.input_spec.n_max = j.at("n_max");
    p.input_spec.use_sin = j.at("use_sin");
    p.input_spec.use_cos = j.at("use_cos");
    p.map_M = j.at("map_M");
    p.single_frequency_m = j.at("single_frequency_m");
    p.L = j.at("L");
    p.grid_n = j.at("grid_n");
    p.fine_n = j.at("fine_n");
    p.n_train = j.at("n_train");
    p.n_val = j.at("n_val");
    p.n_test = j.at("n_test");
    return p;
}

json config_to_json(const FnoConfig& c) {
    return json{{"d", c.d},     {"d_a", c.d_a},     {"d_u", c.d_u},
                {"d_v", c.d_v}, {"k_max", c.k_max}, {"T", c.T},
                {"activation", activation_name(c.activation)}};
}

FnoConfig config_from_json(const json& j) {
    FnoConfig c;
    c.d = j.at("d");
    c.d_a = j.at("d_a");
    c.d_u = j.at("d_u");
    c.d_v = j.at("d_v");
    c.k_max = j.at("k_max");
    c.T = j.at("T");
    c.activation = activation_from_name(j.at("activation"));
    return c;
}

}  // namespace

void write_dataset(const std::string& prefix, const BuiltDataset& ds) {
    const SampleSet& s = ds.samples;
    json manifest{{"format", "msfno-dataset"},
                  {"version", 1},
                  {"preset", preset_to_json(ds.preset)},
                  {"seed", ds.seed},
                  {"grid", {{"n", s.grid.size()}, {"x0", s.grid.front()}, {"x1", s.grid.back()}}},
                  {"samples", s.sample_count()},
                  {"splits",
                   {{"train", s.train_idx}, {"val", s.val_idx}, {"test", s.test_idx}}}};
    if (ds.preset.family == PresetFamily::PointwiseSingle ||
        ds.preset.family == PresetFamily::PointwiseMulti) {
        json map{{"M", ds.map.M}, {"A", ds.map.A}, {"B", ds.map.B}};
        if (ds.map.single_frequency) map["single_frequency"] = *ds.map.single_frequency;
        manifest["map"] = map;
    }
    write_text(prefix + ".json", manifest.dump(2) + "\n");

    std::vector<const std::vector<double>*> blocks;
    blocks.push_back(&s.grid);
    for (const auto& t : s.inputs) blocks.push_back(&t.data);
    for (const auto& t : s.targets) blocks.push_back(&t.data);
    write_blob(prefix + ".bin", kDatasetMagic, blocks);
}

BuiltDataset read_dataset(const std::string& prefix) {
    json manifest = read_json(prefix + ".json");
    if (manifest.value("format", "") != "msfno-dataset")
        throw data_error(prefix + ".json is not a dataset manifest");
    BuiltDataset ds;
    ds.preset = preset_from_json(manifest.at("preset"));
    ds.seed = manifest.at("seed");
    if (manifest.contains("map")) {
        const json& m = manifest["map"];
        ds.map.M = m.at("M");
        ds.map.A = m.at("A").get<std::vector<double>>();
        ds.map.B = m.at("B").get<std::vector<double>>();
        if (m.contains("single_frequency")) ds.map.single_frequency = m["single_frequency"];
    }

    const std::size_t n = manifest.at("grid").at("n");
    const std::size_t count = manifest.at("samples");
    std::vector<double> blob = read_blob(prefix + ".bin", kDatasetMagic);
    if (blob.size() != n + 2 * count * n) throw data_error("dataset blob size mismatch: " + prefix);

    SampleSet& s = ds.samples;
    s.grid.assign(blob.begin(), blob.begin() + static_cast<std::ptrdiff_t>(n));
    std::size_t off = n;
    auto take = [&]() {
        Tensor t;
        t.shape = {n};
        t.data.assign(blob.begin() + static_cast<std::ptrdiff_t>(off),
                      blob.begin() + static_cast<std::ptrdiff_t>(off + n));
        off += n;
        return t;
    };
    for (std::size_t i = 0; i < count; ++i) s.inputs.push_back(take());
    for (std::size_t i = 0; i < count; ++i) s.targets.push_back(take());
    s.train_idx = manifest.at("splits").at("train").get<std::vector<std::size_t>>();
    s.val_idx = manifest.at("splits").at("val").get<std::vector<std::size_t>>();
    s.test_idx = manifest.at("splits").at("test").get<std::vector<std::size_t>>();
    return ds;
}

void write_checkpoint(const std::string& prefix, const Model& model, std::uint64_t seed) {
    json sections = json::array();
    std::size_t off = 0;
    for (const auto& s : model.sections()) {
        sections.push_back({{"name", s.name},
                            {"shape", s.tensor->shape},
                            {"dtype", s.tensor->dtype == Dtype::Complex ? "complex" : "real"},
                            {"offset_f64", off},
                            {"count_f64", s.tensor->data.size()}});
        off += s.tensor->data.size();
    }
    json manifest{{"format", "msfno-checkpoint"},
                  {"version", 1},
                  {"kind", model.kind_name()},
                  {"config", config_to_json(model.config())},
                  {"seed", seed},
                  {"param_count", model.param_count()},
                  {"sections", sections}};
    if (model.is_mscale())
        manifest["branches"] = std::get<MscaleParams>(model.params).num_branches();
    write_text(prefix + ".json", manifest.dump(2) + "\n");

    const std::vector<double> flat = flatten_params(model);
    write_blob(prefix + ".bin", kCheckpointMagic, {&flat});
}

Model read_checkpoint(const std::string& prefix) {
    json manifest = read_json(prefix + ".json");
    if (manifest.value("format", "") != "msfno-checkpoint")
        throw data_error(prefix + ".json is not a checkpoint manifest");
    const FnoConfig config = config_from_json(manifest.at("config"));
    const std::string kind = manifest.at("kind");

    Model model;
    if (kind == "mscale-fno") {
        const std::size_t n = manifest.at("branches");
        model = Model::make_mscale(init_mscale(config, n, std::vector<double>(n, 1.0), 0));
    } else if (kind == "normal-fno") {
        model = Model::make_fno(init_params(config, 0));
    } else {
        throw data_error("unknown checkpoint kind '" + kind + "'");
    }

    std::vector<double> flat = read_blob(prefix + ".bin", kCheckpointMagic);
    unflatten_params(model, flat);
    return model;
}

std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

void write_metrics_csv(const std::string& path, const std::vector<EpochRecord>& records) {
    std::string text = "epoch,train_loss,val_err,test_err,seconds\n";
    for (const auto& r : records) {
        text += std::to_string(r.epoch) + "," + format_double(r.train_loss) + "," +
                format_double(r.val_err) + "," + format_double(r.test_err) + "," +
                format_double(r.seconds) + "\n";
    }
    write_text(path, text);
}

std::vector<double> dft_magnitudes(const Tensor& signal) {
    const std::size_t n = signal.numel();
    std::vector<std::complex<double>> buf(n);
    for (std::size_t j = 0; j < n; ++j) buf[j] = signal.data[j];
    fft::forward(buf.data(), n);
    std::vector<double> mags(n / 2 + 1);
    for (std::size_t k = 0; k < mags.size(); ++k) mags[k] = std::abs(buf[k]);
    return mags;
}

void write_spectrum_csv(const std::string& path, const SpectrumReport& report) {
    if (report.columns.size() != report.values.size())
        throw config_error("spectrum report: column/value count mismatch");
    std::string text;
    for (std::size_t c = 0; c < report.columns.size(); ++c)
        text += (c ? "," : "") + report.columns[c];
    text += "\n";
    const std::size_t rows = report.values.empty() ? 0 : report.values[0].size();
    for (const auto& col : report.values)
        if (col.size() != rows) throw config_error("spectrum report: ragged columns");
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < report.values.size(); ++c)
            text += (c ? "," : "") + format_double(report.values[c][r]);
        text += "\n";
    }
    write_text(path, text);
}

}  // namespace msfno
