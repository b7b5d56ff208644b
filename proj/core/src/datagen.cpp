#include "msfno/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "msfno/errors.hpp"
#include "msfno/rng.hpp"

namespace msfno {

namespace {

constexpr std::uint64_t kMapCoefficientStream = 0x6d61702d636f6566ULL;

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) g[j] = lo + h * static_cast<double>(j);
    g.back() = hi;
    return g;
}

Tensor normalize_sup(std::vector<double> values, const char* what) {
    double max_abs = 0.0;
    for (double v : values) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0) throw numeric_error(std::string(what) + ": raw series is identically zero");
    Tensor out;
    out.shape = {values.size()};
    out.data = std::move(values);
    for (double& v : out.data) v /= max_abs;
    return out;
}

std::vector<double> eval_fourier_series(const FourierSeriesSpec& spec,
                                        const std::vector<double>& grid, SplitMix64& rng) {
    // Draw order pinned: ascending n, sin coefficient before cos.
    std::vector<double> a(spec.n_max + 1, 0.0), b(spec.n_max + 1, 0.0);
    for (std::size_t n = 0; n <= spec.n_max; ++n) {
        if (spec.use_sin) a[n] = rng.uniform(-1.0, 1.0);
        if (spec.use_cos) b[n] = rng.uniform(-1.0, 1.0);
    }
    std::vector<double> values(grid.size(), 0.0);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double s = 0.0;
        for (std::size_t n = 0; n <= spec.n_max; ++n) {
            const double arg = static_cast<double>(n) * std::numbers::pi * grid[j];
            if (spec.use_sin) s += a[n] * std::sin(arg);
            if (spec.use_cos) s += b[n] * std::cos(arg);
        }
        values[j] = s;
    }
    return values;
}

}  // namespace

Tensor gen_input_function(const FourierSeriesSpec& spec, const std::vector<double>& grid,
                          std::uint64_t seed) {
    if (grid.empty()) throw config_error("gen_input_function: empty grid");
    if (!spec.use_sin && !spec.use_cos)
        throw config_error("gen_input_function: need sin or cos terms");
    SplitMix64 rng(seed);
    auto values = eval_fourier_series(spec, grid, rng);
    double max_abs = 0.0;
    for (double v : values) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0) values = eval_fourier_series(spec, grid, rng);  // one redraw
    return normalize_sup(std::move(values), "gen_input_function");
}

PointwiseMapSpec make_random_map(std::size_t M, std::uint64_t seed) {
    PointwiseMapSpec spec;
    spec.M = M;
    SplitMix64 rng(seed);
    for (std::size_t m = 0; m < M; ++m) {
        spec.A.push_back(rng.uniform(-1.0, 1.0));
        spec.B.push_back(rng.uniform(-1.0, 1.0));
    }
    return spec;
}

Tensor apply_pointwise_map(const PointwiseMapSpec& spec, const Tensor& a) {
    Tensor u = Tensor::zeros(a.shape);
    if (spec.single_frequency) {
        const double m = *spec.single_frequency;
        for (std::size_t j = 0; j < a.data.size(); ++j) u.data[j] = std::sin(m * a.data[j]);
        return u;
    }
    if (spec.A.size() != spec.M || spec.B.size() != spec.M)
        throw config_error("apply_pointwise_map: coefficient count does not match M");
    for (std::size_t j = 0; j < a.data.size(); ++j) {
        double s = 0.0;
        for (std::size_t m = 1; m <= spec.M; ++m) {
            const double arg = static_cast<double>(m) * a.data[j];
            s += spec.A[m - 1] * std::sin(arg) + spec.B[m - 1] * std::cos(arg);
        }
        u.data[j] = s;
    }
    return u;
}

void HelmholtzProblem::validate() const {
    if (L <= 0.0) throw config_error("HelmholtzProblem: L must be positive");
    if (fine_n < 3 || coarse_n < 2) throw config_error("HelmholtzProblem: grids too small");
    if ((fine_n - 1) % (coarse_n - 1) != 0)
        throw config_error("HelmholtzProblem: fine_n-1 must be divisible by coarse_n-1");
    double mu_max = 0.0;
    for (double mu : forcing_mu) mu_max = std::max(mu_max, std::abs(mu));
    const double needed = 10.0 * mu_max * L / std::numbers::pi;
    if (static_cast<double>(fine_n) < needed)
        throw config_error("HelmholtzProblem: fine grid of " + std::to_string(fine_n) +
                           " points cannot resolve forcing (need >= " +
                           std::to_string(static_cast<std::size_t>(needed)) + ")");
}

std::vector<double> HelmholtzProblem::fine_grid() const { return uniform_grid(-L, L, fine_n); }
std::vector<double> HelmholtzProblem::coarse_grid() const { return uniform_grid(-L, L, coarse_n); }

std::vector<double> HelmholtzProblem::forcing(const std::vector<double>& grid) const {
    std::vector<double> f(grid.size(), 0.0);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double s = 0.0;
        for (double mu : forcing_mu) s += (lambda * lambda - mu * mu) * std::sin(mu * grid[j]);
        f[j] = s;
    }
    return f;
}

HelmholtzProblem default_helmholtz(double L) {
    HelmholtzProblem p;
    p.L = L;
    for (int k = 0; k <= 10; ++k) p.forcing_mu.push_back(300.0 + 35.0 * k);
    // Keep the mesh size of the 8001-point L=1 solve for larger domains.
    const std::size_t scale = static_cast<std::size_t>(std::llround(L));
    p.fine_n = 8000 * scale + 1;
    p.coarse_n = 1000 * scale + 1;
    return p;
}

namespace {

/// Tridiagonal LU with partial pivoting (LAPACK dgttrf/dgtts2 scheme).
/// The Helmholtz operator is indefinite, so unpivoted Thomas elimination
/// is not guaranteed stable.
void solve_tridiag_pivoted(std::vector<double> dl, std::vector<double> d,
                           std::vector<double> du, std::vector<double>& rhs) {
    const std::size_t m = d.size();
    std::vector<double> du2(m > 2 ? m - 2 : 0, 0.0);
    std::vector<bool> swapped(m > 1 ? m - 1 : 0, false);

    double scale = 0.0;
    for (double v : d) scale = std::max(scale, std::abs(v));
    for (double v : dl) scale = std::max(scale, std::abs(v));
    for (double v : du) scale = std::max(scale, std::abs(v));

    for (std::size_t i = 0; i + 1 < m; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (d[i] != 0.0) {
                const double fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            }
            if (i + 2 < m) du2[i] = 0.0;
        } else {
            const double fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            const double temp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = temp - fact * d[i + 1];
            if (i + 2 < m) {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du[i + 1];
            }
            swapped[i] = true;
        }
    }

    double min_pivot = std::abs(d[0]);
    for (double v : d) min_pivot = std::min(min_pivot, std::abs(v));
    if (min_pivot <= 1e-14 * scale)
        throw numeric_error(
            "helmholtz_solve: system is singular or near-singular (lambda^2 + c*omega close to "
            "a discrete eigenvalue); condition estimate " +
            std::to_string(min_pivot > 0.0 ? scale / min_pivot : INFINITY));

    for (std::size_t i = 0; i + 1 < m; ++i) {
        if (!swapped[i]) {
            rhs[i + 1] -= dl[i] * rhs[i];
        } else {
            const double temp = rhs[i];
            rhs[i] = rhs[i + 1];
            rhs[i + 1] = temp - dl[i] * rhs[i];
        }
    }
    rhs[m - 1] /= d[m - 1];
    if (m >= 2) rhs[m - 2] = (rhs[m - 2] - du[m - 2] * rhs[m - 1]) / d[m - 2];
    for (std::size_t k = m; k-- > 2;) {
        const std::size_t i = k - 2;
        rhs[i] = (rhs[i] - du[i] * rhs[i + 1] - du2[i] * rhs[i + 2]) / d[i];
    }
}

}  // namespace

Tensor helmholtz_solve(const HelmholtzProblem& prob, const Tensor& omega_fine,
                       const std::vector<double>& f) {
    prob.validate();
    if (omega_fine.numel() != prob.fine_n || f.size() != prob.fine_n)
        throw config_error("helmholtz_solve: omega/f must live on the fine grid (" +
                           std::to_string(prob.fine_n) + " points)");
    const std::size_t m = prob.fine_n - 2;  // interior unknowns
    const double h = 2.0 * prob.L / static_cast<double>(prob.fine_n - 1);
    const double inv_h2 = 1.0 / (h * h);

    std::vector<double> dl(m - 1, inv_h2), du(m - 1, inv_h2), d(m), rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + 1;
        d[i] = -2.0 * inv_h2 + prob.lambda * prob.lambda + prob.c * omega_fine.data[j];
        rhs[i] = f[j];
    }
    solve_tridiag_pivoted(std::move(dl), std::move(d), std::move(du), rhs);

    Tensor u = Tensor::zeros({prob.fine_n});
    for (std::size_t i = 0; i < m; ++i) u.data[i + 1] = rhs[i];
    return u;
}

Tensor helmholtz_solve(const HelmholtzProblem& prob, const Tensor& omega_fine) {
    return helmholtz_solve(prob, omega_fine, prob.forcing(prob.fine_grid()));
}

double helmholtz_residual(const HelmholtzProblem& prob, const Tensor& omega_fine,
                          const Tensor& u, const std::vector<double>& f) {
    const double h = 2.0 * prob.L / static_cast<double>(prob.fine_n - 1);
    const double inv_h2 = 1.0 / (h * h);
    double rr = 0.0, ff = 0.0;
    for (std::size_t j = 1; j + 1 < prob.fine_n; ++j) {
        const double lhs =
            (u.data[j - 1] - 2.0 * u.data[j] + u.data[j + 1]) * inv_h2 +
            (prob.lambda * prob.lambda + prob.c * omega_fine.data[j]) * u.data[j];
        const double r = lhs - f[j];
        rr += r * r;
        ff += f[j] * f[j];
    }
    return std::sqrt(rr) / std::sqrt(ff);
}

Tensor downsample(const Tensor& u_fine, std::size_t coarse_n) {
    const std::size_t fine_n = u_fine.numel();
    if (coarse_n < 2 || (fine_n - 1) % (coarse_n - 1) != 0)
        throw config_error("downsample: fine_n-1 = " + std::to_string(fine_n - 1) +
                           " not divisible by coarse_n-1 = " + std::to_string(coarse_n - 1));
    const std::size_t stride = (fine_n - 1) / (coarse_n - 1);
    Tensor out = Tensor::zeros({coarse_n});
    for (std::size_t j = 0; j < coarse_n; ++j) out.data[j] = u_fine.data[j * stride];
    return out;
}

Tensor gen_ood_input(std::uint64_t seed, const std::vector<double>& grid) {
    if (grid.empty()) throw config_error("gen_ood_input: empty grid");
    SplitMix64 rng(seed);
    auto draw = [&](std::vector<double>& a, std::vector<double>& b, std::vector<double>& k,
                    std::vector<double>& l) {
        for (std::size_t n = 0; n < 50; ++n) {
            a.push_back(rng.uniform(-1.0, 1.0));
            b.push_back(rng.uniform(-1.0, 1.0));
            k.push_back(rng.uniform(0.0, 30.0));
            l.push_back(rng.uniform(40.0, 60.0));
        }
    };
    auto evaluate = [&](const std::vector<double>& a, const std::vector<double>& b,
                        const std::vector<double>& k, const std::vector<double>& l) {
        std::vector<double> values(grid.size(), 0.0);
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double x = grid[j];
            double s = 0.0;
            for (std::size_t n = 0; n < 50; ++n)
                s += a[n] * std::sin(k[n] * x * x * x) + b[n] * std::cos(l[n] * x * x);
            values[j] = s;
        }
        return values;
    };
    std::vector<double> a, b, k, l;
    draw(a, b, k, l);
    auto values = evaluate(a, b, k, l);
    double max_abs = 0.0;
    for (double v : values) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0) {
        a.clear(), b.clear(), k.clear(), l.clear();
        draw(a, b, k, l);
        values = evaluate(a, b, k, l);
    }
    return normalize_sup(std::move(values), "gen_ood_input");
}

std::vector<std::string> preset_names() { return {"ex4.1", "ex4.2", "ex4.3", "ex4.4", "ex4.5"}; }

DatasetPreset make_preset(const std::string& name, const PresetOptions& opts) {
    DatasetPreset p;
    p.name = name;
    if (name == "ex4.1") {
        p.family = PresetFamily::PointwiseSingle;
        p.input_spec = {50, true, false};
        p.single_frequency_m = 20.0;
        p.grid_n = 1001;
        p.n_train = 1000, p.n_val = 500, p.n_test = 500;
    } else if (name == "ex4.2") {
        p.family = PresetFamily::PointwiseMulti;
        p.input_spec = {10, true, true};
        if (!opts.M) throw config_error("preset ex4.2 requires M (number of frequency terms)");
        p.map_M = *opts.M;
        p.grid_n = 1001;
        p.n_train = 1000, p.n_val = 500, p.n_test = 500;
    } else if (name == "ex4.3") {
        p.family = PresetFamily::Helmholtz;
        p.input_spec = {500, true, true};
        p.L = 1.0;
        p.grid_n = 1001;
        p.fine_n = 8001;
        p.n_train = 800, p.n_val = 100, p.n_test = 100;
    } else if (name == "ex4.4") {
        p.family = PresetFamily::Helmholtz;
        p.input_spec = {50, true, true};
        if (!opts.L) throw config_error("preset ex4.4 requires L (domain half-length)");
        p.L = *opts.L;
        const auto scale = static_cast<std::size_t>(std::llround(p.L));
        p.grid_n = 1000 * scale + 1;
        p.fine_n = 8000 * scale + 1;
        p.n_train = 800, p.n_val = 100, p.n_test = 100;
    } else if (name == "ex4.5") {
        p.family = PresetFamily::HelmholtzOod;
        p.L = opts.L.value_or(10.0);
        const auto scale = static_cast<std::size_t>(std::llround(p.L));
        p.grid_n = 1000 * scale + 1;
        p.fine_n = 8000 * scale + 1;
        p.n_train = 0, p.n_val = 0, p.n_test = 100;
    } else {
        std::string valid;
        for (const auto& v : preset_names()) valid += (valid.empty() ? "" : ", ") + v;
        throw config_error("unknown preset '" + name + "' (valid: " + valid + ")");
    }
    if (opts.n_max) p.input_spec.n_max = *opts.n_max;
    if (opts.grid_n) {
        p.grid_n = *opts.grid_n;
        if (p.family == PresetFamily::Helmholtz || p.family == PresetFamily::HelmholtzOod)
            p.fine_n = (p.grid_n - 1) * 8 + 1;
    }
    if (opts.n_train) p.n_train = *opts.n_train;
    if (opts.n_val) p.n_val = *opts.n_val;
    if (opts.n_test) p.n_test = *opts.n_test;
    return p;
}

BuiltDataset build_dataset(const DatasetPreset& preset, std::uint64_t seed) {
    BuiltDataset ds;
    ds.preset = preset;
    ds.seed = seed;

    const double lo = (preset.family == PresetFamily::PointwiseSingle ||
                       preset.family == PresetFamily::PointwiseMulti)
                          ? -1.0
                          : -preset.L;
    SampleSet& s = ds.samples;
    s.grid = uniform_grid(lo, -lo, preset.grid_n);

    if (preset.family == PresetFamily::PointwiseSingle) {
        ds.map.single_frequency = preset.single_frequency_m;
    } else if (preset.family == PresetFamily::PointwiseMulti) {
        ds.map = make_random_map(preset.map_M, derive_seed(seed, kMapCoefficientStream));
    }

    HelmholtzProblem prob;
    std::vector<double> fine_grid, forcing;
    const bool is_pde = preset.family == PresetFamily::Helmholtz ||
                        preset.family == PresetFamily::HelmholtzOod;
    if (is_pde) {
        prob = default_helmholtz(preset.L);
        prob.fine_n = preset.fine_n;
        prob.coarse_n = preset.grid_n;
        prob.validate();
        fine_grid = prob.fine_grid();
        forcing = prob.forcing(fine_grid);
    }

    const std::size_t total = preset.n_train + preset.n_val + preset.n_test;
    for (std::size_t i = 0; i < total; ++i) {
        const std::uint64_t sample_seed = derive_seed(seed, i);
        Tensor a, u;
        switch (preset.family) {
            case PresetFamily::PointwiseSingle:
            case PresetFamily::PointwiseMulti:
                a = gen_input_function(preset.input_spec, s.grid, sample_seed);
                u = apply_pointwise_map(ds.map, a);
                break;
            case PresetFamily::Helmholtz: {
                Tensor omega = gen_input_function(preset.input_spec, fine_grid, sample_seed);
                Tensor u_fine = helmholtz_solve(prob, omega, forcing);
                a = downsample(omega, preset.grid_n);
                u = downsample(u_fine, preset.grid_n);
                break;
            }
            case PresetFamily::HelmholtzOod: {
                Tensor omega = gen_ood_input(sample_seed, fine_grid);
                Tensor u_fine = helmholtz_solve(prob, omega, forcing);
                a = downsample(omega, preset.grid_n);
                u = downsample(u_fine, preset.grid_n);
                break;
            }
        }
        s.inputs.push_back(std::move(a));
        s.targets.push_back(std::move(u));
    }

    for (std::size_t i = 0; i < preset.n_train; ++i) s.train_idx.push_back(i);
    for (std::size_t i = 0; i < preset.n_val; ++i) s.val_idx.push_back(preset.n_train + i);
    for (std::size_t i = 0; i < preset.n_test; ++i)
        s.test_idx.push_back(preset.n_train + preset.n_val + i);
    return ds;
}

}  // namespace msfno
