#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msfno/tensor.hpp"

namespace msfno {

/// Random normalized Fourier-series input family:
///   a(x) = sum_{n=0}^{n_max} [a_n sin(n pi x) + b_n cos(n pi x)] / max_j |a(x_j)|
/// with a_n, b_n ~ uniform(-1, 1). Sin/cos terms toggle independently.
struct FourierSeriesSpec {
    std::size_t n_max = 50;
    bool use_sin = true;
    bool use_cos = false;
};

/// Values are drawn per-sample from `seed`; output sup-norm is exactly 1
/// at some grid point.
Tensor gen_input_function(const FourierSeriesSpec& spec, const std::vector<double>& grid,
                          std::uint64_t seed);

/// Pointwise nonlinear target map:
///   u_j = sum_{m=1}^{M} [A_m sin(m a_j) + B_m cos(m a_j)]
/// or u_j = sin(m0 a_j) in single-frequency mode.
struct PointwiseMapSpec {
    std::size_t M = 0;
    std::vector<double> A;  // [M]
    std::vector<double> B;  // [M]
    std::optional<double> single_frequency;
};

/// Coefficients A_m, B_m ~ uniform(-1,1), fixed once per experiment.
PointwiseMapSpec make_random_map(std::size_t M, std::uint64_t seed);

Tensor apply_pointwise_map(const PointwiseMapSpec& spec, const Tensor& a);

/// 1-D Helmholtz scattering problem on [-L, L] with homogeneous Dirichlet
/// conditions: u'' + (lambda^2 + c w(x)) u = f(x), f from a fixed list of
/// forcing wavenumbers mu_k with amplitudes (lambda^2 - mu_k^2).
struct HelmholtzProblem {
    double L = 1.0;
    double lambda = 2.0;
    double c = 3.6;
    std::vector<double> forcing_mu;  // default: mu_k = 300 + 35 k, k = 0..10
    std::size_t fine_n = 8001;
    std::size_t coarse_n = 1001;

    void validate() const;
    std::vector<double> fine_grid() const;
    std::vector<double> coarse_grid() const;
    /// Forcing values on a grid.
    std::vector<double> forcing(const std::vector<double>& grid) const;
};

HelmholtzProblem default_helmholtz(double L);

/// Second-order central-difference solve of the problem on its fine grid;
/// the indefinite tridiagonal system is factorized with partial pivoting.
/// Throws numeric_error near a discrete eigenvalue.
Tensor helmholtz_solve(const HelmholtzProblem& prob, const Tensor& omega_fine);
/// Variant with explicit right-hand side (tests use analytic forcings).
Tensor helmholtz_solve(const HelmholtzProblem& prob, const Tensor& omega_fine,
                       const std::vector<double>& f);

/// Max-norm of the stencil residual relative to the forcing norm.
double helmholtz_residual(const HelmholtzProblem& prob, const Tensor& omega_fine,
                          const Tensor& u, const std::vector<double>& f);

/// Strided restriction preserving endpoints; (fine_n-1) must divide by (coarse_n-1).
Tensor downsample(const Tensor& u_fine, std::size_t coarse_n);

/// Out-of-distribution inputs (generalization tests):
///   eta(x) = sum_{n=1}^{50} a_n sin(k_n x^3) + b_n cos(l_n x^2),
/// k_n ~ uniform(0,30), l_n ~ uniform(40,60), normalized to sup-norm 1.
Tensor gen_ood_input(std::uint64_t seed, const std::vector<double>& grid);

/// Paired discretized samples {a(x_j)} -> {u(x_j)} on one shared grid.
struct SampleSet {
    std::vector<double> grid;
    std::vector<Tensor> inputs;   // each [n]
    std::vector<Tensor> targets;  // each [n]
    std::vector<std::size_t> train_idx, val_idx, test_idx;

    std::size_t grid_size() const { return grid.size(); }
    std::size_t sample_count() const { return inputs.size(); }
};

/// Named experiment presets for the generation pipelines.
enum class PresetFamily { PointwiseSingle, PointwiseMulti, Helmholtz, HelmholtzOod };

struct DatasetPreset {
    std::string name;
    PresetFamily family;
    FourierSeriesSpec input_spec;
    std::size_t map_M = 0;              // PointwiseMulti
    double single_frequency_m = 20.0;   // PointwiseSingle
    double L = 1.0;                     // Helmholtz domain half-length
    std::size_t grid_n = 1001;          // training grid
    std::size_t fine_n = 8001;          // Helmholtz solver grid
    std::size_t n_train = 1000, n_val = 500, n_test = 500;
};

/// Resolve a preset name: "ex4.1", "ex4.2" (requires M), "ex4.3",
/// "ex4.4" (requires L in {2,4,8,10}), "ex4.5". Optional overrides let
/// desk-scale runs shrink grids and sample counts.
struct PresetOptions {
    std::optional<std::size_t> M;
    std::optional<double> L;
    std::optional<std::size_t> grid_n;
    std::optional<std::size_t> n_max;
    std::optional<std::size_t> n_train, n_val, n_test;
};

DatasetPreset make_preset(const std::string& name, const PresetOptions& opts = {});
std::vector<std::string> preset_names();

struct BuiltDataset {
    SampleSet samples;
    DatasetPreset preset;
    std::uint64_t seed = 0;
    PointwiseMapSpec map;  // populated for pointwise families
};

/// Generate inputs, compute targets (pointwise map or FD solve + downsample),
/// split deterministically train/val/test in index order.
BuiltDataset build_dataset(const DatasetPreset& preset, std::uint64_t seed);

}  // namespace msfno
