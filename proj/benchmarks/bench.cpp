// Microbenchmarks for the hot paths of the training loop: the spectral
// transforms, a full forward pass, one optimizer step, and the Helmholtz
// fine-grid solve used by data generation.

#include <benchmark/benchmark.h>

#include "msfno/datagen.hpp"
#include "msfno/fno.hpp"
#include "msfno/graph.hpp"
#include "msfno/rng.hpp"
#include "msfno/training.hpp"

using namespace msfno;

namespace {

Tensor random_column(std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Tensor t = Tensor::zeros({n, 1});
    for (double& v : t.data) v = rng.uniform(-1.0, 1.0);
    return t;
}

Tensor random_channels(std::size_t n, std::size_t d, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Tensor t = Tensor::zeros({n, d});
    for (double& v : t.data) v = rng.uniform(-1.0, 1.0);
    return t;
}

void bm_rdft_irdft(benchmark::State& state) {
    const std::size_t n = std::size_t(state.range(0));
    const std::size_t d_v = 24, k_max = n / 2 + 1;
    Tensor x = random_channels(n, d_v, 1);
    for (auto _ : state) {
        Graph g;
        NodeId y = g.irdft(g.rdft(g.constant(x), k_max), n);
        benchmark::DoNotOptimize(g.value(y).data.data());
    }
}
BENCHMARK(bm_rdft_irdft)->Arg(257)->Arg(1001);

void bm_fno_forward(benchmark::State& state) {
    FnoConfig c;
    c.d_v = std::size_t(state.range(0));
    c.k_max = 128;
    c.T = 1;
    FnoParams p = init_params(c, 2);
    const std::size_t n = 257;
    Tensor x = random_column(n, 3), a = random_column(n, 4);
    for (auto _ : state) {
        Tensor u = fno_apply(p, x, a);
        benchmark::DoNotOptimize(u.data.data());
    }
}
BENCHMARK(bm_fno_forward)->Arg(12)->Arg(24)->Arg(48);

void bm_forward_backward(benchmark::State& state) {
    FnoConfig c;
    c.d_v = 24;
    c.k_max = 128;
    c.T = 1;
    FnoParams p = init_params(c, 5);
    const std::size_t n = 257;
    Tensor x = random_column(n, 6), a = random_column(n, 7), target = random_column(n, 8);
    for (auto _ : state) {
        Graph g;
        FnoLeaves leaves = insert_leaves(g, p);
        NodeId u = fno_forward(g, c, leaves, g.constant(x), g.constant(a));
        g.backward(relative_l2_node(g, u, target));
        benchmark::DoNotOptimize(g.grad(leaves.ids[0]).data.data());
    }
}
BENCHMARK(bm_forward_backward);

void bm_adam_step(benchmark::State& state) {
    const std::size_t n = std::size_t(state.range(0));
    SplitMix64 rng(9);
    std::vector<double> params(n), grads(n);
    for (double& v : params) v = rng.uniform(-1.0, 1.0);
    for (double& v : grads) v = rng.uniform(-1.0, 1.0);
    AdamState adam(n);
    TrainConfig cfg;
    cfg.epochs = 1;
    for (auto _ : state) {
        adam_step(params, grads, adam, cfg, {});
        benchmark::DoNotOptimize(params.data());
    }
}
BENCHMARK(bm_adam_step)->Arg(1 << 17);

void bm_helmholtz_solve(benchmark::State& state) {
    HelmholtzProblem prob = default_helmholtz(1.0);
    auto grid = prob.fine_grid();
    FourierSeriesSpec spec;
    spec.n_max = 100;
    Tensor omega = gen_input_function(spec, grid, 10);
    auto f = prob.forcing(grid);
    for (auto _ : state) {
        Tensor u = helmholtz_solve(prob, omega, f);
        benchmark::DoNotOptimize(u.data.data());
    }
}
BENCHMARK(bm_helmholtz_solve);

}  // namespace

BENCHMARK_MAIN();
