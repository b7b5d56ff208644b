#include <cmath>
#include <vector>

#include <doctest.h>

#include "msfno/errors.hpp"
#include "msfno/experiment.hpp"
#include "msfno/mscale.hpp"
#include "msfno/rng.hpp"
#include "reference_fno.hpp"
#include "test_helpers.hpp"

using namespace msfno;

namespace {

FnoConfig small_cfg(Activation act = Activation::Sine) {
    FnoConfig c;
    c.d_v = 3;
    c.k_max = 3;
    c.T = 1;
    c.activation = act;
    return c;
}

Tensor column(const std::vector<double>& v) {
    Tensor t = Tensor::zeros({v.size(), 1});
    t.data = v;
    return t;
}

struct Inputs {
    std::vector<double> x, a;
};

Inputs make_inputs(std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Inputs in;
    in.x.resize(n);
    for (std::size_t j = 0; j < n; ++j) in.x[j] = -1.0 + 2.0 * double(j) / double(n - 1);
    in.a = testutil::random_vector(n, rng);
    return in;
}

}  // namespace

TEST_CASE("one branch with c=1 and gamma=1 reproduces the plain FNO exactly") {
    FnoConfig c = small_cfg();
    MscaleParams ms = init_mscale(c, 1, {1.0}, 40);
    ms.weights.data[0] = 1.0;
    FnoParams single = ms.branches[0];

    auto in = make_inputs(17, 8);
    Tensor a = mscale_apply(ms, column(in.x), column(in.a));
    Tensor b = fno_apply(single, column(in.x), column(in.a));
    for (std::size_t j = 0; j < a.numel(); ++j)
        CHECK(a.data[j] == doctest::Approx(b.data[j]).epsilon(1e-14).scale(1.0));
}

TEST_CASE("zero combination weights zero the output") {
    FnoConfig c = small_cfg();
    MscaleParams ms = init_mscale(c, 3, {1.0, 2.0, 4.0}, 41);
    for (double& g : ms.weights.data) g = 0.0;
    auto in = make_inputs(15, 9);
    Tensor out = mscale_apply(ms, column(in.x), column(in.a));
    for (double v : out.data) CHECK(v == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("branch contributions sum to the forward output") {
    FnoConfig c = small_cfg();
    MscaleParams ms = init_mscale(c, 4, {1.0, 5.0, 10.0, 20.0}, 42);
    auto in = make_inputs(21, 10);
    Tensor out = mscale_apply(ms, column(in.x), column(in.a));
    auto parts = branch_contributions(ms, column(in.x), column(in.a));
    REQUIRE(parts.size() == 4);
    for (std::size_t j = 0; j < out.numel(); ++j) {
        double s = 0.0;
        for (const auto& p : parts) s += p.data[j];
        CHECK(out.data[j] == doctest::Approx(s).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("mscale_apply matches the loop reference") {
    FnoConfig c = small_cfg();
    MscaleParams ms = init_mscale(c, 2, {1.0, 8.0}, 43);
    auto in = make_inputs(19, 11);
    Tensor out = mscale_apply(ms, column(in.x), column(in.a));
    auto expected = testutil::reference_mscale(ms, in.x, in.a);
    for (std::size_t j = 0; j < out.numel(); ++j)
        CHECK(out.data[j] == doctest::Approx(expected[j]).epsilon(1e-10).scale(1.0));
}

TEST_CASE("output is linear in the combination weights") {
    FnoConfig c = small_cfg();
    MscaleParams ms = init_mscale(c, 2, {1.0, 3.0}, 44);
    auto in = make_inputs(13, 12);
    Tensor base = mscale_apply(ms, column(in.x), column(in.a));
    for (double& g : ms.weights.data) g *= 2.5;
    Tensor scaled = mscale_apply(ms, column(in.x), column(in.a));
    for (std::size_t j = 0; j < base.numel(); ++j)
        CHECK(scaled.data[j] == doctest::Approx(2.5 * base.data[j]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("finite differences confirm the gradient with respect to a scale c_i") {
    FnoConfig c = small_cfg();
    MscaleParams ms = init_mscale(c, 2, {1.0, 2.0}, 45);
    auto in = make_inputs(12, 13);

    auto eval = [&](double* analytic_c0) {
        Graph g;
        MscaleLeaves leaves = insert_leaves(g, ms);
        NodeId u = mscale_forward(g, ms, leaves, g.constant(column(in.x)),
                                  g.constant(column(in.a)));
        NodeId loss = g.sum(g.mul(u, u));
        if (analytic_c0) {
            g.backward(loss);
            *analytic_c0 = g.grad(leaves.scales).data[0];
        }
        return g.value(loss).data[0];
    };

    double analytic = 0.0;
    eval(&analytic);
    const double fd = testutil::central_diff([&] { return eval(nullptr); }, ms.scales.data[0]);
    CHECK(analytic == doctest::Approx(fd).epsilon(1e-5).scale(1e-3));
}

TEST_CASE("parameter counts: N branches plus 2N scale/weight entries") {
    FnoConfig c;
    c.d_v = 16;
    c.k_max = 500;
    c.T = 1;
    CHECK(mscale_count(c, 8) == 1'035'544);
    c.T = 4;
    CHECK(mscale_count(c, 8) == 4'127'128);

    MscaleParams ms = init_mscale(small_cfg(), 3, {1.0, 2.0, 3.0}, 46);
    std::size_t enumerated = 0;
    for (const auto& sec : ms.sections()) enumerated += sec.tensor->numel();
    CHECK(enumerated == mscale_count(small_cfg(), 3));
    CHECK(ms.param_count() == mscale_count(small_cfg(), 3));
}

TEST_CASE("branches start from independent parameters; gammas start at 1/N") {
    MscaleParams ms = init_mscale(small_cfg(), 4, {1.0, 2.0, 3.0, 4.0}, 47);
    CHECK(ms.branches[0].lift_ax.data != ms.branches[1].lift_ax.data);
    CHECK(ms.branches[1].layers[0].w.data != ms.branches[2].layers[0].w.data);
    for (double g : ms.weights.data) CHECK(g == doctest::Approx(0.25));
    CHECK(ms.scales.data == std::vector<double>{1.0, 2.0, 3.0, 4.0});
}

TEST_CASE("an eight-branch scale preset loads from config text") {
    const std::string text =
        "[model]\n"
        "kind = mscale-fno\n"
        "d_v = 4\n"
        "k_max = 6\n"
        "layers = 1\n"
        "branches = 8\n"
        "scales = 1, 40, 80, 100, 120, 140, 180, 200\n"
        "[train]\n"
        "epochs = 1\n"
        "seed = 5\n"
        "[data]\n"
        "path = unused\n"
        "[output]\n"
        "dir = unused\n";
    ExperimentConfig cfg = parse_experiment_config(text);
    CHECK(cfg.branches == 8);
    CHECK(cfg.initial_scales ==
          std::vector<double>{1, 40, 80, 100, 120, 140, 180, 200});
    CHECK(cfg.fno.activation == Activation::Sine);  // mscale default

    Model m = build_model(cfg);
    REQUIRE(m.is_mscale());
    const auto& ms = std::get<MscaleParams>(m.params);
    CHECK(ms.scales.data[5] == 140.0);
}

TEST_CASE("initial_scales length must match the branch count") {
    CHECK_THROWS_AS((void)init_mscale(small_cfg(), 3, {1.0, 2.0}, 48), config_error);
}
