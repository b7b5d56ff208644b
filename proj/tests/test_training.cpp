#include <cmath>
#include <vector>

#include <doctest.h>

#include "msfno/errors.hpp"
#include "msfno/rng.hpp"
#include "msfno/training.hpp"
#include "test_helpers.hpp"

using namespace msfno;

namespace {

FnoConfig tiny_cfg() {
    FnoConfig c;
    c.d_v = 4;
    c.k_max = 4;
    c.T = 1;
    return c;
}

/// Small synthetic pointwise dataset u = sin(3 a) on a 33-point grid.
SampleSet tiny_dataset(std::size_t n_train, std::size_t n_val, std::size_t n_test,
                       std::uint64_t seed) {
    SampleSet set;
    const std::size_t n = 33;
    set.grid.resize(n);
    for (std::size_t j = 0; j < n; ++j) set.grid[j] = -1.0 + 2.0 * double(j) / double(n - 1);
    const std::size_t total = n_train + n_val + n_test;
    for (std::size_t i = 0; i < total; ++i) {
        SplitMix64 rng(derive_seed(seed, i));
        Tensor a = Tensor::from_vector(testutil::random_vector(n, rng));
        Tensor u = Tensor::zeros({n});
        for (std::size_t j = 0; j < n; ++j) u.data[j] = std::sin(3.0 * a.data[j]);
        set.inputs.push_back(std::move(a));
        set.targets.push_back(std::move(u));
    }
    for (std::size_t i = 0; i < n_train; ++i) set.train_idx.push_back(i);
    for (std::size_t i = 0; i < n_val; ++i) set.val_idx.push_back(n_train + i);
    for (std::size_t i = 0; i < n_test; ++i) set.test_idx.push_back(n_train + n_val + i);
    return set;
}

TrainConfig quick_train(std::size_t epochs, std::uint64_t seed, std::size_t batch = 4) {
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.seed = seed;
    cfg.batch_size = batch;
    return cfg;
}

}  // namespace

TEST_CASE("relative_l2 matches hand values") {
    Tensor t1 = Tensor::from_vector({1.0, 0.0});
    Tensor p1 = Tensor::from_vector({1.0, 1.0});
    CHECK(relative_l2(p1, t1) == doctest::Approx(1.0));

    Tensor t2 = Tensor::from_vector({3.0, 4.0});
    CHECK(relative_l2(t2, t2) == doctest::Approx(0.0));
    Tensor p2 = Tensor::from_vector({6.0, 8.0});
    CHECK(relative_l2(p2, t2) == doctest::Approx(1.0));  // ||t||/||t||

    CHECK_THROWS_AS((void)relative_l2(p1, Tensor::from_vector({0.0, 0.0})), numeric_error);
}

TEST_CASE("relative_l2_node agrees with the scalar version and differentiates") {
    SplitMix64 rng(3);
    Tensor target = Tensor::from_vector(testutil::random_vector(7, rng));
    std::vector<double> pv = testutil::random_vector(7, rng);

    auto eval = [&](std::vector<double>* grad) {
        Graph g;
        NodeId p = g.leaf(Tensor::from_vector(pv));
        NodeId loss = relative_l2_node(g, p, target);
        if (grad) {
            g.backward(loss);
            *grad = g.grad(p).data;
        }
        return g.value(loss).data[0];
    };

    std::vector<double> analytic;
    const double val = eval(&analytic);
    CHECK(val == doctest::Approx(relative_l2(Tensor::from_vector(pv), target)).epsilon(1e-13));
    for (std::size_t i = 0; i < pv.size(); i += 2) {
        const double fd = testutil::central_diff([&] { return eval(nullptr); }, pv[i]);
        CHECK(analytic[i] == doctest::Approx(fd).epsilon(1e-6).scale(1e-3));
    }
}

TEST_CASE("adam: zero gradient leaves parameters fixed but advances time") {
    std::vector<double> params{1.0, -2.0};
    std::vector<double> grads{0.0, 0.0};
    AdamState state(2);
    TrainConfig cfg = quick_train(1, 0);
    adam_step(params, grads, state, cfg, {});
    CHECK(params == std::vector<double>{1.0, -2.0});
    CHECK(state.t == 1);
}

TEST_CASE("adam: first step moves each weight by ~lr against the gradient sign") {
    std::vector<double> params{0.5, -0.5, 2.0};
    std::vector<double> grads{0.3, -0.7, 1e-3};
    AdamState state(3);
    TrainConfig cfg = quick_train(1, 0);
    cfg.learning_rate = 0.01;
    adam_step(params, grads, state, cfg, {});
    // bias-corrected first step: delta = -lr * g / (|g| + eps') ~= -lr * sign(g)
    CHECK(params[0] == doctest::Approx(0.5 - 0.01).epsilon(1e-6));
    CHECK(params[1] == doctest::Approx(-0.5 + 0.01).epsilon(1e-6));
    CHECK(params[2] < 2.0);
}

TEST_CASE("adam rejects non-finite gradients and names the section") {
    std::vector<double> params{0.0, 0.0};
    std::vector<double> grads{0.0, std::nan("")};
    AdamState state(2);
    Tensor a = Tensor::from_vector({0.0});
    Tensor b = Tensor::from_vector({0.0});
    std::vector<ParamSection> sections{{"lift.b", &a}, {"layer0.w", &b}};
    TrainConfig cfg = quick_train(1, 0);
    CHECK_THROWS_WITH_AS(adam_step(params, grads, state, cfg, sections),
                         doctest::Contains("layer0.w"), numeric_error);
}

TEST_CASE("zero epochs returns the model unchanged with no records") {
    SampleSet data = tiny_dataset(4, 2, 2, 1);
    Model model = Model::make_fno(init_params(tiny_cfg(), 5));
    std::vector<double> before = flatten_params(model);
    TrainResult r = train(model, data, quick_train(0, 7));
    CHECK(r.records.empty());
    CHECK(flatten_params(r.final_model) == before);
}

TEST_CASE("training is bitwise deterministic in (seed, data, config)") {
    SampleSet data = tiny_dataset(8, 2, 2, 2);
    auto run = [&] {
        Model model = Model::make_fno(init_params(tiny_cfg(), 11));
        return train(std::move(model), data, quick_train(5, 13));
    };
    TrainResult a = run(), b = run();
    CHECK(flatten_params(a.final_model) == flatten_params(b.final_model));
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].train_loss == b.records[i].train_loss);
        CHECK(a.records[i].val_err == b.records[i].val_err);
        CHECK(a.records[i].test_err == b.records[i].test_err);
    }
}

TEST_CASE("one record per epoch; epochs numbered from 1") {
    SampleSet data = tiny_dataset(4, 2, 2, 3);
    Model model = Model::make_fno(init_params(tiny_cfg(), 17));
    TrainResult r = train(std::move(model), data, quick_train(3, 19));
    REQUIRE(r.records.size() == 3);
    CHECK(r.records.front().epoch == 1);
    CHECK(r.records.back().epoch == 3);
    for (const auto& rec : r.records) CHECK(rec.seconds >= 0.0);
}

TEST_CASE("full-batch epoch 1 train loss equals the pre-step dataset loss") {
    SampleSet data = tiny_dataset(6, 2, 2, 4);
    Model model = Model::make_fno(init_params(tiny_cfg(), 23));
    const double before = evaluate_split(model, data, data.train_idx);
    TrainResult r = train(std::move(model), data, quick_train(1, 29, /*batch=*/6));
    CHECK(r.records[0].train_loss == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("best-validation tracking never reports worse than the final epoch") {
    SampleSet data = tiny_dataset(8, 4, 2, 5);
    Model model = Model::make_fno(init_params(tiny_cfg(), 31));
    TrainResult r = train(std::move(model), data, quick_train(6, 37));
    double min_val = r.records[0].val_err;
    for (const auto& rec : r.records) min_val = std::min(min_val, rec.val_err);
    CHECK(r.best_val_err == doctest::Approx(min_val));
    CHECK(r.best_val_err <= r.records.back().val_err + 1e-15);
    CHECK(evaluate_split(r.best_model, data, data.val_idx) ==
          doctest::Approx(r.best_val_err).epsilon(1e-12));
}

TEST_CASE("loss usually decreases over a short run") {
    int improved = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SampleSet data = tiny_dataset(8, 2, 2, 100 + seed);
        Model model = Model::make_fno(init_params(tiny_cfg(), 200 + seed));
        TrainResult r = train(std::move(model), data, quick_train(8, seed));
        if (r.records.back().train_loss < r.records.front().train_loss) ++improved;
    }
    CHECK(improved >= 8);
}

TEST_CASE("train config validation") {
    TrainConfig cfg = quick_train(1, 0);
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(cfg.validate(), config_error);
    cfg = quick_train(1, 0);
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), config_error);
}
