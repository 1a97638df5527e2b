#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stemvine/eval.hpp"
#include "stemvine/oracle.hpp"
#include "stemvine/train.hpp"

#include "generators.hpp"

using namespace stemvine;

namespace {

StemVineNetwork residual_template() {
    StemVineNetwork net;
    net.stem.push_back(WeightSlot{2, 8, NormProfile{1.0, 1.0, std::nullopt}});
    net.stem.push_back(NonlinSlot{8, Nonlinearity::relu()});
    net.stem.push_back(WeightSlot{8, 8, NormProfile{1.0, 1.0, std::nullopt}});
    net.stem.push_back(NonlinSlot{8, Nonlinearity::relu()});
    net.stem.push_back(WeightSlot{8, 2, NormProfile{1.0, 1.0, std::nullopt}});
    net.stem.push_back(NonlinSlot{2, Nonlinearity::identity()});
    net.vines.push_back(Vine{3, 5, 1, {}});
    return net;
}

}  // namespace

TEST_CASE("zero epochs returns the initialization with zero distances") {
    const LabeledDataset d = make_blobs(20, 2, 2, 0.3, 1);
    TrainConfig cfg;
    cfg.epochs = 0;
    cfg.seed = 4;
    const TrainResult r = train_tiny(residual_template(), d, cfg);
    for (const auto& [id, W] : r.weights) CHECK(W == r.references.at(id));
    for (const auto& ref : weight_slots(r.net)) CHECK(ref.slot->profile.b == 0.0);
    CHECK(std::isfinite(r.final_loss));
}

TEST_CASE("gradients match central finite differences") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        auto toy = generators::random_toy_net(seed, /*train_safe=*/true);
        const std::size_t n0 = vertex_dim(toy.net, 1);
        const std::uint32_t k =
            static_cast<std::uint32_t>(vertex_dim(toy.net, vertex_count(toy.net)));
        LabeledDataset d;
        d.X = generators::random_inputs(seed + 31, 6, n0);
        d.labels.resize(6);
        CounterRng rng(seed + 97);
        for (auto& y : d.labels) y = 1 + static_cast<std::uint32_t>(rng.below(k));
        d.k = k;
        const double wd = 0.05;

        const WeightMap analytic = training_gradient(toy.net, toy.weights, d, wd);
        const double h = 1e-5;
        for (auto& [id, W] : toy.weights) {
            for (std::size_t i = 0; i < W.data().size(); ++i) {
                const double keep = W.data()[i];
                W.data()[i] = keep + h;
                const double up = training_loss(toy.net, toy.weights, d, wd);
                W.data()[i] = keep - h;
                const double down = training_loss(toy.net, toy.weights, d, wd);
                W.data()[i] = keep;
                const double fd = (up - down) / (2.0 * h);
                const double an = analytic.at(id).data()[i];
                CHECK(std::abs(fd - an) <= 1e-4 * std::max({std::abs(fd), std::abs(an), 1e-3}));
            }
        }
    }
}

TEST_CASE("strong weight decay shrinks the weights") {
    const LabeledDataset d = make_blobs(40, 2, 2, 0.3, 2);
    TrainConfig plain;
    plain.epochs = 30;
    plain.seed = 8;
    plain.learning_rate = 1e-4;  // keeps lr * wd contractive at wd = 1000
    TrainConfig decayed = plain;
    decayed.weight_decay = 1000.0;
    const TrainResult base = train_tiny(residual_template(), d, plain);
    const TrainResult shrunk = train_tiny(residual_template(), d, decayed);
    for (const auto& [id, W] : base.weights) {
        CHECK(frobenius_norm(shrunk.weights.at(id)) < frobenius_norm(W));
    }
}

TEST_CASE("separable blobs train to low error") {
    const LabeledDataset d = make_blobs(200, 2, 2, 0.25, 3);
    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.seed = 3;
    cfg.weight_decay = 1e-3;
    const TrainResult r = train_tiny(residual_template(), d, cfg);
    CHECK(zero_one_error(r.net, r.weights, d) <= 0.1);
}

TEST_CASE("training is deterministic") {
    const LabeledDataset d = make_blobs(30, 2, 2, 0.3, 6);
    TrainConfig cfg;
    cfg.epochs = 10;
    cfg.seed = 12;
    const TrainResult a = train_tiny(residual_template(), d, cfg);
    const TrainResult b = train_tiny(residual_template(), d, cfg);
    for (const auto& [id, W] : a.weights) CHECK(W == b.weights.at(id));
    CHECK(a.final_loss == b.final_loss);
}

TEST_CASE("divergence raises TrainError") {
    const LabeledDataset d = make_blobs(20, 2, 2, 0.3, 7);
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.seed = 7;
    cfg.learning_rate = 1e12;
    CHECK_THROWS_AS(train_tiny(residual_template(), d, cfg), TrainError);
}

TEST_CASE("unsupported shapes are rejected") {
    const LabeledDataset d = make_blobs(10, 2, 2, 0.3, 8);
    StemVineNetwork tanh_net;
    tanh_net.stem.push_back(WeightSlot{2, 2, NormProfile{1.0, 1.0, std::nullopt}});
    tanh_net.stem.push_back(NonlinSlot{2, Nonlinearity::tanh()});
    CHECK_THROWS_AS(train_tiny(tanh_net, d, TrainConfig{}), UnsupportedError);

    StemVineNetwork wide;
    wide.stem.push_back(WeightSlot{2, 64, NormProfile{1.0, 1.0, std::nullopt}});
    wide.stem.push_back(NonlinSlot{64, Nonlinearity::relu()});
    wide.stem.push_back(WeightSlot{64, 2, NormProfile{1.0, 1.0, std::nullopt}});
    wide.stem.push_back(NonlinSlot{2, Nonlinearity::identity()});
    CHECK_THROWS_AS(train_tiny(wide, d, TrainConfig{}), TrainError);

    StemVineNetwork deep;
    for (int i = 0; i < 7; ++i) {
        deep.stem.push_back(WeightSlot{2, 2, NormProfile{1.0, 1.0, std::nullopt}});
        deep.stem.push_back(NonlinSlot{2, Nonlinearity::relu()});
    }
    CHECK_THROWS_AS(train_tiny(deep, d, TrainConfig{}), TrainError);
}

TEST_CASE("trained profiles are the measured norms") {
    const LabeledDataset d = make_blobs(30, 2, 2, 0.3, 11);
    TrainConfig cfg;
    cfg.epochs = 15;
    cfg.seed = 11;
    const TrainResult r = train_tiny(residual_template(), d, cfg);
    for (const auto& ref : weight_slots(r.net)) {
        const Matrix& W = r.weights.at(ref.id);
        const Matrix& init = r.references.at(ref.id);
        CHECK(ref.slot->profile.s == doctest::Approx(spectral_norm(W)).epsilon(1e-12));
        CHECK(ref.slot->profile.b ==
              doctest::Approx(norm_2_1_of_transpose(sub(W, init))).epsilon(1e-12));
        REQUIRE(ref.slot->profile.reference.has_value());
        CHECK(*ref.slot->profile.reference == init);
    }
}
