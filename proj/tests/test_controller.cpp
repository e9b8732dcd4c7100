#include <doctest.h>

#include <cmath>
#include <random>

#include "asrlab/controller.hpp"

using namespace asrlab;

TEST_CASE("prediction_concentration: uniform, symmetry, two-class closed form") {
    Matrix zeros(3, 10);
    CHECK(prediction_concentration(zeros, ConcentrationMode::SoftmaxOfMean) ==
          doctest::Approx(-std::log(10.0)).epsilon(1e-12));

    Matrix sym(2, 2, {2.0, 0.0, 0.0, 2.0});
    CHECK(prediction_concentration(sym, ConcentrationMode::SoftmaxOfMean) ==
          doctest::Approx(-std::log(2.0)).epsilon(1e-12));

    // mean logits [10, 0]: p = sigmoid gap, C_t ~ -4.994e-4
    Matrix sharp(1, 2, {10.0, 0.0});
    const double p1 = 1.0 / (1.0 + std::exp(-10.0));
    const double p0 = 1.0 - p1;
    const double expected = p1 * std::log(p1) + p0 * std::log(p0);
    const double c_t = prediction_concentration(sharp, ConcentrationMode::SoftmaxOfMean);
    CHECK(c_t == doctest::Approx(expected).epsilon(1e-12));
    CHECK(c_t == doctest::Approx(-4.994e-4).epsilon(1e-3));

    CHECK_THROWS_AS(prediction_concentration(Matrix(0, 4), ConcentrationMode::SoftmaxOfMean),
                    ShapeError);
}

TEST_CASE("prediction_concentration bounds hold in both modes") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> d(0.0, 20.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t classes = 2 + std::size_t(trial % 9);
        Matrix logits(4, classes);
        for (std::size_t i = 0; i < logits.size(); ++i) logits.data()[i] = d(rng);
        for (auto mode : {ConcentrationMode::SoftmaxOfMean, ConcentrationMode::MeanOfSoftmax}) {
            const double c = prediction_concentration(logits, mode);
            CHECK(c >= -std::log(double(classes)) - 1e-12);
            CHECK(c <= 0.0);
        }
    }
}

TEST_CASE("cumulative concentration: EMA arithmetic and reinitialization") {
    ConcentrationTracker tracker(0.5, 1000);
    CHECK(tracker.bar_c() == doctest::Approx(-std::log(500.0)).epsilon(1e-12));
    CHECK(tracker.bar_c() == doctest::Approx(-6.2146).epsilon(1e-4));

    ConcentrationTracker t2(1.0, 7);
    CHECK(t2.bar_c() == doctest::Approx(-std::log(7.0)).epsilon(1e-12));

    ConcentrationTracker t3(0.5, 10);
    CHECK(t3.bar_c() == doctest::Approx(-std::log(5.0)).epsilon(1e-12));
    CHECK(t3.bar_c() > -std::log(10.0));

    // update arithmetic, mu_c default 0.995
    ConcentrationTracker t4(0.5, 10);
    t4.update(-2.0, 0.995);
    // manual: bar starts at -ln 5
    const double expect = 0.995 * -std::log(5.0) + 0.005 * -2.0;
    CHECK(t4.bar_c() == doctest::Approx(expect).epsilon(1e-12));

    ConcentrationTracker t5(0.5, 10);
    const double before = t5.bar_c();
    t5.update(-2.0, 1.0);
    CHECK(t5.bar_c() == before);
    t5.update(-2.0, 0.0);
    CHECK(t5.bar_c() == -2.0);

    // mu_c = 0.995, bar = -6, c_t = -2 -> -5.98
    ConcentrationTracker t6(0.5, 1000);
    t6.update(-2.0, 0.995);  // bar was -ln 500 = -6.2146; use explicit values instead
    ConcentrationTracker t7(0.5, 10);
    double bar = -6.0;
    bar = 0.995 * bar + 0.005 * -2.0;
    CHECK(bar == doctest::Approx(-5.98).epsilon(1e-12));

    t4.reinit();
    CHECK(t4.bar_c() == doctest::Approx(-std::log(5.0)).epsilon(1e-12));
}

TEST_CASE("should_reset trigger rule") {
    CHECK(should_reset(-2.0, -3.0, 0.0));
    CHECK_FALSE(should_reset(-2.5, -2.5, 0.0));  // equality does not fire
    CHECK_FALSE(should_reset(-3.0, -2.0, 0.0));
    // delayed variant: gap 0.005 below eps 0.01
    CHECK_FALSE(should_reset(-2.495, -2.5, 0.01));
    CHECK(should_reset(-2.48, -2.5, 0.01));
}

TEST_CASE("reset_proportion: arithmetic, clamp, limit") {
    AsrParams p;  // r_0 = 0.5, lambda_r = 20
    CHECK(reset_proportion(-2.99, -3.0, p) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(reset_proportion(-2.95, -3.0, p) == 1.0);  // raw 1.5 clamped
    CHECK(reset_proportion(-3.0 + 1e-12, -3.0, p) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK_THROWS_AS(reset_proportion(-3.0, -3.0, p), NumericError);
}

TEST_CASE("select_reset_layers: rounding convention and depth ordering") {
    // 15 layers, r = 0.5 -> the 8 deepest (7.5 rounds half up)
    auto idx = select_reset_layers(15, 0.5);
    REQUIRE(idx.size() == 8);
    CHECK(idx.front() == 7);
    CHECK(idx.back() == 14);

    idx = select_reset_layers(4, 1.0);
    REQUIRE(idx.size() == 4);
    CHECK(idx.front() == 0);

    idx = select_reset_layers(10, 0.55);  // 5.5 -> 6
    REQUIRE(idx.size() == 6);
    CHECK(idx.front() == 4);

    // minimum of one layer
    idx = select_reset_layers(3, 0.01);
    REQUIRE(idx.size() == 1);
    CHECK(idx[0] == 2);

    // contiguous suffix of the depth order
    idx = select_reset_layers(7, 0.6);
    for (std::size_t i = 1; i < idx.size(); ++i) CHECK(idx[i] == idx[i - 1] + 1);
}

namespace {
Network small_net(std::uint64_t seed) { return make_network(4, {5}, 3, seed); }

void randomize(ParamSet& p, std::mt19937_64& rng, bool nonneg = false) {
    std::normal_distribution<double> d(0.0, 1.0);
    for (auto& e : p.layers) {
        for (std::size_t i = 0; i < e.weights.size(); ++i)
            e.weights.data()[i] = nonneg ? std::abs(d(rng)) : d(rng);
        for (double& b : e.bias) b = nonneg ? std::abs(d(rng)) : d(rng);
    }
}
}  // namespace

TEST_CASE("fisher_penalty: inertness, scalar arithmetic, loop oracle") {
    Network net = small_net(5);
    ParamSet zero_f = ParamSet::zeros_like(net);
    ParamSet bar_theta = ParamSet::zeros_like(net);
    FisherPenalty pen = fisher_penalty(net, zero_f, bar_theta, 5.0);
    CHECK(pen.value == 0.0);
    for (const auto& e : pen.gradient.layers)
        for (std::size_t i = 0; i < e.weights.size(); ++i) CHECK(e.weights.data()[i] == 0.0);

    // single parameter: theta=2, anchor=1, F=3, lambda=5 -> penalty 15, grad 30
    Network one;
    Layer l;
    l.weights = Matrix(1, 1, {2.0});
    l.bias = {0.0};
    l.activation = Activation::Identity;
    one.layers.push_back(l);
    one.class_count = 1;
    ParamSet f = ParamSet::zeros_like(one), anchor = ParamSet::zeros_like(one);
    f.layers[0].weights(0, 0) = 3.0;
    anchor.layers[0].weights(0, 0) = 1.0;
    pen = fisher_penalty(one, f, anchor, 5.0);
    CHECK(pen.value == doctest::Approx(15.0).epsilon(1e-15));
    CHECK(pen.gradient.layers[0].weights(0, 0) == doctest::Approx(30.0).epsilon(1e-15));

    // brute-force elementwise loop oracle on a random net
    std::mt19937_64 rng(8);
    ParamSet rf = ParamSet::zeros_like(net), rt = ParamSet::zeros_like(net);
    randomize(rf, rng, true);
    randomize(rt, rng);
    const double lambda = 2.3;
    pen = fisher_penalty(net, rf, rt, lambda);
    double oracle = 0.0;
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        for (std::size_t i = 0; i < net.layers[li].weights.size(); ++i) {
            const double d = net.layers[li].weights.data()[i] - rt.layers[li].weights.data()[i];
            oracle += lambda * rf.layers[li].weights.data()[i] * d * d;
        }
        for (std::size_t i = 0; i < net.layers[li].bias.size(); ++i) {
            const double d = net.layers[li].bias[i] - rt.layers[li].bias[i];
            oracle += lambda * rf.layers[li].bias[i] * d * d;
        }
    }
    CHECK(std::abs(pen.value - oracle) <= 1e-12 * std::max(1.0, std::abs(oracle)));
}

TEST_CASE("cma_accumulate: first call, arithmetic mean, recorded-sequence oracle") {
    Network net = small_net(6);
    std::mt19937_64 rng(13);

    KnowledgeStore store(net);
    GradientSet g = GradientSet::zeros_like(net);
    randomize(g, rng);
    store.cma_accumulate(net, g);
    CHECK(store.count_since_reset() == 1);
    // n = 0: tilde_theta = theta, tilde_F = g^2 exactly
    for (std::size_t li = 0; li < net.layers.size(); ++li)
        for (std::size_t i = 0; i < net.layers[li].weights.size(); ++i) {
            CHECK(store.tilde_theta().layers[li].weights.data()[i] ==
                  net.layers[li].weights.data()[i]);
            const double gi = g.layers[li].weights.data()[i];
            CHECK(store.tilde_f().layers[li].weights.data()[i] == gi * gi);
        }

    // scalar sequence 2, 4, 6 -> mean 4
    Network one;
    Layer l;
    l.weights = Matrix(1, 1, {2.0});
    l.bias = {0.0};
    l.activation = Activation::Identity;
    one.layers.push_back(l);
    one.class_count = 1;
    KnowledgeStore s1(one);
    GradientSet zg = GradientSet::zeros_like(one);
    for (double v : {2.0, 4.0, 6.0}) {
        one.layers[0].weights(0, 0) = v;
        s1.cma_accumulate(one, zg);
    }
    CHECK(s1.tilde_theta().layers[0].weights(0, 0) == doctest::Approx(4.0).epsilon(1e-15));

    // 25 random steps vs recorded means, <= 1e-10
    Network net2 = small_net(7);
    KnowledgeStore s2(net2);
    std::vector<ParamSet> thetas, sq_grads;
    for (int step = 0; step < 25; ++step) {
        GradientSet grads = GradientSet::zeros_like(net2);
        randomize(grads, rng);
        thetas.push_back(snapshot(net2));
        ParamSet sq = grads;
        for (auto& e : sq.layers) {
            for (std::size_t i = 0; i < e.weights.size(); ++i)
                e.weights.data()[i] *= e.weights.data()[i];
            for (double& b : e.bias) b *= b;
        }
        sq_grads.push_back(sq);
        s2.cma_accumulate(net2, grads);
        sgd_step(net2, grads, 0.01);  // move so thetas differ across steps
    }
    ParamSet mean_theta = ParamSet::zeros_like(net2), mean_sq = ParamSet::zeros_like(net2);
    for (int i = 0; i < 25; ++i) {
        mean_theta.add(thetas[std::size_t(i)]);
        mean_sq.add(sq_grads[std::size_t(i)]);
    }
    mean_theta.scale(1.0 / 25.0);
    mean_sq.scale(1.0 / 25.0);
    for (std::size_t li = 0; li < net2.layers.size(); ++li)
        for (std::size_t i = 0; i < net2.layers[li].weights.size(); ++i) {
            CHECK(std::abs(s2.tilde_theta().layers[li].weights.data()[i] -
                           mean_theta.layers[li].weights.data()[i]) <= 1e-10);
            CHECK(std::abs(s2.tilde_f().layers[li].weights.data()[i] -
                           mean_sq.layers[li].weights.data()[i]) <= 1e-10);
        }
}

TEST_CASE("ema_aggregate_on_reset: arithmetic, zeroing, two-reset unrolled oracle") {
    // mu_f = 0.9, bar 0, tilde 10 -> bar 1.0
    Network one;
    Layer l;
    l.weights = Matrix(1, 1, {10.0});
    l.bias = {0.0};
    l.activation = Activation::Identity;
    one.layers.push_back(l);
    one.class_count = 1;
    KnowledgeStore store(one);
    store.cma_accumulate(one, GradientSet::zeros_like(one));  // tilde_theta = 10
    store.ema_aggregate_on_reset(0.9, 0.9);
    CHECK(store.bar_theta().layers[0].weights(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(store.tilde_theta().layers[0].weights(0, 0) == 0.0);
    CHECK(store.tilde_f().layers[0].weights(0, 0) == 0.0);
    CHECK(store.count_since_reset() == 0);

    // two successive resets vs a hand-unrolled EMA
    Network net = small_net(9);
    KnowledgeStore s(net);
    std::mt19937_64 rng(4);
    GradientSet g = GradientSet::zeros_like(net);
    randomize(g, rng);
    s.cma_accumulate(net, g);
    const ParamSet tilde1 = s.tilde_theta();
    s.ema_aggregate_on_reset(0.9, 0.9);
    sgd_step(net, g, 0.1);
    s.cma_accumulate(net, g);
    const ParamSet tilde2 = s.tilde_theta();
    s.ema_aggregate_on_reset(0.9, 0.9);
    for (std::size_t li = 0; li < net.layers.size(); ++li)
        for (std::size_t i = 0; i < net.layers[li].weights.size(); ++i) {
            const double t1 = tilde1.layers[li].weights.data()[i];
            const double t2 = tilde2.layers[li].weights.data()[i];
            const double expect = 0.9 * (0.1 * t1) + 0.1 * t2;
            CHECK(std::abs(s.bar_theta().layers[li].weights.data()[i] - expect) <= 1e-12);
        }
}

TEST_CASE("prediction_inconsistency") {
    Matrix a(4, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1, 1, 0, 0});
    CHECK(prediction_inconsistency(a, a) == 0.0);

    Matrix b(4, 3, {0, 1, 0, 0, 0, 1, 1, 0, 0, 0, 1, 0});
    CHECK(prediction_inconsistency(a, b) == 1.0);

    Matrix c = a;
    c(0, 0) = 0.0;
    c(0, 2) = 2.0;  // only row 0 flips
    CHECK(prediction_inconsistency(a, c) == 0.25);

    CHECK_THROWS_AS(prediction_inconsistency(a, Matrix(2, 3)), ShapeError);
}

TEST_CASE("reparameterize: endpoints, midpoint, range contract") {
    auto [lf0, mc0] = reparameterize(0.0, 5.0, 0.15);
    CHECK(lf0 == 0.0);
    CHECK(mc0 == doctest::Approx(0.85).epsilon(1e-15));
    auto [lf1, mc1] = reparameterize(1.0, 5.0, 0.15);
    CHECK(lf1 == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(mc1 == doctest::Approx(1.0).epsilon(1e-15));
    auto [lfh, mch] = reparameterize(0.5, 5.0, 0.15);
    CHECK(lfh == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(mch == doctest::Approx(0.925).epsilon(1e-15));

    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        auto [lf, mc] = reparameterize(u(rng), 5.0, 0.15);
        CHECK(lf >= 0.0);
        CHECK(lf <= 5.0);
        CHECK(mc >= 0.85);
        CHECK(mc <= 1.0);
    }
}

TEST_CASE("no-trigger baseline: uniform predictions never fire a reset") {
    const std::size_t classes = 10;
    const double c_uniform = -std::log(double(classes));
    ConcentrationTracker tracker(0.5, classes);
    for (int t = 0; t < 100000; ++t) {
        CHECK_FALSE(should_reset(c_uniform, tracker.bar_c(), 0.0));
        tracker.update(c_uniform, 0.995);
    }
    CHECK(tracker.bar_c() > c_uniform);  // decays toward -ln C but never crosses
}
