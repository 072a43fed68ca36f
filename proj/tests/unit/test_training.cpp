#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fiinet/training/trainer.hpp"
#include "helpers.hpp"

using namespace fiinet;
using namespace fiinet::training;
using fiinet::engine::GradientStore;
using fiinet::engine::ParameterStore;
using fiinet::engine::Rng;
using fiinet::engine::Shape;
using fiinet::engine::Tensor;
using fiinet::ingest::EncodedExample;
using testutil::error_category;
using testutil::error_message;

namespace {

double pairwise_auc(const std::vector<double>& s, const std::vector<int>& y) {
    double wins = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.size(); ++j)
            if (y[i] == 1 && y[j] == 0) {
                pairs += 1.0;
                wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
            }
    return wins / pairs;
}

// Label is 1 exactly when field 0 takes one of its upper values.
std::vector<EncodedExample> separable(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<EncodedExample> out(n);
    for (auto& e : out) {
        e.indices = {static_cast<std::int32_t>(1 + rng.below(6)), static_cast<std::int32_t>(1 + rng.below(4))};
        e.label = e.indices[0] > 3 ? 1 : 0;
    }
    return out;
}

std::vector<ingest::FieldSchema> separable_schema() { return {{"a", 0, 7}, {"b", 1, 5}}; }

}  // namespace

TEST_SUITE("training") {

TEST_CASE("adam: zero gradient and zero decay leave parameters unchanged") {
    ParameterStore<double> p;
    p.add("w", testutil::random_tensor({3, 2}, 1));
    const auto before = p[0];
    GradientStore<double> g(p);
    AdamState<double> s(p);
    AdamConfig cfg;
    cfg.weight_decay = 0.0;
    for (int i = 0; i < 5; ++i) adam_step(p, g, s, cfg);
    CHECK(p[0] == before);
    CHECK(s.step == 5);
}

TEST_CASE("adam: first step moves by the learning rate") {
    ParameterStore<double> p;
    p.add("w", Tensor<double>({2}, {0.5, -0.5}));
    GradientStore<double> g(p);
    g[0].fill(1.0);
    AdamState<double> s(p);
    AdamConfig cfg;
    cfg.weight_decay = 0.0;
    adam_step(p, g, s, cfg);
    CHECK(p[0][0] == doctest::Approx(0.5 - cfg.learning_rate).epsilon(1e-6));
    CHECK(p[0][1] == doctest::Approx(-0.5 - cfg.learning_rate).epsilon(1e-6));
}

TEST_CASE("adam: decoupled decay skips biases") {
    ParameterStore<double> p;
    p.add("w", Tensor<double>({1}, {2.0}));
    p.add("b", Tensor<double>({1}, {2.0}), false);
    GradientStore<double> g(p);
    AdamState<double> s(p);
    AdamConfig cfg;
    cfg.learning_rate = 0.1;
    cfg.weight_decay = 0.5;
    adam_step(p, g, s, cfg);
    CHECK(p[0][0] == doctest::Approx(2.0 * (1.0 - 0.1 * 0.5)));
    CHECK(p[1][0] == 2.0);
}

TEST_CASE("adam matches a scalar simulation on a quadratic") {
    AdamConfig cfg;
    cfg.learning_rate = 0.01;
    cfg.weight_decay = 1e-3;
    ParameterStore<double> p;
    p.add("theta", Tensor<double>({1}, {1.0}));
    GradientStore<double> g(p);
    AdamState<double> s(p);

    double theta = 1.0, m = 0.0, v = 0.0, prev = 1.0;
    bool monotone = true;
    for (int t = 1; t <= 100; ++t) {
        g.zero();
        g[0][0] = 2.0 * p[0][0];
        adam_step(p, g, s, cfg);

        const double grad = 2.0 * theta;
        theta *= 1.0 - cfg.learning_rate * cfg.weight_decay;
        m = 0.9 * m + 0.1 * grad;
        v = 0.999 * v + 0.001 * grad * grad;
        const double mh = m / (1.0 - std::pow(0.9, t)), vh = v / (1.0 - std::pow(0.999, t));
        theta -= cfg.learning_rate * mh / (std::sqrt(vh) + 1e-8);

        CHECK(p[0][0] == doctest::Approx(theta).epsilon(1e-12));
        monotone = monotone && std::abs(theta) < std::abs(prev);
        prev = theta;
    }
    CHECK(monotone);
    CHECK(std::abs(p[0][0]) < 0.5);
}

TEST_CASE("adam aborts on a non-finite gradient") {
    ParameterStore<double> p;
    p.add("embedding.user", Tensor<double>({2}, {1.0, 1.0}));
    GradientStore<double> g(p);
    g[0][1] = std::nan("");
    AdamState<double> s(p);
    CHECK(error_message([&] { adam_step(p, g, s, AdamConfig{}); }).find("embedding.user") != std::string::npos);
    CHECK(p[0][0] == 1.0);
    CHECK(s.step == 0);
}

TEST_CASE("auc examples") {
    CHECK(roc_auc(std::vector<double>{0.9, 0.8, 0.3}, std::vector<int>{1, 0, 1}) == 0.5);
    CHECK(roc_auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<int>{0, 0, 1, 1}) == 1.0);
    CHECK(roc_auc(std::vector<double>{0.4, 0.4, 0.4, 0.4}, std::vector<int>{0, 1, 0, 1}) == 0.5);
    CHECK(error_message([] { roc_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}); })
              .rfind("AUC undefined", 0) == 0);
}

TEST_CASE("rank auc equals the pairwise oracle") {
    Rng rng(2023);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(999);
        std::vector<double> s(n);
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = static_cast<double>(rng.below(20)) / 20.0;  // coarse grid forces ties
            y[i] = rng.bernoulli(0.4);
        }
        y[0] = 1;
        y[1] = 0;
        worst = std::max(worst, std::abs(roc_auc(s, y) - pairwise_auc(s, y)));
    }
    CHECK(worst < 1e-9);

    std::vector<double> s{0.1, 0.5, 0.3, 0.7, 0.2}, t;
    const std::vector<int> y{0, 1, 0, 1, 1};
    for (double v : s) t.push_back(std::exp(3.0 * v) - 4.0);
    CHECK(roc_auc(s, y) == roc_auc(t, y));
}

TEST_CASE("logloss and the metric log format") {
    CHECK(logloss(std::vector<double>{0.5, 0.5}, std::vector<int>{0, 1}) == doctest::Approx(std::log(2.0)));
    std::ostringstream os;
    write_metric_header(os);
    write_metric_record(os, {3, "valid", 0.75, 0.5, 1.25});
    CHECK(os.str() == "epoch\tsplit\tauc\tlogloss\twall_time\n3\tvalid\t0.750000\t0.500000\t1.250\n");
}

TEST_CASE("evaluation on a single-class split omits AUC") {
    network::ModelConfig mc;
    mc.variant = network::Variant::LR;
    network::Model<double> m(separable_schema(), mc);
    std::vector<EncodedExample> ones(10, EncodedExample{{1, 1}, 1});
    const auto r = evaluate(m, std::span<const EncodedExample>(ones));
    CHECK(std::isnan(r.auc));
    CHECK(r.logloss == doctest::Approx(std::log(2.0)));
}

TEST_CASE("patience zero runs exactly one epoch") {
    network::ModelConfig mc;
    mc.variant = network::Variant::LR;
    network::Model<float> m(separable_schema(), mc);
    TrainConfig tc;
    tc.patience = 0;
    const auto train_set = separable(300, 1), valid_set = separable(100, 2);
    const auto r = train(m, std::span<const EncodedExample>(train_set), std::span<const EncodedExample>(valid_set), tc);
    CHECK(r.epochs_run == 1);
    CHECK(r.best_epoch == 1);
    CHECK(r.history.size() == 2);
}

TEST_CASE("logistic regression learns separable data") {
    network::ModelConfig mc;
    mc.variant = network::Variant::LR;
    network::Model<double> m(separable_schema(), mc);
    TrainConfig tc;
    tc.batch_size = 32;
    tc.max_epochs = 5;
    tc.patience = 10;
    const auto train_set = separable(2000, 3), valid_set = separable(300, 4);
    const auto r = train(m, std::span<const EncodedExample>(train_set), std::span<const EncodedExample>(valid_set), tc);
    REQUIRE(r.epochs_run == 5);
    std::vector<double> losses;
    for (const auto& rec : r.history)
        if (rec.split == "train") losses.push_back(rec.logloss);
    for (std::size_t i = 1; i < losses.size(); ++i) CHECK(losses[i] < losses[i - 1]);
    CHECK(r.best_valid.auc > 0.99);
}

TEST_CASE("training is deterministic and restores the best epoch") {
    network::ModelConfig mc;
    mc.embedding_dim = 4;
    mc.hidden_sizes = {8};
    std::vector<ingest::FieldSchema> schema{{"a", 0, 7}, {"b", 1, 5}, {"c", 2, 5}};
    auto data = separable(600, 5);
    Rng rng(6);
    for (auto& e : data) e.indices.push_back(static_cast<std::int32_t>(1 + rng.below(4)));
    for (std::size_t i = 0; i < data.size(); i += 7) data[i].label ^= 1;  // label noise
    const std::span<const EncodedExample> tr(data.data(), 500), va(data.data() + 500, 100);

    TrainConfig tc;
    tc.batch_size = 64;
    tc.max_epochs = 12;
    tc.patience = 3;
    tc.deterministic = true;

    std::ostringstream log1, log2;
    network::Model<float> m1(schema, mc), m2(schema, mc);
    const auto r1 = train(m1, tr, va, tc, &log1);
    const auto r2 = train(m2, tr, va, tc, &log2);
    CHECK(log1.str() == log2.str());
    for (std::size_t i = 0; i < m1.parameters().size(); ++i) CHECK(m1.parameters()[i] == m2.parameters()[i]);

    double best_seen = 0.0;
    for (const auto& rec : r1.history)
        if (rec.split == "valid") best_seen = std::max(best_seen, rec.auc);
    CHECK(r1.best_valid.auc == best_seen);
    CHECK(evaluate(m1, va).auc == r1.best_valid.auc);
    CHECK(log1.str().find("\t0.000\n") != std::string::npos);
}

TEST_CASE("training rejects empty inputs") {
    network::ModelConfig mc;
    mc.variant = network::Variant::LR;
    network::Model<float> m(separable_schema(), mc);
    const std::vector<EncodedExample> none;
    const auto some = separable(10, 1);
    CHECK(error_category([&] {
              train(m, std::span<const EncodedExample>(none), std::span<const EncodedExample>(some), TrainConfig{});
          }) == ErrorCategory::Input);
}

}  // TEST_SUITE
