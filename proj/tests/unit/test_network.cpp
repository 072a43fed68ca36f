#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "fiinet/network/loss.hpp"
#include "fiinet/network/model.hpp"
#include "helpers.hpp"

using namespace fiinet;
using namespace fiinet::network;
using fiinet::engine::GradientStore;
using fiinet::engine::Rng;
using fiinet::engine::Shape;
using fiinet::ingest::FieldSchema;
using testutil::error_category;
using testutil::random_tensor;

namespace {

const Variant kAllVariants[] = {Variant::FiiNet, Variant::FiiNetSH, Variant::FiiNetS,
                                Variant::FiiNetH, Variant::LR,       Variant::FM};

std::vector<FieldSchema> tiny_schema(std::size_t f, std::size_t card = 6) {
    std::vector<FieldSchema> s;
    for (std::size_t i = 0; i < f; ++i) s.push_back({"f" + std::to_string(i), i, card});
    return s;
}

std::vector<EncodedExample> random_examples(std::size_t n, std::size_t f, std::size_t card, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<EncodedExample> out(n);
    for (std::size_t e = 0; e < n; ++e) {
        for (std::size_t i = 0; i < f; ++i) out[e].indices.push_back(static_cast<std::int32_t>(rng.below(card)));
        out[e].label = static_cast<int>(e % 2);
    }
    return out;
}

ModelConfig tiny_config(Variant v) {
    ModelConfig c;
    c.variant = v;
    c.embedding_dim = 4;
    c.hidden_sizes = {8};
    return c;
}

// Replaces every parameter with fresh U[-0.5, 0.5] values (keeping B = A)
// so zero-initialised tables do not hide gradient paths.
template <typename Real>
void randomize(Model<Real>& m, std::uint64_t seed) {
    auto& p = m.parameters();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto t = random_tensor(p[i].shape(), seed + i, -0.5, 0.5);
        for (std::size_t j = 0; j < t.size(); ++j) p[i][j] = static_cast<Real>(t[j]);
    }
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

TEST_SUITE("network") {

TEST_CASE("variant construction") {
    CHECK(error_category([] { Model<double>(tiny_schema(2), tiny_config(Variant::FiiNetS)); }) ==
          ErrorCategory::Config);
    CHECK(error_category([] { Model<double>(tiny_schema(1), tiny_config(Variant::FiiNetH)); }) ==
          ErrorCategory::Config);
    CHECK(error_category([] { Model<double>(tiny_schema(1), tiny_config(Variant::FiiNet)); }) ==
          ErrorCategory::Config);
    Model<double> lr1(tiny_schema(1), tiny_config(Variant::LR));
    CHECK(!lr1.has_crosses());

    Model<double> two(tiny_schema(2), tiny_config(Variant::FiiNet));
    CHECK(two.layout().channel_count() == 1);
    const auto ex = random_examples(4, 2, 6, 1);
    CHECK(two.predict(ex).size() == 4);

    for (auto v : {Variant::FiiNet, Variant::FiiNetSH})
        CHECK(Model<double>(tiny_schema(5), tiny_config(v)).dnn_input_width() == 20 * 4);
    CHECK(Model<double>(tiny_schema(5), tiny_config(Variant::FiiNetS)).dnn_input_width() == 10 * 4);
    CHECK(Model<double>(tiny_schema(5), tiny_config(Variant::FiiNetH)).dnn_input_width() == 10 * 4);

    CHECK(parse_variant("sh") == Variant::FiiNetSH);
    CHECK(variant_name(Variant::FiiNetS) == "fiinet-s");
    CHECK(error_category([] { parse_variant("deepfm"); }) == ErrorCategory::Config);
}

TEST_CASE("parameter layout and initial attention") {
    Model<double> m(tiny_schema(5), tiny_config(Variant::FiiNet));
    const auto& p = m.parameters();
    CHECK(p.at("embedding.f0").shape() == Shape{6, 4});
    CHECK(p.at("linear.f3").shape() == Shape{6, 1});
    CHECK(p.at("sk.w1").shape() == Shape{8, 20});
    CHECK(p.at("sk.A").shape() == Shape{20, 8});
    CHECK(p.at("sk.A") == p.at("sk.B"));
    CHECK(p.at("dnn.0.weight").shape() == Shape{8, 80});
    CHECK(p.at("dnn.head.weight").shape() == Shape{1, 8});
    CHECK(!p.entry(p.id("dnn.0.bias")).decay);
    CHECK(!p.entry(p.id("linear.bias")).decay);
    CHECK(p.entry(p.id("sk.A")).decay);

    const auto w = m.attention_weights(random_examples(10, 5, 6, 2));
    for (double v : w.data()) CHECK(v == 0.5);

    CHECK(!Model<double>(tiny_schema(5), tiny_config(Variant::FiiNetSH)).parameters().contains("sk.A"));
    CHECK(error_category([] {
              Model<double>(tiny_schema(5), tiny_config(Variant::LR)).attention_weights(random_examples(2, 5, 6, 1));
          }) == ErrorCategory::Config);
}

TEST_CASE("linear and factorization machine outputs match direct formulas") {
    const std::size_t f = 4;
    const auto ex = random_examples(20, f, 6, 3);
    for (auto v : {Variant::LR, Variant::FM}) {
        Model<double> m(tiny_schema(f), tiny_config(v));
        randomize(m, 17);
        const auto& p = m.parameters();
        const auto probs = m.predict(ex);
        double worst = 0.0;
        for (std::size_t e = 0; e < ex.size(); ++e) {
            double z = p.at("linear.bias")[0];
            for (std::size_t i = 0; i < f; ++i) z += p.at("linear.f" + std::to_string(i))[ex[e].indices[i]];
            if (v == Variant::FM)
                for (std::size_t i = 0; i < f; ++i)
                    for (std::size_t j = i + 1; j < f; ++j)
                        for (std::size_t t = 0; t < 4; ++t)
                            z += p.at("embedding.f" + std::to_string(i)).at(ex[e].indices[i], t) *
                                 p.at("embedding.f" + std::to_string(j)).at(ex[e].indices[j], t);
            worst = std::max(worst, std::abs(probs[e] - sigmoid(z)));
        }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("full-model gradients for every variant") {
    const auto ex = random_examples(12, 5, 6, 4);
    for (auto v : kAllVariants) {
        CAPTURE(variant_name(v));
        Model<double> m(tiny_schema(5), tiny_config(v));
        randomize(m, 31);
        auto loss = [&](GradientStore<double>* g) {
            Rng rng(9);
            if (g) return m.loss_and_gradient(ex, *g, true, rng);
            Tape<double> tape;
            auto o = m.forward(tape, ex, nullptr, true, &rng);
            std::vector<int> y;
            for (const auto& e : ex) y.push_back(e.label);
            return tape.value(bce_loss(tape, o.probs, y))[0];
        };
        engine::GradCheckOptions opts;
        opts.eps = 1e-4;
        const auto report = engine::finite_difference_check(m.parameters(), loss, opts);
        CHECK(report.size() == m.parameters().size());
        CHECK(engine::max_relative_error(report) < 1e-4);
    }
}

TEST_CASE("equal branch weights reproduce the unweighted fusion ranking") {
    const std::size_t f = 5;
    Model<double> full(tiny_schema(f), tiny_config(Variant::FiiNet));
    Model<double> sh(tiny_schema(f), tiny_config(Variant::FiiNetSH));
    randomize(full, 50);
    auto& pf = full.parameters();
    pf.at("sk.B") = pf.at("sk.A");
    auto& ps = sh.parameters();
    for (const auto& e : ps.entries()) ps.at(e.name) = pf.at(e.name);
    // Scaling every cross channel by 0.5 equals halving the first DNN layer.
    for (auto& w : ps.at("dnn.0.weight").data()) w *= 0.5;

    const auto ex = random_examples(200, f, 6, 5);
    const auto a = full.predict(ex), b = sh.predict(ex);
    std::vector<std::size_t> oa(ex.size()), ob(ex.size());
    std::iota(oa.begin(), oa.end(), 0);
    std::iota(ob.begin(), ob.end(), 0);
    std::stable_sort(oa.begin(), oa.end(), [&](auto i, auto j) { return a[i] < a[j]; });
    std::stable_sort(ob.begin(), ob.end(), [&](auto i, auto j) { return b[i] < b[j]; });
    CHECK(oa == ob);
}

TEST_CASE("initial loss on balanced labels is near ln 2") {
    const auto ex = random_examples(2000, 6, 10, 6);
    // FM is left out: its logit starts as a sum of 15 inner products of
    // Xavier-initialised embeddings, so outputs do not start near 0.5.
    for (auto v : {Variant::FiiNet, Variant::FiiNetSH, Variant::FiiNetS, Variant::FiiNetH, Variant::LR}) {
        CAPTURE(variant_name(v));
        ModelConfig c;
        c.variant = v;
        Model<float> m(tiny_schema(6, 10), c);
        CHECK(std::abs(static_cast<double>(m.loss(ex)) - std::log(2.0)) < 0.05);
    }
}

TEST_CASE("prediction paths agree") {
    Model<float> m(tiny_schema(5), tiny_config(Variant::FiiNet));
    const auto ex = random_examples(3000, 5, 6, 7);
    const auto batch = m.predict(ex);
    CHECK(batch.size() == ex.size());
    CHECK(m.predict(ex[2500]) == batch[2500]);

    auto bad = ex[0];
    bad.indices[1] = 6;
    CHECK(error_category([&] { m.predict(bad); }) == ErrorCategory::Input);
}

TEST_CASE("binary cross-entropy") {
    const std::vector<double> p{0.9, 0.2, 0.0, 1.0};
    const std::vector<int> y{1, 0, 1, 0};
    const double expected =
        -(std::log(0.9) + std::log(0.8) + std::log(kProbEpsilon) + std::log(kProbEpsilon)) / 4.0;
    CHECK(bce_loss(std::span<const double>(p), std::span<const int>(y)) == doctest::Approx(expected));

    Tape<double> tape;
    Tensor<double> probs({4, 1}, {0.9, 0.2, 0.0, 1.0});
    Tensor<double> g(Shape{4, 1});
    Var pv = tape.parameter(probs, &g);
    Var l = bce_loss(tape, pv, y);
    CHECK(tape.value(l)[0] == doctest::Approx(expected));
    tape.backward(l);
    CHECK(g[0] == doctest::Approx(-1.0 / 0.9 / 4.0));
    CHECK(g[1] == doctest::Approx(1.0 / 0.8 / 4.0));
    CHECK(g[2] == 0.0);
    CHECK(g[3] == 0.0);

    const std::vector<int> short_labels{1};
    CHECK(error_category([&] { bce_loss(std::span<const double>(p), std::span<const int>(short_labels)); }) ==
          ErrorCategory::Shape);
}

TEST_CASE("checkpoint metadata guards against mismatched models") {
    Model<double> m(tiny_schema(5), tiny_config(Variant::FiiNet));
    m.check_compatible(m.metadata());

    auto other_k = tiny_config(Variant::FiiNet);
    other_k.embedding_dim = 8;
    CHECK(error_category([&] { Model<double>(tiny_schema(5), other_k).check_compatible(m.metadata()); }) ==
          ErrorCategory::Config);
    CHECK(error_category([&] {
              Model<double>(tiny_schema(5), tiny_config(Variant::FiiNetH)).check_compatible(m.metadata());
          }) == ErrorCategory::Config);
    CHECK(error_category([&] {
              Model<double>(tiny_schema(5, 7), tiny_config(Variant::FiiNet)).check_compatible(m.metadata());
          }) == ErrorCategory::Config);
}

TEST_CASE("attention export") {
    Model<double> before(tiny_schema(4), tiny_config(Variant::FiiNet));
    Model<double> after(tiny_schema(4), tiny_config(Variant::FiiNet));
    randomize(after, 70);
    const auto ex = random_examples(30, 4, 6, 8);
    const auto rows = export_attention(before, after, std::span<const EncodedExample>(ex));
    REQUIRE(rows.size() == 10);
    for (const auto& r : rows) CHECK(r.weight_before == 0.5);
    CHECK(rows[0].fields == "f0,f1");
    CHECK(rows[9].order == 3);

    const std::vector<EncodedExample> none;
    CHECK(error_category([&] { export_attention(before, after, std::span<const EncodedExample>(none)); }) ==
          ErrorCategory::Input);
    Model<double> lr(tiny_schema(4), tiny_config(Variant::LR));
    CHECK(error_category([&] { export_attention(lr, lr, std::span<const EncodedExample>(ex)); }) ==
          ErrorCategory::Config);
}

}  // TEST_SUITE
