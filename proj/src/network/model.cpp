#include "fiinet/network/model.hpp"

#include <algorithm>
#include <sstream>

#include "fiinet/crosses/branches.hpp"
#include "fiinet/engine/init.hpp"
#include "fiinet/error.hpp"
#include "fiinet/network/loss.hpp"

namespace fiinet::network {

namespace {

constexpr std::size_t kPredictChunk = 1024;

std::string join_sizes(const std::vector<std::size_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i]);
    }
    return out;
}

std::string_view pooling_name(sk::Pooling p) { return p == sk::Pooling::Max ? "max" : "mean"; }

bool uses_dnn(Variant v) { return v != Variant::LR && v != Variant::FM; }

}  // namespace

template <typename Real>
Model<Real>::Model(std::vector<ingest::FieldSchema> schema, ModelConfig config)
    : schema_(std::move(schema)), config_(std::move(config)) {
    const std::size_t f = schema_.size();
    require(f >= 1, ErrorCategory::Config, "model needs at least one field");
    for (std::size_t i = 0; i < f; ++i) {
        require(schema_[i].index == i, ErrorCategory::Config, "field schema is not in index order");
        require(schema_[i].cardinality >= 1, ErrorCategory::Config,
                "field '" + schema_[i].name + "' has zero cardinality");
    }
    require(config_.embedding_dim >= 1, ErrorCategory::Config, "embedding_dim must be >= 1");
    require(config_.dropout >= 0.0 && config_.dropout < 1.0, ErrorCategory::Config, "dropout must be in [0, 1)");
    for (auto h : config_.hidden_sizes) require(h >= 1, ErrorCategory::Config, "hidden layer sizes must be >= 1");

    switch (config_.variant) {
        case Variant::FiiNet:
        case Variant::FiiNetSH:
            require(f >= 2, ErrorCategory::Config,
                    std::string(variant_name(config_.variant)) + " needs at least 2 fields");
            layout_ = crosses::ChannelLayout::full(f);
            break;
        case Variant::FiiNetS:
            require(f >= 3, ErrorCategory::Config, "fiinet-s needs at least 3 fields for third-order crosses");
            layout_ = crosses::ChannelLayout::triples_only(f);
            break;
        case Variant::FiiNetH:
        case Variant::FM:
            require(f >= 2, ErrorCategory::Config,
                    std::string(variant_name(config_.variant)) + " needs at least 2 fields");
            layout_ = crosses::ChannelLayout::pairs_only(f);
            break;
        case Variant::LR: break;
    }
    if (uses_dnn(config_.variant)) dnn_input_ = layout_->channel_count() * config_.embedding_dim;
    build_parameters();
}

template <typename Real>
void Model<Real>::build_parameters() {
    const auto seed = config_.seed;
    const std::size_t k = config_.embedding_dim;
    if (has_crosses())
        for (const auto& fs : schema_) {
            const std::string name = "embedding." + fs.name;
            embedding_ids_.push_back(params_.add(name, engine::xavier_init<Real>({fs.cardinality, k}, seed, name)));
        }
    for (const auto& fs : schema_)
        linear_ids_.push_back(params_.add("linear." + fs.name, Tensor<Real>({fs.cardinality, 1}, Real(0))));
    linear_bias_id_ = params_.add("linear.bias", Tensor<Real>({1}, Real(0)), false);

    if (has_attention()) {
        const std::size_t C = layout_->channel_count();
        const std::size_t d = sk::reduced_dim(C, config_.sk);
        sk_w1_id_ = params_.add("sk.w1", engine::xavier_init<Real>({d, C}, seed, "sk.w1"));
        auto a = engine::xavier_init<Real>({C, d}, seed, "sk.A");
        sk_a_id_ = params_.add("sk.A", a);
        sk_b_id_ = params_.add("sk.B", std::move(a));
    }

    if (uses_dnn(config_.variant)) {
        std::size_t in = dnn_input_;
        for (std::size_t l = 0; l < config_.hidden_sizes.size(); ++l) {
            const std::size_t out = config_.hidden_sizes[l];
            const std::string prefix = "dnn." + std::to_string(l);
            dnn_weight_ids_.push_back(
                params_.add(prefix + ".weight", engine::xavier_init<Real>({out, in}, seed, prefix + ".weight")));
            dnn_bias_ids_.push_back(params_.add(prefix + ".bias", Tensor<Real>({out}, Real(0)), false));
            in = out;
        }
        head_weight_id_ = params_.add("dnn.head.weight", engine::xavier_init<Real>({1, in}, seed, "dnn.head.weight"));
        head_bias_id_ = params_.add("dnn.head.bias", Tensor<Real>({1}, Real(0)), false);
    }
}

template <typename Real>
std::vector<std::string> Model<Real>::field_names() const {
    std::vector<std::string> names;
    names.reserve(schema_.size());
    for (const auto& fs : schema_) names.push_back(fs.name);
    return names;
}

template <typename Real>
typename Model<Real>::Outputs Model<Real>::forward(Tape<Real>& tape, std::span<const EncodedExample> batch,
                                                   GradientStore<Real>* grads, bool training,
                                                   engine::Rng* rng) const {
    require(!batch.empty(), ErrorCategory::Shape, "forward: empty batch");
    if (grads) grads->check_congruent(params_);
    const std::size_t f = schema_.size(), n = batch.size();

    std::vector<std::vector<std::int32_t>> columns(f, std::vector<std::int32_t>(n));
    for (std::size_t e = 0; e < n; ++e) {
        ingest::validate_example(batch[e], schema_);
        for (std::size_t i = 0; i < f; ++i) columns[i][e] = batch[e].indices[i];
    }

    auto param = [&](engine::ParamId id) { return tape.parameter(params_[id], grads ? &(*grads)[id] : nullptr); };

    Var linear = tape.gather_rows(param(linear_ids_[0]), columns[0]);
    for (std::size_t i = 1; i < f; ++i) linear = tape.add(linear, tape.gather_rows(param(linear_ids_[i]), columns[i]));
    Var logit = tape.add_bias(linear, param(linear_bias_id_));

    Outputs out;
    if (has_crosses()) {
        std::vector<Var> fields;
        fields.reserve(f);
        for (std::size_t i = 0; i < f; ++i) fields.push_back(tape.gather_rows(param(embedding_ids_[i]), columns[i]));

        const auto& layout = *layout_;
        const std::size_t C = layout.channel_count(), k = config_.embedding_dim;
        Var crossed;
        switch (config_.variant) {
            case Variant::FiiNet:
            case Variant::FiiNetSH: {
                Var u2 = crosses::branch_2(tape, std::span<const Var>(fields), layout);
                Var u3 = layout.triple_count() > 0 ? crosses::branch_3(tape, std::span<const Var>(fields), layout)
                                                   : tape.constant(Tensor<Real>({n, C, k}, Real(0)));
                if (config_.variant == Variant::FiiNetSH) {
                    crossed = sk::fuse_sum(tape, u2, u3);
                } else {
                    Var z = sk::global_pool(tape, sk::fuse_sum(tape, u2, u3), config_.sk.pooling);
                    Var s = sk::reduce(tape, z, param(sk_w1_id_));
                    out.attention = sk::select_softmax(tape, s, param(sk_a_id_), param(sk_b_id_));
                    crossed = sk::apply_select(tape, u2, u3, out.attention);
                }
                break;
            }
            case Variant::FiiNetS: crossed = crosses::branch_3(tape, std::span<const Var>(fields), layout); break;
            case Variant::FiiNetH:
            case Variant::FM: crossed = crosses::branch_2(tape, std::span<const Var>(fields), layout); break;
            case Variant::LR: break;
        }

        Var y_d;
        if (config_.variant == Variant::FM) {
            y_d = tape.row_sum(crossed);
        } else {
            Var x = tape.reshape(crossed, {n, dnn_input_});
            const bool drop = training && config_.dropout > 0.0;
            require(!drop || rng != nullptr, ErrorCategory::State, "forward: dropout needs a random generator");
            for (std::size_t l = 0; l < dnn_weight_ids_.size(); ++l) {
                x = tape.relu(tape.linear(x, param(dnn_weight_ids_[l]), param(dnn_bias_ids_[l])));
                if (drop) x = tape.dropout(x, config_.dropout, true, *rng);
            }
            y_d = tape.linear(x, param(head_weight_id_), param(head_bias_id_));
        }
        logit = tape.add(logit, y_d);
    }
    out.probs = tape.sigmoid(logit);
    return out;
}

template <typename Real>
Real Model<Real>::loss_and_gradient(std::span<const EncodedExample> batch, GradientStore<Real>& grads, bool training,
                                    engine::Rng& rng, std::vector<Real>* probs_out) const {
    Tape<Real> tape;
    auto out = forward(tape, batch, &grads, training, &rng);
    std::vector<int> labels(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) labels[i] = batch[i].label;
    Var loss = bce_loss(tape, out.probs, labels);
    const Real value = tape.value(loss)[0];
    if (probs_out) {
        const auto& p = tape.value(out.probs);
        probs_out->assign(p.data().begin(), p.data().end());
    }
    tape.backward(loss);
    return value;
}

template <typename Real>
Real Model<Real>::loss(std::span<const EncodedExample> batch) const {
    const auto probs = predict(batch);
    std::vector<double> p(probs.begin(), probs.end());
    std::vector<int> labels(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) labels[i] = batch[i].label;
    return static_cast<Real>(bce_loss(std::span<const double>(p), std::span<const int>(labels)));
}

template <typename Real>
std::vector<Real> Model<Real>::predict(std::span<const EncodedExample> batch) const {
    std::vector<Real> probs;
    probs.reserve(batch.size());
    for (std::size_t start = 0; start < batch.size(); start += kPredictChunk) {
        const auto chunk = batch.subspan(start, std::min(kPredictChunk, batch.size() - start));
        Tape<Real> tape;
        auto out = forward(tape, chunk, nullptr, false, nullptr);
        const auto& p = tape.value(out.probs);
        probs.insert(probs.end(), p.data().begin(), p.data().end());
    }
    return probs;
}

template <typename Real>
Real Model<Real>::predict(const EncodedExample& example) const {
    return predict(std::span<const EncodedExample>(&example, 1))[0];
}

template <typename Real>
Tensor<Real> Model<Real>::attention_weights(std::span<const EncodedExample> batch) const {
    require(has_attention(), ErrorCategory::Config,
            std::string(variant_name(config_.variant)) + " has no attention weights");
    require(!batch.empty(), ErrorCategory::Shape, "attention_weights: empty sample");
    const std::size_t C = layout_->channel_count();
    std::vector<Real> all;
    all.reserve(batch.size() * C * 2);
    for (std::size_t start = 0; start < batch.size(); start += kPredictChunk) {
        const auto chunk = batch.subspan(start, std::min(kPredictChunk, batch.size() - start));
        Tape<Real> tape;
        auto out = forward(tape, chunk, nullptr, false, nullptr);
        const auto& w = tape.value(out.attention);
        all.insert(all.end(), w.data().begin(), w.data().end());
    }
    return Tensor<Real>({batch.size(), C, 2}, std::move(all));
}

template <typename Real>
engine::Metadata Model<Real>::metadata() const {
    engine::Metadata m;
    m["variant"] = std::string(variant_name(config_.variant));
    m["embedding_dim"] = std::to_string(config_.embedding_dim);
    m["hidden_sizes"] = join_sizes(config_.hidden_sizes);
    m["reduction_ratio"] = std::to_string(config_.sk.reduction_ratio);
    m["reduced_dim_min"] = std::to_string(config_.sk.min_reduced_dim);
    m["pooling"] = std::string(pooling_name(config_.sk.pooling));
    std::ostringstream dropout;
    dropout << config_.dropout;
    m["dropout"] = dropout.str();
    m["seed"] = std::to_string(config_.seed);
    std::string fields, cards;
    for (std::size_t i = 0; i < schema_.size(); ++i) {
        if (i) {
            fields += ',';
            cards += ',';
        }
        fields += schema_[i].name;
        cards += std::to_string(schema_[i].cardinality);
    }
    m["fields"] = fields;
    m["cardinalities"] = cards;
    return m;
}

template <typename Real>
void Model<Real>::check_compatible(const engine::Metadata& metadata) const {
    const auto mine = this->metadata();
    for (const char* key : {"variant", "embedding_dim", "hidden_sizes", "reduction_ratio", "reduced_dim_min",
                            "pooling", "fields", "cardinalities"}) {
        const auto it = metadata.find(key);
        if (it == metadata.end()) fail(ErrorCategory::Config, std::string("checkpoint lacks '") + key + "'");
        if (it->second != mine.at(key))
            fail(ErrorCategory::Config, std::string("checkpoint ") + key + " is '" + it->second +
                                            "' but the model has '" + mine.at(key) + "'");
    }
}

template <typename Real>
std::vector<sk::AttentionRow> export_attention(const Model<Real>& before, const Model<Real>& after,
                                               std::span<const EncodedExample> sample) {
    require(!sample.empty(), ErrorCategory::Input, "attention export: empty sample");
    require(before.has_attention() && after.has_attention(), ErrorCategory::Config,
            "attention export needs the fiinet variant");
    require(before.layout() == after.layout(), ErrorCategory::Config, "attention export: models disagree on layout");
    const auto& layout = after.layout();
    const auto wb = sk::mean_effective_weights(before.attention_weights(sample), layout);
    const auto wa = sk::mean_effective_weights(after.attention_weights(sample), layout);
    return sk::attention_rows(layout, after.field_names(), wb, wa);
}

template class Model<float>;
template class Model<double>;
template std::vector<sk::AttentionRow> export_attention<float>(const Model<float>&, const Model<float>&,
                                                               std::span<const EncodedExample>);
template std::vector<sk::AttentionRow> export_attention<double>(const Model<double>&, const Model<double>&,
                                                                std::span<const EncodedExample>);

}  // namespace fiinet::network
