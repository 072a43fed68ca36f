#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fiinet/crosses/layout.hpp"
#include "fiinet/engine/checkpoint.hpp"
#include "fiinet/engine/parameters.hpp"
#include "fiinet/engine/rng.hpp"
#include "fiinet/engine/tape.hpp"
#include "fiinet/ingest/dataset.hpp"
#include "fiinet/network/variant.hpp"
#include "fiinet/sk/attention.hpp"

namespace fiinet::network {

using engine::GradientStore;
using engine::ParameterStore;
using engine::Tape;
using engine::Tensor;
using engine::Var;
using ingest::EncodedExample;

/// CTR predictor
///
///   y_hat = sigmoid(w0 + sum_i w[i][x_i] + y_d)
///
/// where the linear part is one scalar per (field, value) and y_d depends on
/// the variant:
///   FiiNet     DNN(SK-weighted second- and third-order crosses)
///   FiiNet-SH  DNN(second- and third-order crosses, unweighted)
///   FiiNet-S   DNN(third-order crosses)
///   FiiNet-H   DNN(second-order crosses)
///   FM         sum_{i<j} <e_i, e_j>
///   LR         0
///
/// Parameters are named "embedding.<field>", "linear.<field>", "linear.bias",
/// "sk.w1", "sk.A", "sk.B", "dnn.<l>.weight", "dnn.<l>.bias",
/// "dnn.head.weight" and "dnn.head.bias". At construction sk.B is a copy of
/// sk.A so every attention weight starts at exactly 0.5.
template <typename Real>
class Model {
public:
    Model(std::vector<ingest::FieldSchema> schema, ModelConfig config);

    Variant variant() const noexcept { return config_.variant; }
    const ModelConfig& config() const noexcept { return config_; }
    const std::vector<ingest::FieldSchema>& schema() const noexcept { return schema_; }
    std::vector<std::string> field_names() const;
    /// Channel axis of the cross branches (pairs-only for FM; empty for LR).
    const crosses::ChannelLayout& layout() const { return *layout_; }
    bool has_crosses() const noexcept { return layout_.has_value(); }
    bool has_attention() const noexcept { return config_.variant == Variant::FiiNet; }
    /// n = C * k for DNN variants, 0 otherwise.
    std::size_t dnn_input_width() const noexcept { return dnn_input_; }

    ParameterStore<Real>& parameters() noexcept { return params_; }
    const ParameterStore<Real>& parameters() const noexcept { return params_; }

    struct Outputs {
        Var probs;      // [B, 1]
        Var attention;  // [B, C, 2] for FiiNet, invalid otherwise
    };

    /// Records one minibatch forward pass. `grads` may be null (no gradient
    /// wanted); `rng` is required when training with dropout.
    Outputs forward(Tape<Real>& tape, std::span<const EncodedExample> batch, GradientStore<Real>* grads,
                    bool training, engine::Rng* rng) const;

    /// Mean BCE of the batch; adds its gradient into `grads`.
    Real loss_and_gradient(std::span<const EncodedExample> batch, GradientStore<Real>& grads, bool training,
                           engine::Rng& rng, std::vector<Real>* probs_out = nullptr) const;
    /// Mean BCE in evaluation mode.
    Real loss(std::span<const EncodedExample> batch) const;

    std::vector<Real> predict(std::span<const EncodedExample> batch) const;
    Real predict(const EncodedExample& example) const;
    /// [N, C, 2] branch weights in evaluation mode. FiiNet only.
    Tensor<Real> attention_weights(std::span<const EncodedExample> batch) const;

    engine::Metadata metadata() const;
    /// Throws a config error naming the first field that differs.
    void check_compatible(const engine::Metadata& metadata) const;

private:
    void build_parameters();

    std::vector<ingest::FieldSchema> schema_;
    ModelConfig config_;
    std::optional<crosses::ChannelLayout> layout_;
    std::size_t dnn_input_ = 0;
    ParameterStore<Real> params_;

    std::vector<engine::ParamId> embedding_ids_;
    std::vector<engine::ParamId> linear_ids_;
    engine::ParamId linear_bias_id_ = 0;
    engine::ParamId sk_w1_id_ = 0, sk_a_id_ = 0, sk_b_id_ = 0;
    std::vector<engine::ParamId> dnn_weight_ids_, dnn_bias_ids_;
    engine::ParamId head_weight_id_ = 0, head_bias_id_ = 0;
};

/// Mean effective attention weight per channel for two models over the same
/// sample (typically freshly initialised and trained).
template <typename Real>
std::vector<sk::AttentionRow> export_attention(const Model<Real>& before, const Model<Real>& after,
                                               std::span<const EncodedExample> sample);

extern template class Model<float>;
extern template class Model<double>;

}  // namespace fiinet::network
