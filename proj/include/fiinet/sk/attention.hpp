#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "fiinet/crosses/layout.hpp"
#include "fiinet/engine/tape.hpp"

namespace fiinet::sk {

using engine::Tape;
using engine::Tensor;
using engine::Var;

enum class Pooling { Mean, Max };

struct SkConfig {
    std::size_t reduction_ratio = 3;
    std::size_t min_reduced_dim = 8;
    Pooling pooling = Pooling::Mean;
};

/// d = max(ceil(C / r), d_min)
std::size_t reduced_dim(std::size_t channels, const SkConfig& config);

/// Tolerance on a_c + b_c = 1 beyond which apply_select refuses its input.
inline constexpr double kWeightSumTolerance = 1e-5;

// Minibatch ops. Cross tensors are [B, C, k]; channel statistics [B, C].

/// U = second + third. Both branches must share the channel layout.
template <typename Real>
Var fuse_sum(Tape<Real>& tape, Var second, Var third);

/// z_c = mean (or max) over the k coordinates of channel c.
template <typename Real>
Var global_pool(Tape<Real>& tape, Var fused, Pooling pooling);

/// s = relu(Z * w1^T), w1 is [d, C]; result [B, d].
template <typename Real>
Var reduce(Tape<Real>& tape, Var stats, Var w1);

/// Per-channel two-way softmax over the logits (A_c s, B_c s), with A and B
/// of shape [C, d]. Result [B, C, 2]: [..., 0] = a_c, [..., 1] = b_c.
template <typename Real>
Var select_softmax(Tape<Real>& tape, Var descriptor, Var a_matrix, Var b_matrix);

/// Two-way softmax of precomputed logits, both [B, C].
template <typename Real>
Var two_way_softmax(Tape<Real>& tape, Var logits_a, Var logits_b);

/// V_c = a_c * second_c + b_c * third_c.
template <typename Real>
Var apply_select(Tape<Real>& tape, Var second, Var third, Var weights);

/// Per-channel mean effective branch weight over a sample: a_c on pair
/// channels, b_c on triple channels. `weights` is [N, C, 2].
template <typename Real>
std::vector<double> mean_effective_weights(const Tensor<Real>& weights, const crosses::ChannelLayout& layout);

struct AttentionRow {
    std::size_t channel = 0;
    int order = 2;
    std::string fields;
    double weight_before = 0.0;
    double weight_after = 0.0;
};

std::vector<AttentionRow> attention_rows(const crosses::ChannelLayout& layout,
                                         const std::vector<std::string>& field_names,
                                         const std::vector<double>& before, const std::vector<double>& after);

/// Tab-separated with header: channel_index order field_tuple weight_before weight_after.
void write_attention_report(std::ostream& os, const std::vector<AttentionRow>& rows);

}  // namespace fiinet::sk
