#pragma once

#include <span>

#include "fiinet/crosses/layout.hpp"
#include "fiinet/engine/tape.hpp"
#include "fiinet/engine/tensor.hpp"

namespace fiinet::crosses {

using engine::Tape;
using engine::Tensor;
using engine::Var;

// Branch tensors live on the full channel axis of `layout`. The second-order
// branch holds e_i * e_j (elementwise) on pair channels and zeros on triple
// channels; the third-order branch holds e_i * e_j * e_k on triple channels
// and zeros on pair channels. Channels are read by direct index into the
// fixed field order; there is no lookup per example.

/// Single example. `embeddings` is f x k; the result is C x k.
template <typename Real>
Tensor<Real> build_branch_2(const Tensor<Real>& embeddings, const ChannelLayout& layout);
template <typename Real>
Tensor<Real> build_branch_3(const Tensor<Real>& embeddings, const ChannelLayout& layout);

/// Minibatch tape ops. `fields[i]` is the [B, k] embedding of field i;
/// the result is [B, C, k].
template <typename Real>
Var branch_2(Tape<Real>& tape, std::span<const Var> fields, const ChannelLayout& layout);
template <typename Real>
Var branch_3(Tape<Real>& tape, std::span<const Var> fields, const ChannelLayout& layout);

}  // namespace fiinet::crosses
