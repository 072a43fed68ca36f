#pragma once

#include <span>

#include "fiinet/engine/tape.hpp"

namespace fiinet::network {

/// Predictions are clamped to [eps, 1 - eps] before the logarithms.
inline constexpr double kProbEpsilon = 1e-7;

/// -(1/N) * sum(y log p + (1 - y) log(1 - p)) over p of shape [N, 1].
/// Clamped entries receive zero gradient.
template <typename Real>
engine::Var bce_loss(engine::Tape<Real>& tape, engine::Var probs, std::span<const int> labels);

/// Same quantity on plain values, accumulated in double.
double bce_loss(std::span<const double> probs, std::span<const int> labels);

}  // namespace fiinet::network
