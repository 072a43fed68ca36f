#pragma once

#include <cstdint>
#include <vector>

#include "fiinet/engine/parameters.hpp"

namespace fiinet::training {

struct AdamConfig {
    double learning_rate = 0.001356;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    /// Decoupled: theta <- theta * (1 - lr * wd) before the Adam update,
    /// applied only to parameters flagged for decay.
    double weight_decay = 1e-5;
};

/// First and second moment estimates plus the step counter.
template <typename Real>
struct AdamState {
    std::vector<engine::Tensor<Real>> m;
    std::vector<engine::Tensor<Real>> v;
    std::uint64_t step = 0;

    AdamState() = default;
    explicit AdamState(const engine::ParameterStore<Real>& params);
};

/// One bias-corrected Adam update. A non-finite gradient aborts with a
/// numeric error naming the parameter; nothing is modified in that case.
template <typename Real>
void adam_step(engine::ParameterStore<Real>& params, const engine::GradientStore<Real>& grads,
               AdamState<Real>& state, const AdamConfig& config);

extern template struct AdamState<float>;
extern template struct AdamState<double>;

}  // namespace fiinet::training
