#include "fiinet/training/adam.hpp"

#include <cmath>

#include "fiinet/error.hpp"

namespace fiinet::training {

template <typename Real>
AdamState<Real>::AdamState(const engine::ParameterStore<Real>& params) {
    for (const auto& e : params.entries()) {
        m.emplace_back(e.value.shape(), Real(0));
        v.emplace_back(e.value.shape(), Real(0));
    }
}

template <typename Real>
void adam_step(engine::ParameterStore<Real>& params, const engine::GradientStore<Real>& grads,
               AdamState<Real>& state, const AdamConfig& config) {
    grads.check_congruent(params);
    require(state.m.size() == params.size(), ErrorCategory::State, "optimizer state does not match the parameters");
    for (std::size_t p = 0; p < params.size(); ++p)
        for (Real g : grads[p].data())
            if (!std::isfinite(static_cast<double>(g)))
                fail(ErrorCategory::Numeric, "non-finite gradient in parameter '" + params.entry(p).name + "'");

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(config.beta1, t);
    const double c2 = 1.0 - std::pow(config.beta2, t);
    const double lr = config.learning_rate;
    const Real b1 = static_cast<Real>(config.beta1), b2 = static_cast<Real>(config.beta2);

    for (std::size_t p = 0; p < params.size(); ++p) {
        auto& theta = params[p];
        const auto& g = grads[p];
        auto& m = state.m[p];
        auto& v = state.v[p];
        const Real shrink = params.entry(p).decay ? static_cast<Real>(1.0 - lr * config.weight_decay) : Real(1);
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m[i] = b1 * m[i] + (Real(1) - b1) * g[i];
            v[i] = b2 * v[i] + (Real(1) - b2) * g[i] * g[i];
            const double mhat = static_cast<double>(m[i]) / c1;
            const double vhat = static_cast<double>(v[i]) / c2;
            theta[i] = static_cast<Real>(static_cast<double>(theta[i] * shrink) -
                                         lr * mhat / (std::sqrt(vhat) + config.epsilon));
        }
    }
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step<float>(engine::ParameterStore<float>&, const engine::GradientStore<float>&,
                               AdamState<float>&, const AdamConfig&);
template void adam_step<double>(engine::ParameterStore<double>&, const engine::GradientStore<double>&,
                                AdamState<double>&, const AdamConfig&);

}  // namespace fiinet::training
