#include "fiinet/network/loss.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fiinet/error.hpp"

namespace fiinet::network {

namespace {
void check_lengths(std::size_t n_probs, std::size_t n_labels) {
    if (n_probs != n_labels)
        fail(ErrorCategory::Shape, "bce_loss: " + std::to_string(n_probs) + " predictions but " +
                                       std::to_string(n_labels) + " labels");
    require(n_probs > 0, ErrorCategory::Shape, "bce_loss: empty batch");
}
}  // namespace

template <typename Real>
engine::Var bce_loss(engine::Tape<Real>& tape, engine::Var probs, std::span<const int> labels) {
    const auto& p = tape.value(probs);
    check_lengths(p.size(), labels.size());
    const double n = static_cast<double>(labels.size());
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double q = std::clamp(static_cast<double>(p[i]), kProbEpsilon, 1.0 - kProbEpsilon);
        total += labels[i] ? std::log(q) : std::log(1.0 - q);
    }
    std::vector<int> y(labels.begin(), labels.end());
    return tape.record(engine::Tensor<Real>::scalar(static_cast<Real>(-total / n)),
                       [probs, y = std::move(y), n](engine::Tape<Real>& t, engine::Var o) {
                           const double g = static_cast<double>(t.grad(o)[0]);
                           const auto& pv = t.value(probs);
                           auto& gp = t.grad(probs);
                           for (std::size_t i = 0; i < y.size(); ++i) {
                               const double q = static_cast<double>(pv[i]);
                               if (q < kProbEpsilon || q > 1.0 - kProbEpsilon) continue;
                               const double d = y[i] ? -1.0 / q : 1.0 / (1.0 - q);
                               gp[i] += static_cast<Real>(g * d / n);
                           }
                       });
}

double bce_loss(std::span<const double> probs, std::span<const int> labels) {
    check_lengths(probs.size(), labels.size());
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double q = std::clamp(probs[i], kProbEpsilon, 1.0 - kProbEpsilon);
        total += labels[i] ? std::log(q) : std::log(1.0 - q);
    }
    return -total / static_cast<double>(probs.size());
}

template engine::Var bce_loss<float>(engine::Tape<float>&, engine::Var, std::span<const int>);
template engine::Var bce_loss<double>(engine::Tape<double>&, engine::Var, std::span<const int>);

}  // namespace fiinet::network
