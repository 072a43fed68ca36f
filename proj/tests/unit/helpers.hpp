#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fiinet/engine/gradcheck.hpp"
#include "fiinet/engine/rng.hpp"
#include "fiinet/engine/tape.hpp"
#include "fiinet/error.hpp"

namespace testutil {

using fiinet::engine::Shape;
using fiinet::engine::Tape;
using fiinet::engine::Tensor;
using fiinet::engine::Var;

inline Tensor<double> random_tensor(const Shape& shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    fiinet::engine::Rng rng(seed);
    Tensor<double> t(shape);
    for (auto& v : t.data()) v = rng.uniform(lo, hi);
    return t;
}

using OpBuilder = std::function<Var(Tape<double>&, const std::vector<Var>&)>;

/// Worst finite-difference relative error of d/d(inputs) sum(w * op(inputs))
/// for a fixed random w.
inline double op_gradient_error(const std::vector<Tensor<double>>& inputs, const OpBuilder& op,
                                double eps = 1e-6) {
    fiinet::engine::ParameterStore<double> params;
    for (std::size_t i = 0; i < inputs.size(); ++i) params.add("in" + std::to_string(i), inputs[i]);
    Tensor<double> weights;
    auto loss = [&](fiinet::engine::GradientStore<double>* grads) {
        Tape<double> tape;
        std::vector<Var> vars;
        for (std::size_t i = 0; i < params.size(); ++i)
            vars.push_back(tape.parameter(params[i], grads ? &(*grads)[i] : nullptr));
        Var out = op(tape, vars);
        if (weights.empty()) weights = random_tensor(tape.shape(out), 99);
        Var l = tape.sum(tape.hadamard(out, tape.constant(weights)));
        const double value = tape.value(l)[0];
        if (grads) tape.backward(l);
        return value;
    };
    fiinet::engine::GradCheckOptions opts;
    opts.eps = eps;
    return fiinet::engine::max_relative_error(fiinet::engine::finite_difference_check(params, loss, opts));
}

template <typename F>
fiinet::ErrorCategory error_category(F&& f) {
    try {
        f();
    } catch (const fiinet::Error& e) {
        return e.category();
    }
    throw std::runtime_error("expected fiinet::Error");
}

inline std::string error_message(const std::function<void()>& f) {
    try {
        f();
    } catch (const fiinet::Error& e) {
        return e.what();
    }
    return {};
}

}  // namespace testutil
