#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <span>

#include "fiinet/engine/rng.hpp"
#include "fiinet/engine/tensor.hpp"

namespace fiinet::engine {

/// Handle to a node recorded on a Tape.
struct Var {
    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::size_t id = kNone;
    bool valid() const noexcept { return id != kNone; }
};

/// Records a forward pass as a linear sequence of nodes and replays it in
/// reverse to accumulate exact gradients.
///
/// Parameter leaves reference tensors owned elsewhere (a ParameterStore and
/// a GradientStore); backward() accumulates straight into the gradient
/// tensor, so large embedding tables are never copied onto the tape.
///
/// Ops are methods so that one explicit instantiation per precision covers
/// them. Modules add their own ops through record().
template <typename Real>
class Tape {
public:
    /// Called with the tape and the node's own handle; reads t.grad(self) and
    /// adds into the gradients of the node's inputs.
    using BackwardFn = std::function<void(Tape&, Var self)>;

    Var constant(Tensor<Real> value);
    /// `grad` may be null, in which case gradients reaching this leaf are dropped.
    Var parameter(const Tensor<Real>& value, Tensor<Real>* grad);
    /// Appends a node computed outside the tape.
    Var record(Tensor<Real> value, BackwardFn backward);

    const Tensor<Real>& value(Var v) const;
    const Shape& shape(Var v) const { return value(v).shape(); }
    /// Gradient buffer of `v`, zero-initialised on first access.
    Tensor<Real>& grad(Var v);
    bool has_grad(Var v) const;

    /// Seeds d(loss)/d(loss) = 1 and runs every recorded backward rule in
    /// reverse order. `loss` must hold exactly one element.
    void backward(Var loss);
    void clear();
    std::size_t size() const noexcept { return nodes_.size(); }

    // Elementwise.
    Var add(Var a, Var b);
    Var scale(Var a, Real s);
    Var hadamard(Var a, Var b);
    Var hadamard(Var a, Var b, Var c);
    Var relu(Var a);
    Var sigmoid(Var a);
    /// Inverted dropout. Identity when !training or rate == 0.
    Var dropout(Var a, double rate, bool training, Rng& rng);

    // Linear algebra (2-D operands only).
    /// [p,q] x [q,r] -> [p,r]
    Var matmul(Var a, Var b);
    /// [p,q] x [r,q]^T -> [p,r]
    Var matmul_nt(Var a, Var b);
    /// [n,m] plus the row vector [m] added to every row.
    Var add_bias(Var x, Var bias);
    /// x[n,in] -> x * w^T + bias, with w[out,in] and bias[out].
    Var linear(Var x, Var w, Var bias) { return add_bias(matmul_nt(x, w), bias); }

    // Structural.
    /// Selects rows of a 2-D table: [R,w] -> [rows.size(), w].
    Var gather_rows(Var table, std::span<const std::int32_t> rows);
    Var reshape(Var a, Shape shape);
    /// Sum of all elements -> [1].
    Var sum(Var a);
    /// Sum over all axes but the first: [n, ...] -> [n,1].
    Var row_sum(Var a);

private:
    struct Node {
        Tensor<Real> value;
        const Tensor<Real>* ext_value = nullptr;
        Tensor<Real> grad;
        Tensor<Real>* ext_grad = nullptr;
        bool grad_ready = false;
        BackwardFn backward;
    };

    Node& node(Var v);
    const Node& node(Var v) const;

    std::deque<Node> nodes_;
    bool backward_done_ = false;
};

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace fiinet::engine
