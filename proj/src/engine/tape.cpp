#include "fiinet/engine/tape.hpp"

#include <Eigen/Core>
#include <cmath>

#include "fiinet/error.hpp"

namespace fiinet::engine {

namespace {

template <typename Real>
using RowMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Real>
Eigen::Map<const RowMat<Real>> cmat(const Tensor<Real>& t) {
    return {t.ptr(), static_cast<Eigen::Index>(t.dim(0)), static_cast<Eigen::Index>(t.dim(1))};
}

template <typename Real>
Eigen::Map<RowMat<Real>> mmat(Tensor<Real>& t) {
    return {t.ptr(), static_cast<Eigen::Index>(t.dim(0)), static_cast<Eigen::Index>(t.dim(1))};
}

void require_rank2(const Shape& s, const char* op) {
    if (s.size() != 2) fail(ErrorCategory::Shape, std::string(op) + ": expected a 2-D operand, got " + shape_str(s));
}

}  // namespace

template <typename Real>
typename Tape<Real>::Node& Tape<Real>::node(Var v) {
    require(v.valid() && v.id < nodes_.size(), ErrorCategory::State, "invalid tape variable");
    return nodes_[v.id];
}

template <typename Real>
const typename Tape<Real>::Node& Tape<Real>::node(Var v) const {
    require(v.valid() && v.id < nodes_.size(), ErrorCategory::State, "invalid tape variable");
    return nodes_[v.id];
}

template <typename Real>
Var Tape<Real>::constant(Tensor<Real> value) {
    return record(std::move(value), nullptr);
}

template <typename Real>
Var Tape<Real>::parameter(const Tensor<Real>& value, Tensor<Real>* grad) {
    if (grad) check_same_shape(value.shape(), grad->shape(), "parameter gradient");
    Node n;
    n.ext_value = &value;
    n.ext_grad = grad;
    nodes_.push_back(std::move(n));
    return Var{nodes_.size() - 1};
}

template <typename Real>
Var Tape<Real>::record(Tensor<Real> value, BackwardFn backward) {
    Node n;
    n.value = std::move(value);
    n.backward = std::move(backward);
    nodes_.push_back(std::move(n));
    return Var{nodes_.size() - 1};
}

template <typename Real>
const Tensor<Real>& Tape<Real>::value(Var v) const {
    const Node& n = node(v);
    return n.ext_value ? *n.ext_value : n.value;
}

template <typename Real>
Tensor<Real>& Tape<Real>::grad(Var v) {
    Node& n = node(v);
    n.grad_ready = true;
    if (n.ext_grad) return *n.ext_grad;
    if (n.grad.empty()) n.grad = Tensor<Real>(value(v).shape(), Real(0));
    return n.grad;
}

template <typename Real>
bool Tape<Real>::has_grad(Var v) const {
    return node(v).grad_ready;
}

template <typename Real>
void Tape<Real>::backward(Var loss) {
    require(!nodes_.empty(), ErrorCategory::State, "backward called before forward");
    require(!backward_done_, ErrorCategory::State, "backward already ran on this tape; clear() it first");
    require(value(loss).size() == 1, ErrorCategory::Shape,
            "backward needs a scalar loss, got shape " + shape_str(value(loss).shape()));
    backward_done_ = true;
    grad(loss).fill(Real(1));
    for (std::size_t i = loss.id + 1; i-- > 0;) {
        Node& n = nodes_[i];
        if (n.backward && n.grad_ready) n.backward(*this, Var{i});
    }
}

template <typename Real>
void Tape<Real>::clear() {
    nodes_.clear();
    backward_done_ = false;
}

template <typename Real>
Var Tape<Real>::add(Var a, Var b) {
    check_same_shape(shape(a), shape(b), "add");
    Tensor<Real> out = value(a);
    const auto& bv = value(b);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
    return record(std::move(out), [a, b](Tape& t, Var o) {
        const auto& g = t.grad(o);
        auto& ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
        auto& gb = t.grad(b);
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
    });
}

template <typename Real>
Var Tape<Real>::scale(Var a, Real s) {
    Tensor<Real> out = value(a);
    for (auto& x : out.data()) x *= s;
    return record(std::move(out), [a, s](Tape& t, Var o) {
        const auto& g = t.grad(o);
        auto& ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += s * g[i];
    });
}

template <typename Real>
Var Tape<Real>::hadamard(Var a, Var b) {
    check_same_shape(shape(a), shape(b), "hadamard");
    Tensor<Real> out = value(a);
    const auto& bv = value(b);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
    return record(std::move(out), [a, b](Tape& t, Var o) {
        const auto& g = t.grad(o);
        const auto& av = t.value(a);
        const auto& bv = t.value(b);
        auto& ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
        auto& gb = t.grad(b);
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
    });
}

template <typename Real>
Var Tape<Real>::hadamard(Var a, Var b, Var c) {
    check_same_shape(shape(a), shape(b), "hadamard");
    check_same_shape(shape(a), shape(c), "hadamard");
    Tensor<Real> out = value(a);
    const auto& bv = value(b);
    const auto& cv = value(c);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i] * cv[i];
    return record(std::move(out), [a, b, c](Tape& t, Var o) {
        const auto& g = t.grad(o);
        const auto& av = t.value(a);
        const auto& bv = t.value(b);
        const auto& cv = t.value(c);
        auto& ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i] * cv[i];
        auto& gb = t.grad(b);
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i] * cv[i];
        auto& gc = t.grad(c);
        for (std::size_t i = 0; i < g.size(); ++i) gc[i] += g[i] * av[i] * bv[i];
    });
}

template <typename Real>
Var Tape<Real>::relu(Var a) {
    Tensor<Real> out = value(a);
    for (auto& x : out.data()) x = x > Real(0) ? x : Real(0);
    return record(std::move(out), [a](Tape& t, Var o) {
        const auto& g = t.grad(o);
        const auto& av = t.value(a);
        auto& ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i)
            if (av[i] > Real(0)) ga[i] += g[i];
    });
}

template <typename Real>
Var Tape<Real>::sigmoid(Var a) {
    Tensor<Real> out = value(a);
    for (auto& x : out.data()) {
        if (x >= Real(0)) {
            x = Real(1) / (Real(1) + std::exp(-x));
        } else {
            Real e = std::exp(x);
            x = e / (Real(1) + e);
        }
    }
    return record(std::move(out), [a](Tape& t, Var o) {
        const auto& g = t.grad(o);
        const auto& y = t.value(o);
        auto& ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (Real(1) - y[i]);
    });
}

template <typename Real>
Var Tape<Real>::dropout(Var a, double rate, bool training, Rng& rng) {
    if (!(rate >= 0.0 && rate < 1.0))
        fail(ErrorCategory::Config, "dropout rate must be in [0, 1), got " + std::to_string(rate));
    if (!training || rate == 0.0) return a;
    const Real keep_scale = Real(1.0 / (1.0 - rate));
    Tensor<Real> mask(shape(a), Real(0));
    for (auto& m : mask.data()) m = rng.uniform() >= rate ? keep_scale : Real(0);
    Tensor<Real> out = value(a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
    return record(std::move(out), [a, mask = std::move(mask)](Tape& t, Var o) {
        const auto& g = t.grad(o);
        auto& ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * mask[i];
    });
}

template <typename Real>
Var Tape<Real>::matmul(Var a, Var b) {
    require_rank2(shape(a), "matmul");
    require_rank2(shape(b), "matmul");
    if (shape(a)[1] != shape(b)[0])
        fail(ErrorCategory::Shape,
             "matmul: inner dimensions disagree " + shape_str(shape(a)) + " x " + shape_str(shape(b)));
    Tensor<Real> out(Shape{shape(a)[0], shape(b)[1]});
    mmat(out).noalias() = cmat(value(a)) * cmat(value(b));
    return record(std::move(out), [a, b](Tape& t, Var o) {
        const auto& g = t.grad(o);
        mmat(t.grad(a)).noalias() += cmat(g) * cmat(t.value(b)).transpose();
        mmat(t.grad(b)).noalias() += cmat(t.value(a)).transpose() * cmat(g);
    });
}

template <typename Real>
Var Tape<Real>::matmul_nt(Var a, Var b) {
    require_rank2(shape(a), "matmul_nt");
    require_rank2(shape(b), "matmul_nt");
    if (shape(a)[1] != shape(b)[1])
        fail(ErrorCategory::Shape, "matmul_nt: inner dimensions disagree " + shape_str(shape(a)) + " x " +
                                       shape_str(shape(b)) + "^T");
    Tensor<Real> out(Shape{shape(a)[0], shape(b)[0]});
    mmat(out).noalias() = cmat(value(a)) * cmat(value(b)).transpose();
    return record(std::move(out), [a, b](Tape& t, Var o) {
        const auto& g = t.grad(o);
        mmat(t.grad(a)).noalias() += cmat(g) * cmat(t.value(b));
        mmat(t.grad(b)).noalias() += cmat(g).transpose() * cmat(t.value(a));
    });
}

template <typename Real>
Var Tape<Real>::add_bias(Var x, Var bias) {
    require_rank2(shape(x), "add_bias");
    if (shape(bias) != Shape{shape(x)[1]})
        fail(ErrorCategory::Shape,
             "add_bias: bias shape " + shape_str(shape(bias)) + " does not match rows of " + shape_str(shape(x)));
    Tensor<Real> out = value(x);
    const auto& bv = value(bias);
    const std::size_t n = out.dim(0), m = out.dim(1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) out.at(i, j) += bv[j];
    return record(std::move(out), [x, bias, n, m](Tape& t, Var o) {
        const auto& g = t.grad(o);
        auto& gx = t.grad(x);
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
        auto& gb = t.grad(bias);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) gb[j] += g.at(i, j);
    });
}

template <typename Real>
Var Tape<Real>::gather_rows(Var table, std::span<const std::int32_t> rows) {
    require_rank2(shape(table), "gather_rows");
    require(!rows.empty(), ErrorCategory::Shape, "gather_rows: no rows requested");
    const auto& tv = value(table);
    const std::size_t n_rows = tv.dim(0), width = tv.dim(1);
    Tensor<Real> out(Shape{rows.size(), width});
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto idx = rows[r];
        if (idx < 0 || static_cast<std::size_t>(idx) >= n_rows)
            fail(ErrorCategory::Input, "index " + std::to_string(idx) + " out of vocabulary range [0, " +
                                           std::to_string(n_rows) + ")");
        std::copy_n(tv.ptr() + idx * width, width, out.ptr() + r * width);
    }
    std::vector<std::int32_t> idx(rows.begin(), rows.end());
    return record(std::move(out), [table, width, idx = std::move(idx)](Tape& t, Var o) {
        const auto& g = t.grad(o);
        auto& gt = t.grad(table);
        for (std::size_t r = 0; r < idx.size(); ++r) {
            Real* dst = gt.ptr() + static_cast<std::size_t>(idx[r]) * width;
            const Real* src = g.ptr() + r * width;
            for (std::size_t j = 0; j < width; ++j) dst[j] += src[j];
        }
    });
}

template <typename Real>
Var Tape<Real>::reshape(Var a, Shape new_shape) {
    Tensor<Real> out = value(a);
    out.reshape(std::move(new_shape));
    return record(std::move(out), [a](Tape& t, Var o) {
        const auto& g = t.grad(o);
        auto& ga = t.grad(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    });
}

template <typename Real>
Var Tape<Real>::sum(Var a) {
    Real s = 0;
    for (auto x : value(a).data()) s += x;
    return record(Tensor<Real>::scalar(s), [a](Tape& t, Var o) {
        const Real g = t.grad(o)[0];
        for (auto& x : t.grad(a).data()) x += g;
    });
}

template <typename Real>
Var Tape<Real>::row_sum(Var a) {
    const auto& av = value(a);
    const std::size_t n = av.dim(0), w = av.size() / n;
    Tensor<Real> out(Shape{n, 1});
    for (std::size_t i = 0; i < n; ++i) {
        Real s = 0;
        for (std::size_t j = 0; j < w; ++j) s += av[i * w + j];
        out[i] = s;
    }
    return record(std::move(out), [a, n, w](Tape& t, Var o) {
        const auto& g = t.grad(o);
        auto& ga = t.grad(a);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < w; ++j) ga[i * w + j] += g[i];
    });
}

template class Tape<float>;
template class Tape<double>;

}  // namespace fiinet::engine
