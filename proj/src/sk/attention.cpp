#include "fiinet/sk/attention.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "fiinet/error.hpp"

namespace fiinet::sk {

using engine::Shape;
using engine::shape_str;

std::size_t reduced_dim(std::size_t channels, const SkConfig& config) {
    require(config.reduction_ratio >= 1, ErrorCategory::Config, "reduction ratio must be >= 1");
    require(channels >= 1, ErrorCategory::Config, "attention needs at least one channel");
    const std::size_t squeezed = (channels + config.reduction_ratio - 1) / config.reduction_ratio;
    return std::max(squeezed, config.min_reduced_dim);
}

template <typename Real>
Var fuse_sum(Tape<Real>& tape, Var second, Var third) {
    if (tape.shape(second) != tape.shape(third))
        fail(ErrorCategory::Shape, "fuse: branch layouts disagree " + shape_str(tape.shape(second)) + " vs " +
                                       shape_str(tape.shape(third)));
    return tape.add(second, third);
}

template <typename Real>
Var global_pool(Tape<Real>& tape, Var fused, Pooling pooling) {
    const Shape& s = tape.shape(fused);
    if (s.size() != 3) fail(ErrorCategory::Shape, "global_pool: expected [B, C, k], got " + shape_str(s));
    const std::size_t rows = s[0] * s[1], k = s[2];
    const auto& u = tape.value(fused);
    Tensor<Real> z(Shape{s[0], s[1]});
    std::vector<std::size_t> argmax;
    if (pooling == Pooling::Mean) {
        for (std::size_t r = 0; r < rows; ++r) {
            Real acc = 0;
            for (std::size_t t = 0; t < k; ++t) acc += u[r * k + t];
            z[r] = acc / static_cast<Real>(k);
        }
        return tape.record(std::move(z), [fused, rows, k](Tape<Real>& t, Var o) {
            const auto& g = t.grad(o);
            auto& gu = t.grad(fused);
            const Real inv = Real(1) / static_cast<Real>(k);
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t i = 0; i < k; ++i) gu[r * k + i] += g[r] * inv;
        });
    }
    argmax.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t best = 0;
        for (std::size_t t = 1; t < k; ++t)
            if (u[r * k + t] > u[r * k + best]) best = t;
        argmax[r] = best;
        z[r] = u[r * k + best];
    }
    return tape.record(std::move(z), [fused, k, argmax = std::move(argmax)](Tape<Real>& t, Var o) {
        const auto& g = t.grad(o);
        auto& gu = t.grad(fused);
        for (std::size_t r = 0; r < argmax.size(); ++r) gu[r * k + argmax[r]] += g[r];
    });
}

template <typename Real>
Var reduce(Tape<Real>& tape, Var stats, Var w1) {
    return tape.relu(tape.matmul_nt(stats, w1));
}

template <typename Real>
Var two_way_softmax(Tape<Real>& tape, Var logits_a, Var logits_b) {
    engine::check_same_shape(tape.shape(logits_a), tape.shape(logits_b), "select_softmax");
    const Shape& s = tape.shape(logits_a);
    if (s.size() != 2) fail(ErrorCategory::Shape, "select_softmax: logits must be [B, C], got " + shape_str(s));
    const auto& la = tape.value(logits_a);
    const auto& lb = tape.value(logits_b);
    Tensor<Real> w(Shape{s[0], s[1], 2});
    for (std::size_t i = 0; i < la.size(); ++i) {
        if (!std::isfinite(la[i]) || !std::isfinite(lb[i]))
            fail(ErrorCategory::Numeric, "select_softmax: non-finite attention logit");
        const Real m = std::max(la[i], lb[i]);
        const Real ea = std::exp(la[i] - m);
        const Real eb = std::exp(lb[i] - m);
        const Real denom = ea + eb;
        w[2 * i] = ea / denom;
        w[2 * i + 1] = eb / denom;
    }
    return tape.record(std::move(w), [logits_a, logits_b](Tape<Real>& t, Var o) {
        const auto& g = t.grad(o);
        const auto& wv = t.value(o);
        auto& ga = t.grad(logits_a);
        auto& gb = t.grad(logits_b);
        for (std::size_t i = 0; i < ga.size(); ++i) {
            const Real a = wv[2 * i], b = wv[2 * i + 1];
            const Real d = a * b * (g[2 * i] - g[2 * i + 1]);
            ga[i] += d;
            gb[i] -= d;
        }
    });
}

template <typename Real>
Var select_softmax(Tape<Real>& tape, Var descriptor, Var a_matrix, Var b_matrix) {
    engine::check_same_shape(tape.shape(a_matrix), tape.shape(b_matrix), "select_softmax branch matrices");
    return two_way_softmax(tape, tape.matmul_nt(descriptor, a_matrix), tape.matmul_nt(descriptor, b_matrix));
}

template <typename Real>
Var apply_select(Tape<Real>& tape, Var second, Var third, Var weights) {
    engine::check_same_shape(tape.shape(second), tape.shape(third), "apply_select");
    const Shape& s = tape.shape(second);
    if (s.size() != 3) fail(ErrorCategory::Shape, "apply_select: expected [B, C, k], got " + shape_str(s));
    if (tape.shape(weights) != Shape{s[0], s[1], 2})
        fail(ErrorCategory::Shape, "apply_select: weights " + shape_str(tape.shape(weights)) + " do not match " +
                                       shape_str(s));
    const std::size_t rows = s[0] * s[1], k = s[2];
    const auto& w = tape.value(weights);
    for (std::size_t r = 0; r < rows; ++r) {
        const double total = static_cast<double>(w[2 * r]) + static_cast<double>(w[2 * r + 1]);
        if (std::abs(total - 1.0) > kWeightSumTolerance)
            fail(ErrorCategory::State, "apply_select: branch weights sum to " + std::to_string(total) + ", not 1");
    }
    const auto& u2 = tape.value(second);
    const auto& u3 = tape.value(third);
    Tensor<Real> v(s);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t t = 0; t < k; ++t) v[r * k + t] = w[2 * r] * u2[r * k + t] + w[2 * r + 1] * u3[r * k + t];

    return tape.record(std::move(v), [second, third, weights, rows, k](Tape<Real>& t, Var o) {
        const auto& g = t.grad(o);
        const auto& wv = t.value(weights);
        const auto& u2v = t.value(second);
        const auto& u3v = t.value(third);
        auto& g2 = t.grad(second);
        auto& g3 = t.grad(third);
        auto& gw = t.grad(weights);
        for (std::size_t r = 0; r < rows; ++r) {
            Real da = 0, db = 0;
            for (std::size_t i = 0; i < k; ++i) {
                const std::size_t idx = r * k + i;
                g2[idx] += wv[2 * r] * g[idx];
                g3[idx] += wv[2 * r + 1] * g[idx];
                da += g[idx] * u2v[idx];
                db += g[idx] * u3v[idx];
            }
            gw[2 * r] += da;
            gw[2 * r + 1] += db;
        }
    });
}

template <typename Real>
std::vector<double> mean_effective_weights(const Tensor<Real>& weights, const crosses::ChannelLayout& layout) {
    const std::size_t C = layout.channel_count();
    if (weights.rank() != 3 || weights.dim(1) != C || weights.dim(2) != 2)
        fail(ErrorCategory::Shape, "attention weights " + shape_str(weights.shape()) + " do not match layout with " +
                                       std::to_string(C) + " channels");
    const std::size_t n = weights.dim(0);
    std::vector<double> mean(C, 0.0);
    for (std::size_t e = 0; e < n; ++e)
        for (std::size_t c = 0; c < C; ++c) {
            const std::size_t branch = c < layout.pair_count() ? 0 : 1;
            mean[c] += static_cast<double>(weights.at(e, c, branch));
        }
    for (auto& m : mean) m /= static_cast<double>(n);
    return mean;
}

std::vector<AttentionRow> attention_rows(const crosses::ChannelLayout& layout,
                                         const std::vector<std::string>& field_names,
                                         const std::vector<double>& before, const std::vector<double>& after) {
    const std::size_t C = layout.channel_count();
    require(before.size() == C && after.size() == C, ErrorCategory::Shape,
            "attention report: weight vectors do not match the channel count");
    std::vector<AttentionRow> rows;
    rows.reserve(C);
    for (std::size_t c = 0; c < C; ++c) {
        const auto ch = layout.channel(c);
        rows.push_back({c, static_cast<int>(ch.order), crosses::field_tuple(ch, field_names), before[c], after[c]});
    }
    return rows;
}

void write_attention_report(std::ostream& os, const std::vector<AttentionRow>& rows) {
    os << "channel_index\torder\tfield_tuple\tweight_before\tweight_after\n";
    os << std::setprecision(9);
    for (const auto& r : rows)
        os << r.channel << '\t' << r.order << '\t' << r.fields << '\t' << r.weight_before << '\t' << r.weight_after
           << '\n';
}

#define FIINET_INSTANTIATE(R)                                                                              \
    template Var fuse_sum<R>(Tape<R>&, Var, Var);                                                          \
    template Var global_pool<R>(Tape<R>&, Var, Pooling);                                                   \
    template Var reduce<R>(Tape<R>&, Var, Var);                                                            \
    template Var two_way_softmax<R>(Tape<R>&, Var, Var);                                                   \
    template Var select_softmax<R>(Tape<R>&, Var, Var, Var);                                               \
    template Var apply_select<R>(Tape<R>&, Var, Var, Var);                                                 \
    template std::vector<double> mean_effective_weights<R>(const Tensor<R>&, const crosses::ChannelLayout&);
FIINET_INSTANTIATE(float)
FIINET_INSTANTIATE(double)
#undef FIINET_INSTANTIATE

}  // namespace fiinet::sk
