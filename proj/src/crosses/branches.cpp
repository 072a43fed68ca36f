#include "fiinet/crosses/branches.hpp"

#include <vector>

#include "fiinet/error.hpp"

namespace fiinet::crosses {

namespace {

// Writes one example's live channels of the requested order into `out`
// (C x k, pre-zeroed). rows[i] points at the k-vector of field i.
template <typename Real>
void fill_crosses(const ChannelLayout& layout, CrossOrder order, const Real* const* rows, std::size_t k, Real* out) {
    if (order == CrossOrder::Second) {
        const auto& pairs = layout.pairs();
        for (std::size_t c = 0; c < pairs.size(); ++c) {
            const Real* a = rows[pairs[c][0]];
            const Real* b = rows[pairs[c][1]];
            Real* dst = out + c * k;
            for (std::size_t t = 0; t < k; ++t) dst[t] = a[t] * b[t];
        }
    } else {
        const auto& triples = layout.triples();
        const std::size_t base = layout.pair_count();
        for (std::size_t c = 0; c < triples.size(); ++c) {
            const Real* a = rows[triples[c][0]];
            const Real* b = rows[triples[c][1]];
            const Real* d = rows[triples[c][2]];
            Real* dst = out + (base + c) * k;
            for (std::size_t t = 0; t < k; ++t) dst[t] = a[t] * b[t] * d[t];
        }
    }
}

template <typename Real>
Tensor<Real> build_single(const Tensor<Real>& embeddings, const ChannelLayout& layout, CrossOrder order) {
    if (embeddings.rank() != 2 || embeddings.dim(0) != layout.field_count())
        fail(ErrorCategory::Shape, "cross branch: embeddings " + engine::shape_str(embeddings.shape()) +
                                       " do not have " + std::to_string(layout.field_count()) + " field rows");
    if (order == CrossOrder::Third && layout.field_count() < 3)
        fail(ErrorCategory::Config, "need at least 3 fields for third-order crosses");
    const std::size_t f = embeddings.dim(0), k = embeddings.dim(1);
    std::vector<const Real*> rows(f);
    for (std::size_t i = 0; i < f; ++i) rows[i] = embeddings.ptr() + i * k;
    Tensor<Real> out(engine::Shape{layout.channel_count(), k}, Real(0));
    fill_crosses(layout, order, rows.data(), k, out.ptr());
    return out;
}

template <typename Real>
Var build_batched(Tape<Real>& tape, std::span<const Var> fields, const ChannelLayout& layout, CrossOrder order) {
    if (fields.size() != layout.field_count())
        fail(ErrorCategory::Shape, "cross branch: got " + std::to_string(fields.size()) + " field embeddings, layout has " +
                                       std::to_string(layout.field_count()));
    if (order == CrossOrder::Third && layout.field_count() < 3)
        fail(ErrorCategory::Config, "need at least 3 fields for third-order crosses");
    const engine::Shape& s0 = tape.shape(fields[0]);
    if (s0.size() != 2) fail(ErrorCategory::Shape, "cross branch: field embeddings must be [B, k]");
    for (auto v : fields) engine::check_same_shape(s0, tape.shape(v), "cross branch");

    const std::size_t f = fields.size(), batch = s0[0], k = s0[1], C = layout.channel_count();
    Tensor<Real> out(engine::Shape{batch, C, k}, Real(0));
    std::vector<const Real*> rows(f);
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t i = 0; i < f; ++i) rows[i] = tape.value(fields[i]).ptr() + b * k;
        fill_crosses(layout, order, rows.data(), k, out.ptr() + b * C * k);
    }

    std::vector<Var> inputs(fields.begin(), fields.end());
    auto backward = [inputs, layout, order, batch, k, C](Tape<Real>& t, Var o) {
        const auto& g = t.grad(o);
        const std::size_t f = inputs.size();
        std::vector<const Real*> e(f);
        std::vector<Real*> ge(f);
        for (std::size_t i = 0; i < f; ++i) ge[i] = t.grad(inputs[i]).ptr();
        for (std::size_t b = 0; b < batch; ++b) {
            for (std::size_t i = 0; i < f; ++i) e[i] = t.value(inputs[i]).ptr() + b * k;
            const Real* gb = g.ptr() + b * C * k;
            const std::size_t off = b * k;
            if (order == CrossOrder::Second) {
                const auto& pairs = layout.pairs();
                for (std::size_t c = 0; c < pairs.size(); ++c) {
                    const auto [i, j] = pairs[c];
                    const Real* gc = gb + c * k;
                    for (std::size_t t2 = 0; t2 < k; ++t2) {
                        ge[i][off + t2] += gc[t2] * e[j][t2];
                        ge[j][off + t2] += gc[t2] * e[i][t2];
                    }
                }
            } else {
                const auto& triples = layout.triples();
                const std::size_t base = layout.pair_count();
                for (std::size_t c = 0; c < triples.size(); ++c) {
                    const auto [i, j, l] = triples[c];
                    const Real* gc = gb + (base + c) * k;
                    for (std::size_t t2 = 0; t2 < k; ++t2) {
                        ge[i][off + t2] += gc[t2] * e[j][t2] * e[l][t2];
                        ge[j][off + t2] += gc[t2] * e[i][t2] * e[l][t2];
                        ge[l][off + t2] += gc[t2] * e[i][t2] * e[j][t2];
                    }
                }
            }
        }
    };
    return tape.record(std::move(out), std::move(backward));
}

}  // namespace

template <typename Real>
Tensor<Real> build_branch_2(const Tensor<Real>& embeddings, const ChannelLayout& layout) {
    return build_single(embeddings, layout, CrossOrder::Second);
}

template <typename Real>
Tensor<Real> build_branch_3(const Tensor<Real>& embeddings, const ChannelLayout& layout) {
    return build_single(embeddings, layout, CrossOrder::Third);
}

template <typename Real>
Var branch_2(Tape<Real>& tape, std::span<const Var> fields, const ChannelLayout& layout) {
    return build_batched(tape, fields, layout, CrossOrder::Second);
}

template <typename Real>
Var branch_3(Tape<Real>& tape, std::span<const Var> fields, const ChannelLayout& layout) {
    return build_batched(tape, fields, layout, CrossOrder::Third);
}

#define FIINET_INSTANTIATE(R)                                                                    \
    template Tensor<R> build_branch_2<R>(const Tensor<R>&, const ChannelLayout&);                \
    template Tensor<R> build_branch_3<R>(const Tensor<R>&, const ChannelLayout&);                \
    template Var branch_2<R>(Tape<R>&, std::span<const Var>, const ChannelLayout&);              \
    template Var branch_3<R>(Tape<R>&, std::span<const Var>, const ChannelLayout&);
FIINET_INSTANTIATE(float)
FIINET_INSTANTIATE(double)
#undef FIINET_INSTANTIATE

}  // namespace fiinet::crosses
