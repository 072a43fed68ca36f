#include "fiinet/crosses/layout.hpp"

#include <ostream>

#include "fiinet/error.hpp"

namespace fiinet::crosses {

std::vector<FieldPair> enumerate_pairs(std::size_t f) {
    require(f >= 2, ErrorCategory::Config, "need at least 2 fields");
    std::vector<FieldPair> out;
    out.reserve(f * (f - 1) / 2);
    for (std::size_t i = 0; i < f; ++i)
        for (std::size_t j = i + 1; j < f; ++j) out.push_back({i, j});
    return out;
}

std::vector<FieldTriple> enumerate_triples(std::size_t f) {
    require(f >= 3, ErrorCategory::Config, "need at least 3 fields for third-order crosses");
    std::vector<FieldTriple> out;
    out.reserve(f * (f - 1) * (f - 2) / 6);
    for (std::size_t i = 0; i < f; ++i)
        for (std::size_t j = i + 1; j < f; ++j)
            for (std::size_t k = j + 1; k < f; ++k) out.push_back({i, j, k});
    return out;
}

ChannelLayout ChannelLayout::full(std::size_t f) {
    auto pairs = enumerate_pairs(f);
    return ChannelLayout(f, std::move(pairs), f >= 3 ? enumerate_triples(f) : std::vector<FieldTriple>{});
}

ChannelLayout ChannelLayout::pairs_only(std::size_t f) {
    return ChannelLayout(f, enumerate_pairs(f), {});
}

ChannelLayout ChannelLayout::triples_only(std::size_t f) {
    return ChannelLayout(f, {}, enumerate_triples(f));
}

Channel ChannelLayout::channel(std::size_t c) const {
    if (c < pairs_.size()) return {CrossOrder::Second, {pairs_[c][0], pairs_[c][1], 0}};
    c -= pairs_.size();
    if (c < triples_.size()) return {CrossOrder::Third, {triples_[c][0], triples_[c][1], triples_[c][2]}};
    fail(ErrorCategory::Shape, "channel index out of range");
}

std::size_t ChannelLayout::find(const std::vector<std::size_t>& fields) const {
    if (fields.size() == 2) {
        for (std::size_t c = 0; c < pairs_.size(); ++c)
            if (pairs_[c][0] == fields[0] && pairs_[c][1] == fields[1]) return c;
    } else if (fields.size() == 3) {
        for (std::size_t c = 0; c < triples_.size(); ++c)
            if (triples_[c][0] == fields[0] && triples_[c][1] == fields[1] && triples_[c][2] == fields[2])
                return pairs_.size() + c;
    }
    return channel_count();
}

std::string field_tuple(const Channel& ch, const std::vector<std::string>& field_names) {
    std::string out;
    for (std::size_t i = 0; i < ch.arity(); ++i) {
        if (i) out += ',';
        out += ch.fields[i] < field_names.size() ? field_names[ch.fields[i]] : std::to_string(ch.fields[i]);
    }
    return out;
}

void ChannelLayout::write(std::ostream& os, const std::vector<std::string>& field_names) const {
    for (std::size_t c = 0; c < channel_count(); ++c) {
        const Channel ch = channel(c);
        os << c << '\t' << static_cast<int>(ch.order) << '\t' << field_tuple(ch, field_names) << '\n';
    }
}

}  // namespace fiinet::crosses
