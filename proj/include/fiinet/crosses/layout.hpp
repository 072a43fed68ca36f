#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fiinet::crosses {

using FieldPair = std::array<std::size_t, 2>;
using FieldTriple = std::array<std::size_t, 3>;

/// All i<j in lexicographic order. Throws for f < 2.
std::vector<FieldPair> enumerate_pairs(std::size_t f);
/// All i<j<k in lexicographic order. Throws for f < 3.
std::vector<FieldTriple> enumerate_triples(std::size_t f);

enum class CrossOrder : std::uint8_t { Second = 2, Third = 3 };

struct Channel {
    CrossOrder order;
    std::array<std::size_t, 3> fields;  // fields[2] unused for pairs

    std::size_t arity() const noexcept { return order == CrossOrder::Second ? 2 : 3; }
};

/// Fixed channel axis shared by every cross tensor of one model. Pair
/// channels come first (0..C2-1), triple channels after (C2..C-1), each
/// group lexicographic. Immutable once built.
class ChannelLayout {
public:
    /// Pairs and (when f >= 3) triples.
    static ChannelLayout full(std::size_t f);
    static ChannelLayout pairs_only(std::size_t f);
    static ChannelLayout triples_only(std::size_t f);

    std::size_t field_count() const noexcept { return f_; }
    std::size_t pair_count() const noexcept { return pairs_.size(); }
    std::size_t triple_count() const noexcept { return triples_.size(); }
    std::size_t channel_count() const noexcept { return pairs_.size() + triples_.size(); }

    const std::vector<FieldPair>& pairs() const noexcept { return pairs_; }
    const std::vector<FieldTriple>& triples() const noexcept { return triples_; }
    Channel channel(std::size_t c) const;

    /// Channel index of a pair or triple of field indices, or channel_count() if absent.
    std::size_t find(const std::vector<std::size_t>& fields) const;

    /// One line per channel: index TAB order TAB comma-joined field names.
    void write(std::ostream& os, const std::vector<std::string>& field_names) const;

    bool operator==(const ChannelLayout&) const = default;

private:
    ChannelLayout(std::size_t f, std::vector<FieldPair> pairs, std::vector<FieldTriple> triples)
        : f_(f), pairs_(std::move(pairs)), triples_(std::move(triples)) {}

    std::size_t f_ = 0;
    std::vector<FieldPair> pairs_;
    std::vector<FieldTriple> triples_;
};

std::string field_tuple(const Channel& ch, const std::vector<std::string>& field_names);

}  // namespace fiinet::crosses
