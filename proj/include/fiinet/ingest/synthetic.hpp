#pragma once

#include <cstdint>
#include <set>
#include <utility>

#include "fiinet/ingest/table.hpp"

namespace fiinet::ingest {

/// Synthetic CTR table with one planted field interaction. Every field is
/// uniform over `vocab` values "v0".."v{vocab-1}". A fixed half of the
/// (field a, field b) value pairs is "hot"; the label is drawn as
/// Bernoulli(sigmoid(strength * hot - offset)). Columns: f0..f{n-1}, click.
struct PlantedConfig {
    std::size_t rows = 20000;
    std::size_t fields = 6;
    std::size_t vocab = 10;
    std::size_t field_a = 0;
    std::size_t field_b = 1;
    double strength = 5.0;
    double offset = 2.5;
    std::uint64_t seed = 2023;
};

struct PlantedDataset {
    RawTable table;
    std::set<std::pair<std::size_t, std::size_t>> hot_pairs;  // (value of a, value of b)
};

PlantedDataset make_planted_dataset(const PlantedConfig& config);

}  // namespace fiinet::ingest
