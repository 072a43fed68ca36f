#include "fiinet/ingest/synthetic.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "fiinet/engine/rng.hpp"
#include "fiinet/error.hpp"

namespace fiinet::ingest {

PlantedDataset make_planted_dataset(const PlantedConfig& config) {
    require(config.fields >= 2 && config.vocab >= 2 && config.rows >= 1, ErrorCategory::Config,
            "planted dataset needs at least 2 fields, 2 values per field and 1 row");
    require(config.field_a < config.fields && config.field_b < config.fields && config.field_a != config.field_b,
            ErrorCategory::Config, "planted fields must be two distinct existing fields");

    PlantedDataset out;
    engine::Rng pair_rng(engine::derive_seed(config.seed, "planted-pairs"));
    for (std::size_t va = 0; va < config.vocab; ++va) {
        std::vector<std::size_t> partners(config.vocab);
        std::iota(partners.begin(), partners.end(), std::size_t{0});
        engine::shuffle(partners.begin(), partners.end(), pair_rng);
        for (std::size_t i = 0; i < config.vocab / 2; ++i) out.hot_pairs.emplace(va, partners[i]);
    }

    for (std::size_t i = 0; i < config.fields; ++i) out.table.header.push_back("f" + std::to_string(i));
    out.table.header.emplace_back("click");

    engine::Rng rng(engine::derive_seed(config.seed, "planted-rows"));
    out.table.rows.reserve(config.rows);
    std::vector<std::size_t> values(config.fields);
    for (std::size_t r = 0; r < config.rows; ++r) {
        std::vector<std::string> row;
        row.reserve(config.fields + 1);
        for (std::size_t i = 0; i < config.fields; ++i) {
            values[i] = rng.below(config.vocab);
            row.push_back("v" + std::to_string(values[i]));
        }
        const bool hot = out.hot_pairs.count({values[config.field_a], values[config.field_b]}) > 0;
        const double z = config.strength * (hot ? 1.0 : 0.0) - config.offset;
        const double p = 1.0 / (1.0 + std::exp(-z));
        row.push_back(rng.bernoulli(p) ? "1" : "0");
        out.table.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace fiinet::ingest
