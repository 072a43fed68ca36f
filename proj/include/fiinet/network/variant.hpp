#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fiinet/sk/attention.hpp"

namespace fiinet::network {

enum class Variant {
    FiiNet,    // both cross branches, SK attention, DNN
    FiiNetSH,  // both branches fused straight into the DNN, no SK layer
    FiiNetS,   // third-order branch only
    FiiNetH,   // second-order branch only
    LR,        // linear part only
    FM,        // linear part plus sum of pairwise embedding inner products
};

std::string_view variant_name(Variant v);
/// Accepts the canonical names ("fiinet", "fiinet-sh", ...) and the ablation
/// shorthands "sh", "s", "h".
Variant parse_variant(std::string_view name);

struct ModelConfig {
    Variant variant = Variant::FiiNet;
    std::size_t embedding_dim = 32;
    sk::SkConfig sk;
    std::vector<std::size_t> hidden_sizes{128, 64};
    double dropout = 0.2;
    std::uint64_t seed = 2023;
};

}  // namespace fiinet::network
