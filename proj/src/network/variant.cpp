#include "fiinet/network/variant.hpp"

#include "fiinet/error.hpp"

namespace fiinet::network {

std::string_view variant_name(Variant v) {
    switch (v) {
        case Variant::FiiNet: return "fiinet";
        case Variant::FiiNetSH: return "fiinet-sh";
        case Variant::FiiNetS: return "fiinet-s";
        case Variant::FiiNetH: return "fiinet-h";
        case Variant::LR: return "lr";
        case Variant::FM: return "fm";
    }
    return "unknown";
}

Variant parse_variant(std::string_view name) {
    if (name == "fiinet") return Variant::FiiNet;
    if (name == "fiinet-sh" || name == "sh") return Variant::FiiNetSH;
    if (name == "fiinet-s" || name == "s") return Variant::FiiNetS;
    if (name == "fiinet-h" || name == "h") return Variant::FiiNetH;
    if (name == "lr") return Variant::LR;
    if (name == "fm") return Variant::FM;
    fail(ErrorCategory::Config, "unknown variant '" + std::string(name) + "'");
}

}  // namespace fiinet::network
