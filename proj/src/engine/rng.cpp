#include "fiinet/engine/rng.hpp"

namespace fiinet::engine {

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
    return splitmix64(splitmix64(base) ^ (tag * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
    // FNV-1a over the tag bytes.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return derive_seed(base, h);
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = gen_();
    } while (x >= limit);
    return x % n;
}

}  // namespace fiinet::engine
