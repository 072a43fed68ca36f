#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fiinet::engine {

/// Mixes a base seed with a stream tag into an independent 64-bit seed.
/// Uses splitmix64 finalization so nearby inputs give unrelated outputs.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag);
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag);

/// Seeded generator with platform-independent draws. std::mt19937_64 has a
/// standardized output sequence; the distributions below are written out by
/// hand because the std:: ones are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    bool bernoulli(double p) { return uniform() < p; }
    /// Uniform integer in [0, n). Rejection sampling keeps it unbiased.
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 gen_;
};

/// Fisher-Yates shuffle driven by Rng::below.
template <typename It>
void shuffle(It first, It last, Rng& rng) {
    auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
        auto j = rng.below(i);
        using std::swap;
        swap(first[i - 1], first[j]);
    }
}

}  // namespace fiinet::engine
