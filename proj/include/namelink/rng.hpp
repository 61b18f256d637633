#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace namelink {

// 64-bit mix (SplitMix64 finalizer). Used both as the generator step and to
// derive independent stream keys from structured inputs.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t combine_seed(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2)));
}

std::uint64_t hash_bytes(std::string_view s);

// Counter-based SplitMix64 stream. The state advances by a fixed increment,
// so the n-th output is a pure function of (key, n); streams keyed per
// (seed, record id, field) corrupt records independently of dataset order.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t key) : state_(key) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Unbiased integer in [0, bound) via 128-bit multiply rejection.
    std::uint64_t next_below(std::uint64_t bound);

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

// Index drawn from an explicit discrete distribution; `cumulative` must be
// non-decreasing with back() == total mass.
std::size_t sample_cumulative(std::span<const double> cumulative, SplitMix64& rng);

}  // namespace namelink
