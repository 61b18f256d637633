#include "namelink/rng.hpp"

namespace namelink {

std::uint64_t hash_bytes(std::string_view s) {
    // FNV-1a, then mixed so short keys spread over the full word.
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return mix64(h);
}

std::uint64_t SplitMix64::next_below(std::uint64_t bound) {
    // Lemire's multiply-shift with rejection; unbiased for any bound.
    if (bound <= 1) return 0;
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    std::uint64_t low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            x = next_u64();
            m = static_cast<__uint128_t>(x) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

std::size_t sample_cumulative(std::span<const double> cumulative, SplitMix64& rng) {
    const double total = cumulative.back();
    const double u = rng.next_double() * total;
    std::size_t lo = 0, hi = cumulative.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (cumulative[mid] <= u) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    return lo;
}

}  // namespace namelink
