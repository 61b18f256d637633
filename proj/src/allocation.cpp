#include "namelink/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace namelink {

std::vector<std::int64_t> largest_remainder(std::int64_t total, std::span<const double> weights) {
    const std::size_t n = weights.size();
    std::vector<std::int64_t> out(n, 0);
    const double weight_sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (total <= 0 || weight_sum <= 0.0) return out;

    std::vector<double> remainder(n, 0.0);
    std::int64_t placed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double raw = static_cast<double>(total) * weights[i] / weight_sum;
        out[i] = static_cast<std::int64_t>(std::floor(raw));
        remainder[i] = raw - static_cast<double>(out[i]);
        placed += out[i];
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
        return weights[a] > weights[b];
    });
    for (std::size_t k = 0; placed < total && k < n; ++k) {
        ++out[order[k]];
        ++placed;
    }
    return out;
}

std::vector<std::int64_t> allocate_with_capacity(std::int64_t total,
                                                 std::span<const double> weights,
                                                 std::span<const std::int64_t> capacity) {
    const std::size_t n = weights.size();
    std::vector<std::int64_t> out(n, 0);
    std::int64_t remaining = total;

    while (remaining > 0) {
        std::vector<double> open_weights(n, 0.0);
        double open_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (out[i] < capacity[i] && weights[i] > 0.0) {
                open_weights[i] = weights[i];
                open_sum += weights[i];
            }
        }
        if (open_sum <= 0.0) break;  // every weighted slot is full

        const auto round_alloc = largest_remainder(remaining, open_weights);
        std::int64_t placed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::int64_t take = std::min(round_alloc[i], capacity[i] - out[i]);
            out[i] += take;
            placed += take;
        }
        if (placed == 0) break;
        remaining -= placed;
    }
    return out;
}

}  // namespace namelink
