#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace namelink {

// Largest-remainder apportionment of `total` units over non-negative weights.
// Remainder ties go to the larger weight, then the lower index. Weights that
// are all zero yield an all-zero allocation.
std::vector<std::int64_t> largest_remainder(std::int64_t total, std::span<const double> weights);

// Largest-remainder allocation with per-slot capacities. Units that cannot be
// placed because a slot is full are redistributed over slots with remaining
// capacity in proportion to their weights, repeating until the total is
// placed or every slot is full.
std::vector<std::int64_t> allocate_with_capacity(std::int64_t total,
                                                 std::span<const double> weights,
                                                 std::span<const std::int64_t> capacity);

}  // namespace namelink
