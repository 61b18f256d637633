#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "namelink/record.hpp"

namespace namelink {

// Desk-scale registry-shaped corpus. Names are drawn from per-group pools
// (curated heads plus generated tails) under a Zipf rank distribution, with a
// small stream of one-off names so prevalence-based features vary.
struct SynthSpec {
    std::int64_t size = 50000;
    std::map<std::string, std::int64_t> group_sizes;  // explicit sizes win over shares
    std::map<std::string, double> group_shares;       // defaults are registry-like
    double zipf_alpha_forename = 0.30;
    double zipf_alpha_surname = 0.85;
    double unique_rate = 0.18;
    double drift_forename_rate = 0.03;
    double drift_surname_rate = 0.04;
    int year_min = 1940;
    int year_max = 2004;
    std::uint64_t seed = 1;
};

const std::map<std::string, double>& default_group_shares();

Dataset synth_corpus(const SynthSpec& spec);

// Adjacent-snapshot pair for discrepancy profiling: snapshot A is the base,
// snapshot B carries within-person name drift with group-specific mechanisms.
std::pair<Dataset, Dataset> synth_snapshot_pair(const Dataset& base, const SynthSpec& spec);

// Zipf head share prediction for a pool of `pool_size` ranks.
double zipf_rank1_share(std::size_t pool_size, double alpha);

std::size_t synth_forename_pool_size();

}  // namespace namelink
