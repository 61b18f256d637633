#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "namelink/corruption_engine.hpp"
#include "namelink/linkage_engine.hpp"
#include "namelink/record.hpp"

namespace namelink {

enum class CorruptionStatus : std::uint8_t { uncorrupted, forename_only, surname_only, both };

const char* corruption_status_name(CorruptionStatus s);

CorruptionStatus status_from_exposure(const std::array<bool, kFieldCount>& exposed);

struct StratumKey {
    std::string group;
    CorruptionStatus status = CorruptionStatus::uncorrupted;

    auto operator<=>(const StratumKey&) const = default;
};

// Proportional stratified sample over group x corruption status: the total
// take round(fraction*N) is spread across strata by largest remainder on
// stratum size, then drawn by simple random sampling within each stratum.
// Returns sorted record indices.
std::vector<std::size_t> stratified_sample(const Dataset& data, const CorruptionAudit& audit,
                                           double fraction, std::uint64_t seed);

struct OutcomeTally {
    std::int64_t n = 0;
    std::int64_t correct = 0;
    std::int64_t false_match = 0;
    std::int64_t missed = 0;
};

using OutcomeCounts = std::map<StratumKey, OutcomeTally>;

// Classifies each decision against its gold record (the original record with
// the same id): correct when linked to it, false match when linked elsewhere,
// missed when not linked. Throws MissingGoldError for an id absent from the
// original dataset.
OutcomeCounts classify_outcomes(
    std::span<const MatchDecision> decisions, const Dataset& original,
    const std::unordered_map<std::string, std::array<bool, kFieldCount>>& exposure);

struct ErrorRates {
    std::int64_t n = 0;
    double fmr = 0.0;
    double mmr = 0.0;
};

struct RatesReport {
    ErrorRates overall;
    std::map<std::string, ErrorRates> by_group;      // only groups with n > 0
    std::map<std::string, double> fmr_disparity_pp;  // group rate minus reference, in pp
    std::map<std::string, double> mmr_disparity_pp;
    std::string reference_group;
};

// Error rates per group and overall, plus disparities against the reference
// group in percentage points. Throws EmptyGroupError when the reference group
// has no evaluated records.
RatesReport rates_and_disparities(const OutcomeCounts& counts,
                                  const std::string& reference_group = kReferenceGroup);

// Threshold scan over every distinct observed best weight plus +-infinity,
// minimising |overall missed share - target|; ties resolve to the lower
// threshold. A weight of -infinity marks a record with no candidates, which
// is missed at every threshold.
double calibrate_threshold(std::span<const double> best_weights, double target_mmr = 0.20);

struct ReplicateSummary {
    std::string metric;
    std::vector<double> values;
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

// mean +- t(0.975, k-1) * sd / sqrt(k) over k replicate values; requires
// k >= 2.
ReplicateSummary aggregate_replicates(std::string metric, std::vector<double> values);

}  // namespace namelink
