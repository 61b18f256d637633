#include "namelink/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "namelink/allocation.hpp"
#include "namelink/rng.hpp"

namespace namelink {

const char* corruption_status_name(CorruptionStatus s) {
    switch (s) {
        case CorruptionStatus::uncorrupted: return "uncorrupted";
        case CorruptionStatus::forename_only: return "forename_only";
        case CorruptionStatus::surname_only: return "surname_only";
        default: return "both";
    }
}

CorruptionStatus status_from_exposure(const std::array<bool, kFieldCount>& exposed) {
    const bool fore = exposed[static_cast<int>(Field::forename)];
    const bool sur = exposed[static_cast<int>(Field::surname)];
    if (fore && sur) return CorruptionStatus::both;
    if (fore) return CorruptionStatus::forename_only;
    if (sur) return CorruptionStatus::surname_only;
    return CorruptionStatus::uncorrupted;
}

std::vector<std::size_t> stratified_sample(const Dataset& data, const CorruptionAudit& audit,
                                           double fraction, std::uint64_t seed) {
    const auto exposure = audit.exposure_by_id();

    std::map<StratumKey, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto it = exposure.find(data[i].id);
        const CorruptionStatus status =
            it == exposure.end() ? CorruptionStatus::uncorrupted : status_from_exposure(it->second);
        strata[{data[i].group, status}].push_back(i);
    }

    const std::int64_t total_take =
        std::llround(fraction * static_cast<double>(data.size()));
    std::vector<double> sizes;
    std::vector<std::int64_t> capacity;
    sizes.reserve(strata.size());
    for (const auto& [key, members] : strata) {
        sizes.push_back(static_cast<double>(members.size()));
        capacity.push_back(static_cast<std::int64_t>(members.size()));
    }
    const auto takes = allocate_with_capacity(total_take, sizes, capacity);

    std::vector<std::size_t> sample;
    sample.reserve(total_take);
    std::size_t s = 0;
    for (const auto& [key, members] : strata) {
        std::vector<std::size_t> pool = members;
        SplitMix64 rng(combine_seed(combine_seed(seed, hash_bytes(key.group)),
                                    static_cast<std::uint64_t>(key.status)));
        rng.shuffle(pool);
        const std::size_t take = static_cast<std::size_t>(takes[s++]);
        sample.insert(sample.end(), pool.begin(), pool.begin() + std::min(take, pool.size()));
    }
    std::sort(sample.begin(), sample.end());
    return sample;
}

OutcomeCounts classify_outcomes(
    std::span<const MatchDecision> decisions, const Dataset& original,
    const std::unordered_map<std::string, std::array<bool, kFieldCount>>& exposure) {
    OutcomeCounts counts;
    for (const MatchDecision& d : decisions) {
        const std::size_t gold = original.index_of(d.left_id);
        if (gold == Dataset::npos) throw MissingGoldError(d.left_id);

        const auto it = exposure.find(d.left_id);
        const CorruptionStatus status =
            it == exposure.end() ? CorruptionStatus::uncorrupted : status_from_exposure(it->second);
        OutcomeTally& tally = counts[{original[gold].group, status}];
        ++tally.n;
        if (!d.right_id) {
            ++tally.missed;
        } else if (*d.right_id == d.left_id) {
            ++tally.correct;
        } else {
            ++tally.false_match;
        }
    }
    return counts;
}

namespace {

ErrorRates rates_from(std::int64_t n, std::int64_t false_match, std::int64_t missed) {
    ErrorRates r;
    r.n = n;
    if (n > 0) {
        r.fmr = static_cast<double>(false_match) / static_cast<double>(n);
        r.mmr = static_cast<double>(missed) / static_cast<double>(n);
    }
    return r;
}

}  // namespace

RatesReport rates_and_disparities(const OutcomeCounts& counts,
                                  const std::string& reference_group) {
    RatesReport report;
    report.reference_group = reference_group;

    std::map<std::string, OutcomeTally> by_group;
    OutcomeTally overall;
    for (const auto& [key, tally] : counts) {
        OutcomeTally& g = by_group[key.group];
        g.n += tally.n;
        g.correct += tally.correct;
        g.false_match += tally.false_match;
        g.missed += tally.missed;
        overall.n += tally.n;
        overall.correct += tally.correct;
        overall.false_match += tally.false_match;
        overall.missed += tally.missed;
    }
    report.overall = rates_from(overall.n, overall.false_match, overall.missed);

    for (const auto& [group, tally] : by_group) {
        if (tally.n == 0) continue;  // absent, not zero
        report.by_group[group] = rates_from(tally.n, tally.false_match, tally.missed);
    }

    const auto ref = report.by_group.find(reference_group);
    if (ref == report.by_group.end()) throw EmptyGroupError(reference_group);

    for (const auto& [group, rates] : report.by_group) {
        report.fmr_disparity_pp[group] = (rates.fmr - ref->second.fmr) * 100.0;
        report.mmr_disparity_pp[group] = (rates.mmr - ref->second.mmr) * 100.0;
    }
    return report;
}

double calibrate_threshold(std::span<const double> best_weights, double target_mmr) {
    if (best_weights.empty()) throw Error("cannot calibrate without observed weights");
    const double n = static_cast<double>(best_weights.size());

    std::vector<double> finite;
    finite.reserve(best_weights.size());
    std::int64_t no_candidate = 0;
    for (const double w : best_weights) {
        if (w == kNoCandidateWeight) {
            ++no_candidate;
        } else {
            finite.push_back(w);
        }
    }
    std::sort(finite.begin(), finite.end());

    std::vector<double> thresholds;
    thresholds.push_back(-std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < finite.size(); ++i) {
        if (i == 0 || finite[i] != finite[i - 1]) thresholds.push_back(finite[i]);
    }
    thresholds.push_back(std::numeric_limits<double>::infinity());

    // ties (up to rounding noise) keep the earlier, i.e. lower, threshold
    constexpr double kTieEpsilon = 1e-9;
    double best_threshold = thresholds.front();
    double best_distance = std::numeric_limits<double>::infinity();
    for (const double t : thresholds) {
        const auto below =
            std::lower_bound(finite.begin(), finite.end(), t) - finite.begin();
        const double mmr = (static_cast<double>(below) + static_cast<double>(no_candidate)) / n;
        const double distance = std::abs(mmr - target_mmr);
        if (distance < best_distance - kTieEpsilon) {
            best_distance = distance;
            best_threshold = t;
        }
    }
    return best_threshold;
}

namespace {

// two-sided 97.5% Student t quantiles by degrees of freedom
constexpr double kT975[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                            2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                            2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                            2.060,  2.056, 2.052, 2.048, 2.045, 2.042};

double t_quantile_975(int df) {
    if (df < 1) return 0.0;
    if (df <= 30) return kT975[df - 1];
    return 1.96;
}

}  // namespace

ReplicateSummary aggregate_replicates(std::string metric, std::vector<double> values) {
    if (values.size() < 2) {
        throw Error("replicate aggregation needs at least 2 values, got " +
                    std::to_string(values.size()));
    }
    ReplicateSummary s;
    s.metric = std::move(metric);
    const double k = static_cast<double>(values.size());
    double mean = 0.0;
    for (const double v : values) mean += v;
    mean /= k;
    double ss = 0.0;
    for (const double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (k - 1.0));
    const double half = t_quantile_975(static_cast<int>(values.size()) - 1) * sd / std::sqrt(k);
    s.values = std::move(values);
    s.mean = mean;
    s.ci_low = mean - half;
    s.ci_high = mean + half;
    return s;
}

}  // namespace namelink
