#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "namelink/discrepancy_profiler.hpp"
#include "namelink/record.hpp"
#include "namelink/rng.hpp"

namespace namelink {

enum class ExposureKind : std::uint8_t { uniform, equal_exposure, disproportionate };

const char* exposure_kind_name(ExposureKind k);

// One corruption regime. `group_weights` is used only by the
// disproportionate kind; records with an empty name in the targeted field are
// ineligible and never enter any budget.
struct CorruptionSetting {
    ExposureKind kind = ExposureKind::uniform;
    double overall_rate = 0.10;
    std::map<std::string, double> group_weights;
    std::uint64_t replicate_seed = 0;
};

// Exact per-group corruption counts for one field.
struct ExposurePlan {
    Field field = Field::forename;
    std::map<std::string, std::int64_t> group_targets;
    std::int64_t total = 0;
};

// Budgets: uniform draws round(rate*N) by simple random sampling over all
// eligible records; equal_exposure takes round(rate*N_g) per group;
// disproportionate rescales the weights, converts to integer targets by
// largest remainder, and redistributes any shortfall to groups with spare
// capacity in proportion to weight.
ExposurePlan plan_exposure(const CorruptionSetting& setting, const Dataset& data, Field field);

// Record indices chosen for corruption: per-group simple random samples of
// exactly the planned counts.
std::vector<std::size_t> select_exposed(const Dataset& data, Field field,
                                        const ExposurePlan& plan, std::uint64_t seed);

struct CorruptionResult {
    std::string value;
    EditScript script;
    bool fallback = false;
};

// Applies an edit of the sampled mechanism cell to `name`. Proposals are
// drawn until the profiler's classification of (name, result) reproduces the
// cell exactly; names too short for the cell degrade along a fixed ladder
// (distance first, then position, then type) with the fallback flag set.
CorruptionResult apply_corruption(const std::string& name, const MechanismCell& cell,
                                  const CharInventory& inventory, SplitMix64& rng);

struct AuditEntry {
    std::string id;
    Field field = Field::forename;
    bool exposed = false;
    std::optional<MechanismCell> cell;  // set iff exposed
    EditScript script;                  // applied edits; empty unless exposed
    bool fallback = false;
    std::string original;
    std::string corrupted;
};

struct CorruptionAudit {
    std::vector<AuditEntry> entries;  // record order, forename before surname

    // id -> exposure flags per field
    std::unordered_map<std::string, std::array<bool, kFieldCount>> exposure_by_id() const;

    void write_csv(std::ostream& out) const;
    static CorruptionAudit read_csv(std::istream& in);
};

struct CorruptionOutput {
    Dataset corrupted;
    CorruptionAudit audit;
};

// Corrupts forename and surname independently under `setting`. The uniform
// kind samples mechanisms from the pooled distribution; the other kinds use
// the record's group distribution (pooled fallback for unseen groups).
// Per-record streams are keyed by (replicate seed, id, field) so results are
// independent of dataset order.
CorruptionOutput corrupt_dataset(const Dataset& data, const CorruptionSetting& setting,
                                 const ErrorProfile& forename_profile,
                                 const ErrorProfile& surname_profile);

}  // namespace namelink
