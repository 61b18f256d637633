#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "namelink/record.hpp"
#include "namelink/rng.hpp"
#include "namelink/string_metrics.hpp"

#include <nlohmann/json_fwd.hpp>

namespace namelink {

// Coarse location of a script's edits within the target string.
enum class EditPosition : std::uint8_t { start, first_half, second_half, end, across };

const char* edit_position_name(EditPosition p);
std::optional<EditPosition> edit_position_from_name(std::string_view name);

// Three-way edit type used by the error profiles.
enum class ErrorType : std::uint8_t { deletion, insertion, replacement };

const char* error_type_name(ErrorType t);  // "del" / "ins" / "rep"
std::optional<ErrorType> error_type_from_name(std::string_view name);

constexpr int kMaxDistanceBucket = 7;  // 7 stands for "7+"

std::string bucket_label(int bucket);            // "1".."6", "7+"
std::optional<int> bucket_from_label(std::string_view label);

struct EditClassification {
    std::uint8_t kind_mask = 0;  // bit per EditKind present in the script
    ErrorType primary_type = ErrorType::replacement;
    int distance = 0;
    int bucket = 0;              // min(distance, 7)
    EditPosition position = EditPosition::across;

    bool has_kind(EditKind k) const { return kind_mask & (1u << static_cast<int>(k)); }
    bool operator==(const EditClassification&) const = default;
};

// Position of a single op within a target of `target_len` code points.
EditPosition op_position(const EditOp& op, int target_len);

// Position of a whole script: start/end when every op sits there, a half when
// all normalised positions fall on one side of 0.5, across otherwise.
EditPosition script_position(const EditScript& script, int target_len);

EditClassification classify_script(const EditScript& script, int target_len);
EditClassification classify_edit(std::u32string_view a, std::u32string_view b);
EditClassification classify_edit(std::string_view a, std::string_view b);

// One within-person field mismatch between two snapshots.
struct DiscrepancyRecord {
    std::string person_id;
    Field field = Field::forename;
    std::string value_a;
    std::string value_b;
    double jw = 0.0;
    int lev = 0;
    EditClassification cls;
};

// Emits a DiscrepancyRecord per field whose normalised values differ, for
// every person present in both snapshots.
std::vector<DiscrepancyRecord> pair_snapshots(const Dataset& snap_a, const Dataset& snap_b);

struct MechanismCell {
    ErrorType type = ErrorType::replacement;
    int bucket = 1;
    EditPosition position = EditPosition::start;

    auto operator<=>(const MechanismCell&) const = default;
};

// Joint distribution over mechanism cells, kept in sorted cell order so
// sampling is reproducible.
class CellDistribution {
public:
    void add(const MechanismCell& cell, double count = 1.0);
    void normalise();  // scales probabilities to sum to 1

    bool empty() const { return cells_.empty(); }
    double probability(const MechanismCell& cell) const;
    const std::vector<std::pair<MechanismCell, double>>& cells() const { return cells_; }

    MechanismCell sample(SplitMix64& rng) const;

    // 3-way / bucket / position marginals.
    std::map<ErrorType, double> type_marginal() const;
    std::map<int, double> bucket_marginal() const;
    std::map<EditPosition, double> position_marginal() const;

private:
    std::vector<std::pair<MechanismCell, double>> cells_;  // sorted by cell
    mutable std::vector<double> cumulative_;               // rebuilt on demand
};

// Characters observed in insertion/substitution edits, keyed by the coarse
// per-op position. Backs realistic character choices during corruption.
class CharInventory {
public:
    void add(EditPosition pos, char32_t ch);
    bool has(EditPosition pos) const;
    char32_t sample(EditPosition pos, SplitMix64& rng) const;

    nlohmann::json to_json() const;
    static CharInventory from_json(const nlohmann::json& j);

private:
    std::map<EditPosition, std::vector<std::pair<char32_t, double>>> counts_;
};

// Per-group joint error distribution for one field, plus the pooled
// distribution and the character inventory learned from the same scripts.
struct ErrorProfile {
    std::map<std::string, CellDistribution> groups;
    CellDistribution pooled;
    CharInventory chars;
    std::vector<std::string> inherited_groups;  // groups that fell back to pooled

    // Group distribution with optional pooled fallback; throws
    // MissingGroupProfileError when the group is absent and no fallback.
    const CellDistribution& distribution_for(const std::string& group,
                                             bool allow_pooled_fallback) const;

    nlohmann::json to_json() const;
    static ErrorProfile from_json(const nlohmann::json& j);
};

// Aggregates classified discrepancies into per-group cell probabilities.
// Groups listed in `expected_groups` but absent from the data inherit the
// pooled distribution and are reported in `inherited_groups`.
ErrorProfile build_profile(std::span<const DiscrepancyRecord> discrepancies,
                           const std::function<std::string(const std::string&)>& group_of,
                           const std::vector<std::string>& expected_groups = {});

}  // namespace namelink
