#include "namelink/corruption_engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "namelink/allocation.hpp"
#include "namelink/csv.hpp"
#include "namelink/unicode.hpp"

namespace namelink {

const char* exposure_kind_name(ExposureKind k) {
    switch (k) {
        case ExposureKind::uniform: return "uniform";
        case ExposureKind::equal_exposure: return "equal_exposure";
        default: return "disproportionate";
    }
}

namespace {

constexpr std::uint64_t field_tag(Field f) {
    return f == Field::forename ? 0x666F7265ULL : 0x73757265ULL;
}

std::map<std::string, std::vector<std::size_t>> eligible_by_group(const Dataset& data,
                                                                  Field field) {
    std::map<std::string, std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!data[i].name(field).empty()) out[data[i].group].push_back(i);
    }
    return out;
}

}  // namespace

ExposurePlan plan_exposure(const CorruptionSetting& setting, const Dataset& data, Field field) {
    ExposurePlan plan;
    plan.field = field;

    const auto eligible = eligible_by_group(data, field);
    std::int64_t total_eligible = 0;
    for (const auto& [group, idx] : eligible) total_eligible += static_cast<std::int64_t>(idx.size());

    switch (setting.kind) {
        case ExposureKind::uniform: {
            const std::int64_t budget =
                std::llround(setting.overall_rate * static_cast<double>(total_eligible));
            if (budget > total_eligible) throw InfeasibleBudgetError(budget, total_eligible);
            // one SRS across all eligible records; group counts fall out of the draw
            std::vector<std::size_t> all;
            all.reserve(total_eligible);
            for (const auto& [group, idx] : eligible) all.insert(all.end(), idx.begin(), idx.end());
            std::sort(all.begin(), all.end());
            SplitMix64 rng(combine_seed(combine_seed(setting.replicate_seed, field_tag(field)),
                                        0x706C616EULL));
            rng.shuffle(all);
            for (std::int64_t k = 0; k < budget; ++k) ++plan.group_targets[data[all[k]].group];
            plan.total = budget;
            break;
        }
        case ExposureKind::equal_exposure: {
            for (const auto& [group, idx] : eligible) {
                const std::int64_t target =
                    std::llround(setting.overall_rate * static_cast<double>(idx.size()));
                plan.group_targets[group] = target;
                plan.total += target;
            }
            break;
        }
        case ExposureKind::disproportionate: {
            const std::int64_t budget =
                std::llround(setting.overall_rate * static_cast<double>(total_eligible));
            if (budget > total_eligible) throw InfeasibleBudgetError(budget, total_eligible);
            std::vector<std::string> groups;
            std::vector<double> weights;
            std::vector<std::int64_t> capacity;
            for (const auto& [group, idx] : eligible) {
                groups.push_back(group);
                const auto it = setting.group_weights.find(group);
                weights.push_back(it == setting.group_weights.end() ? 0.0 : it->second);
                capacity.push_back(static_cast<std::int64_t>(idx.size()));
            }
            const auto targets = allocate_with_capacity(budget, weights, capacity);
            for (std::size_t g = 0; g < groups.size(); ++g) {
                plan.group_targets[groups[g]] = targets[g];
                plan.total += targets[g];
            }
            break;
        }
    }
    return plan;
}

std::vector<std::size_t> select_exposed(const Dataset& data, Field field,
                                        const ExposurePlan& plan, std::uint64_t seed) {
    const auto eligible = eligible_by_group(data, field);
    std::vector<std::size_t> chosen;
    chosen.reserve(plan.total);
    for (const auto& [group, target] : plan.group_targets) {
        if (target <= 0) continue;
        const auto it = eligible.find(group);
        if (it == eligible.end()) continue;
        std::vector<std::size_t> pool = it->second;
        SplitMix64 rng(combine_seed(combine_seed(seed, field_tag(field)), hash_bytes(group)));
        rng.shuffle(pool);
        const std::size_t take = std::min<std::size_t>(pool.size(), static_cast<std::size_t>(target));
        chosen.insert(chosen.end(), pool.begin(), pool.begin() + take);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

namespace {

// Positions in a length-`len` string whose coarse category could be `pos`.
std::vector<int> region_positions(EditPosition pos, int len) {
    std::vector<int> out;
    if (len <= 0) return out;
    const int fi = len - 1;
    const double denom = std::max(len - 1, 1);
    switch (pos) {
        case EditPosition::start:
            out.push_back(0);
            break;
        case EditPosition::end:
            out.push_back(fi);
            break;
        case EditPosition::first_half:
            for (int p = 0; p <= fi; ++p) {
                if (static_cast<double>(p) / denom < 0.5) out.push_back(p);
            }
            break;
        case EditPosition::second_half:
            for (int p = 0; p <= fi; ++p) {
                if (static_cast<double>(p) / denom >= 0.5) out.push_back(p);
            }
            break;
        case EditPosition::across:
            for (int p = 0; p <= fi; ++p) out.push_back(p);
            break;
    }
    return out;
}

std::optional<std::vector<int>> pick_distinct(const std::vector<int>& region, int k,
                                              EditPosition pos, int len, SplitMix64& rng) {
    if (static_cast<int>(region.size()) < k) return std::nullopt;
    std::vector<int> pool = region;
    rng.shuffle(pool);
    std::vector<int> picked(pool.begin(), pool.begin() + k);
    if (pos == EditPosition::across) {
        // force both halves to be hit
        const double denom = std::max(len - 1, 1);
        const auto in_first = [&](int p) { return static_cast<double>(p) / denom < 0.5; };
        const bool has_first = std::any_of(picked.begin(), picked.end(), in_first);
        const bool has_second =
            std::any_of(picked.begin(), picked.end(), [&](int p) { return !in_first(p); });
        if (!has_first || !has_second) {
            for (const int p : pool) {
                if ((!has_first && in_first(p)) || (!has_second && !in_first(p))) {
                    picked.back() = p;
                    break;
                }
            }
        }
    }
    std::sort(picked.begin(), picked.end());
    picked.erase(std::unique(picked.begin(), picked.end()), picked.end());
    if (static_cast<int>(picked.size()) != k) return std::nullopt;
    return picked;
}

char32_t sample_char(const CharInventory& inv, EditPosition op_pos, SplitMix64& rng,
                     char32_t avoid = 0) {
    for (int attempt = 0; attempt < 8; ++attempt) {
        const char32_t c = inv.sample(op_pos, rng);
        if (c != avoid) return c;
    }
    char32_t c = static_cast<char32_t>(U'A' + rng.next_below(26));
    if (c == avoid) c = (c == U'Z') ? U'A' : c + 1;
    return c;
}

// Builds one candidate corruption of `name` for (type, k, pos); the caller
// verifies the classification. Returns nullopt when the shape is impossible
// for this name length.
std::optional<std::u32string> propose(const std::u32string& name, ErrorType type, int k,
                                      EditPosition pos, const CharInventory& inv,
                                      SplitMix64& rng) {
    const int n = static_cast<int>(name.size());
    if (k < 1) return std::nullopt;
    if (pos == EditPosition::across && k < 2) return std::nullopt;

    switch (type) {
        case ErrorType::deletion: {
            if (k > n - 1) return std::nullopt;  // keep the result non-empty
            // Runs of deletions collapse onto one target position, so start/end
            // regions span k source characters, not one.
            std::vector<int> region;
            if (pos == EditPosition::end) {
                for (int p = n - k; p < n; ++p) region.push_back(p);
            } else if (pos == EditPosition::start) {
                for (int p = 0; p < k; ++p) region.push_back(p);
            } else {
                region = region_positions(pos, n);
            }
            const auto picked = pick_distinct(region, k, pos, n, rng);
            if (!picked) return std::nullopt;
            std::u32string out;
            out.reserve(n - k);
            std::size_t next = 0;
            for (int i = 0; i < n; ++i) {
                if (next < picked->size() && (*picked)[next] == i) {
                    ++next;
                } else {
                    out.push_back(name[i]);
                }
            }
            return out;
        }
        case ErrorType::insertion: {
            const int target_len = n + k;
            const auto region = region_positions(pos, target_len);
            const auto picked = pick_distinct(region, k, pos, target_len, rng);
            if (!picked) return std::nullopt;
            std::u32string out;
            out.reserve(target_len);
            std::size_t next = 0;
            std::size_t si = 0;
            for (int t = 0; t < target_len; ++t) {
                if (next < picked->size() && (*picked)[next] == t) {
                    out.push_back(sample_char(inv, op_position({EditKind::insertion, t, 0},
                                                               target_len),
                                              rng));
                    ++next;
                } else if (si < name.size()) {
                    out.push_back(name[si++]);
                } else {
                    return std::nullopt;
                }
            }
            return out;
        }
        case ErrorType::replacement: {
            if (k > n) return std::nullopt;
            const auto region = region_positions(pos, n);
            const auto picked = pick_distinct(region, k, pos, n, rng);
            if (!picked) return std::nullopt;
            std::u32string out(name);
            for (const int p : *picked) {
                out[p] = sample_char(inv, op_position({EditKind::substitution, p, 0}, n), rng,
                                     name[p]);
            }
            return out;
        }
    }
    return std::nullopt;
}

bool matches_cell(const std::u32string& original, const std::u32string& candidate,
                  ErrorType type, int k, EditPosition pos) {
    if (candidate == original) return false;
    const EditClassification cls = classify_edit(std::u32string_view(original),
                                                 std::u32string_view(candidate));
    return cls.primary_type == type && cls.distance == k &&
           cls.bucket == std::min(k, kMaxDistanceBucket) && cls.position == pos;
}

constexpr int kProposalAttempts = 24;

std::optional<std::u32string> try_shape(const std::u32string& name, ErrorType type, int k,
                                        EditPosition pos, const CharInventory& inv,
                                        SplitMix64& rng) {
    for (int attempt = 0; attempt < kProposalAttempts; ++attempt) {
        const auto candidate = propose(name, type, k, pos, inv, rng);
        if (!candidate) return std::nullopt;  // impossible shape, no point retrying
        if (matches_cell(name, *candidate, type, k, pos)) return candidate;
    }
    return std::nullopt;
}

const std::array<EditPosition, 5> kPositionLadder = {
    EditPosition::second_half, EditPosition::first_half, EditPosition::end,
    EditPosition::start, EditPosition::across};

const std::array<ErrorType, 3> kTypeLadder = {ErrorType::replacement, ErrorType::deletion,
                                              ErrorType::insertion};

}  // namespace

CorruptionResult apply_corruption(const std::string& name, const MechanismCell& cell,
                                  const CharInventory& inventory, SplitMix64& rng) {
    const std::u32string source = utf8_decode(name);
    if (source.empty()) throw Error("cannot corrupt an empty name");

    const auto finish = [&](const std::u32string& value, bool fallback) {
        CorruptionResult r;
        r.value = utf8_encode(value);
        r.script = edit_script(std::u32string_view(source), std::u32string_view(value));
        r.fallback = fallback;
        return r;
    };

    // 1. the cell as sampled, then shorter distances
    for (int k = cell.bucket; k >= 1; --k) {
        if (const auto hit = try_shape(source, cell.type, k, cell.position, inventory, rng)) {
            return finish(*hit, k != cell.bucket);
        }
    }
    // 2. relax position
    for (const EditPosition pos : kPositionLadder) {
        if (pos == cell.position) continue;
        for (int k = cell.bucket; k >= 1; --k) {
            if (const auto hit = try_shape(source, cell.type, k, pos, inventory, rng)) {
                return finish(*hit, true);
            }
        }
    }
    // 3. relax type
    for (const ErrorType type : kTypeLadder) {
        if (type == cell.type) continue;
        for (const EditPosition pos : kPositionLadder) {
            for (int k = cell.bucket; k >= 1; --k) {
                if (const auto hit = try_shape(source, type, k, pos, inventory, rng)) {
                    return finish(*hit, true);
                }
            }
        }
    }
    // 4. guaranteed progress: replace the first character
    std::u32string out(source);
    out[0] = sample_char(inventory, EditPosition::start, rng, source[0]);
    return finish(out, true);
}

std::unordered_map<std::string, std::array<bool, kFieldCount>> CorruptionAudit::exposure_by_id()
    const {
    std::unordered_map<std::string, std::array<bool, kFieldCount>> out;
    for (const AuditEntry& e : entries) {
        auto& flags = out.try_emplace(e.id, std::array<bool, kFieldCount>{false, false})
                          .first->second;
        if (e.exposed) flags[static_cast<int>(e.field)] = true;
    }
    return out;
}

void CorruptionAudit::write_csv(std::ostream& out) const {
    write_csv_row(out, {"id", "field", "exposed", "type", "bucket", "position", "fallback",
                        "original", "corrupted"});
    for (const AuditEntry& e : entries) {
        std::vector<std::string> row(9);
        row[0] = e.id;
        row[1] = field_name(e.field);
        row[2] = e.exposed ? "true" : "false";
        if (e.exposed && e.cell) {
            row[3] = error_type_name(e.cell->type);
            row[4] = bucket_label(e.cell->bucket);
            row[5] = edit_position_name(e.cell->position);
        }
        row[6] = e.fallback ? "true" : "false";
        row[7] = e.original;
        row[8] = e.corrupted;
        write_csv_row(out, row);
    }
}

CorruptionAudit CorruptionAudit::read_csv(std::istream& in) {
    CorruptionAudit audit;
    CsvReader reader(in);
    const int c_id = reader.column("id");
    const int c_field = reader.column("field");
    const int c_exposed = reader.column("exposed");
    const int c_type = reader.column("type");
    const int c_bucket = reader.column("bucket");
    const int c_position = reader.column("position");
    const int c_fallback = reader.column("fallback");
    const int c_original = reader.column("original");
    const int c_corrupted = reader.column("corrupted");
    for (const int c : {c_id, c_field, c_exposed, c_type, c_bucket, c_position, c_fallback,
                        c_original, c_corrupted}) {
        if (c < 0) throw SchemaError("audit csv column");
    }
    std::vector<std::string> row;
    while (reader.next(row)) {
        if (row.size() < 9) continue;
        AuditEntry e;
        e.id = row[c_id];
        e.field = row[c_field] == "surname" ? Field::surname : Field::forename;
        e.exposed = row[c_exposed] == "true";
        if (e.exposed) {
            MechanismCell cell;
            const auto type = error_type_from_name(row[c_type]);
            const auto bucket = bucket_from_label(row[c_bucket]);
            const auto pos = edit_position_from_name(row[c_position]);
            if (type && bucket && pos) {
                cell.type = *type;
                cell.bucket = *bucket;
                cell.position = *pos;
                e.cell = cell;
            }
        }
        e.fallback = row[c_fallback] == "true";
        e.original = row[c_original];
        e.corrupted = row[c_corrupted];
        audit.entries.push_back(std::move(e));
    }
    return audit;
}

CorruptionOutput corrupt_dataset(const Dataset& data, const CorruptionSetting& setting,
                                 const ErrorProfile& forename_profile,
                                 const ErrorProfile& surname_profile) {
    CorruptionOutput out;
    for (const PersonRecord& r : data.records()) out.corrupted.add(r);

    std::array<std::vector<char>, kFieldCount> exposed_mask;
    for (const Field field : {Field::forename, Field::surname}) {
        const ExposurePlan plan = plan_exposure(setting, data, field);
        const auto chosen = select_exposed(data, field, plan, setting.replicate_seed);
        auto& mask = exposed_mask[static_cast<int>(field)];
        mask.assign(data.size(), 0);
        for (const std::size_t i : chosen) mask[i] = 1;
    }

    out.audit.entries.reserve(data.size() * kFieldCount);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const PersonRecord& r = data[i];
        for (const Field field : {Field::forename, Field::surname}) {
            const ErrorProfile& profile =
                field == Field::forename ? forename_profile : surname_profile;
            AuditEntry entry;
            entry.id = r.id;
            entry.field = field;
            entry.original = r.name(field);
            entry.corrupted = entry.original;
            if (exposed_mask[static_cast<int>(field)][i]) {
                SplitMix64 rng(combine_seed(
                    combine_seed(setting.replicate_seed, hash_bytes(r.id)), field_tag(field)));
                const CellDistribution& dist =
                    setting.kind == ExposureKind::uniform
                        ? profile.pooled
                        : profile.distribution_for(r.group, /*allow_pooled_fallback=*/true);
                const MechanismCell cell = dist.sample(rng);
                const CorruptionResult result =
                    apply_corruption(entry.original, cell, profile.chars, rng);
                entry.exposed = true;
                entry.cell = cell;
                entry.script = result.script;
                entry.fallback = result.fallback;
                entry.corrupted = result.value;
                out.corrupted[i].name(field) = result.value;
            }
            out.audit.entries.push_back(std::move(entry));
        }
    }
    return out;
}

}  // namespace namelink
