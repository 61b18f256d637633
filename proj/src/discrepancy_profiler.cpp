#include "namelink/discrepancy_profiler.hpp"

#include <algorithm>
#include <array>

#include <nlohmann/json.hpp>

#include "namelink/unicode.hpp"

namespace namelink {

const char* edit_position_name(EditPosition p) {
    switch (p) {
        case EditPosition::start: return "start";
        case EditPosition::first_half: return "first_half";
        case EditPosition::second_half: return "second_half";
        case EditPosition::end: return "end";
        default: return "across";
    }
}

std::optional<EditPosition> edit_position_from_name(std::string_view name) {
    if (name == "start") return EditPosition::start;
    if (name == "first_half") return EditPosition::first_half;
    if (name == "second_half") return EditPosition::second_half;
    if (name == "end") return EditPosition::end;
    if (name == "across") return EditPosition::across;
    return std::nullopt;
}

const char* error_type_name(ErrorType t) {
    switch (t) {
        case ErrorType::deletion: return "del";
        case ErrorType::insertion: return "ins";
        default: return "rep";
    }
}

std::optional<ErrorType> error_type_from_name(std::string_view name) {
    if (name == "del") return ErrorType::deletion;
    if (name == "ins") return ErrorType::insertion;
    if (name == "rep") return ErrorType::replacement;
    return std::nullopt;
}

std::string bucket_label(int bucket) {
    return bucket >= kMaxDistanceBucket ? "7+" : std::to_string(bucket);
}

std::optional<int> bucket_from_label(std::string_view label) {
    if (label == "7+") return kMaxDistanceBucket;
    int v = 0;
    for (const char c : label) {
        if (c < '0' || c > '9') return std::nullopt;
        v = v * 10 + (c - '0');
    }
    if (v < 1 || v > kMaxDistanceBucket) return std::nullopt;
    return v;
}

EditPosition op_position(const EditOp& op, int target_len) {
    const int final_index = target_len - 1;
    if (op.pos == 0) return EditPosition::start;
    if (op.pos == final_index ||
        (op.kind == EditKind::deletion && op.pos == target_len)) {
        return EditPosition::end;
    }
    const double norm = static_cast<double>(op.pos) / std::max(target_len - 1, 1);
    return norm < 0.5 ? EditPosition::first_half : EditPosition::second_half;
}

EditPosition script_position(const EditScript& script, int target_len) {
    const int final_index = target_len - 1;
    bool all_start = true, all_end = true, all_first = true, all_second = true;
    for (const EditOp& op : script.ops) {
        if (op.pos != 0) all_start = false;
        const bool at_end = op.pos == final_index ||
                            (op.kind == EditKind::deletion && op.pos == target_len);
        if (!at_end) all_end = false;
        const double norm = static_cast<double>(op.pos) / std::max(target_len - 1, 1);
        if (norm >= 0.5) all_first = false;
        if (norm < 0.5) all_second = false;
    }
    if (all_start) return EditPosition::start;
    if (all_end) return EditPosition::end;
    if (all_first) return EditPosition::first_half;
    if (all_second) return EditPosition::second_half;
    return EditPosition::across;
}

EditClassification classify_script(const EditScript& script, int target_len) {
    if (script.empty()) throw IdenticalInputsError();
    EditClassification out;
    std::array<int, 3> kind_counts{0, 0, 0};
    for (const EditOp& op : script.ops) {
        out.kind_mask |= static_cast<std::uint8_t>(1u << static_cast<int>(op.kind));
        ++kind_counts[static_cast<int>(op.kind)];
    }
    // modal op kind; ties replacement > deletion > insertion
    const int n_ins = kind_counts[static_cast<int>(EditKind::insertion)];
    const int n_del = kind_counts[static_cast<int>(EditKind::deletion)];
    const int n_sub = kind_counts[static_cast<int>(EditKind::substitution)];
    if (n_sub >= n_del && n_sub >= n_ins) {
        out.primary_type = ErrorType::replacement;
    } else if (n_del >= n_ins) {
        out.primary_type = ErrorType::deletion;
    } else {
        out.primary_type = ErrorType::insertion;
    }
    out.distance = static_cast<int>(script.size());
    out.bucket = std::min(out.distance, kMaxDistanceBucket);
    out.position = script_position(script, target_len);
    return out;
}

EditClassification classify_edit(std::u32string_view a, std::u32string_view b) {
    if (a == b) throw IdenticalInputsError();
    return classify_script(edit_script(a, b), static_cast<int>(b.size()));
}

EditClassification classify_edit(std::string_view a, std::string_view b) {
    return classify_edit(utf8_decode(a), utf8_decode(b));
}

std::vector<DiscrepancyRecord> pair_snapshots(const Dataset& snap_a, const Dataset& snap_b) {
    std::vector<DiscrepancyRecord> out;
    for (const PersonRecord& ra : snap_a.records()) {
        const std::size_t ib = snap_b.index_of(ra.id);
        if (ib == Dataset::npos) continue;
        const PersonRecord& rb = snap_b[ib];
        for (const Field field : {Field::forename, Field::surname}) {
            const std::string& va = ra.name(field);
            const std::string& vb = rb.name(field);
            if (va == vb) continue;
            DiscrepancyRecord d;
            d.person_id = ra.id;
            d.field = field;
            d.value_a = va;
            d.value_b = vb;
            d.jw = jaro_winkler(std::string_view(va), std::string_view(vb));
            d.cls = classify_edit(std::string_view(va), std::string_view(vb));
            d.lev = d.cls.distance;
            out.push_back(std::move(d));
        }
    }
    return out;
}

void CellDistribution::add(const MechanismCell& cell, double count) {
    const auto it = std::lower_bound(
        cells_.begin(), cells_.end(), cell,
        [](const auto& entry, const MechanismCell& c) { return entry.first < c; });
    if (it != cells_.end() && it->first == cell) {
        it->second += count;
    } else {
        cells_.insert(it, {cell, count});
    }
    cumulative_.clear();
}

void CellDistribution::normalise() {
    double total = 0.0;
    for (const auto& [cell, p] : cells_) total += p;
    if (total <= 0.0) return;
    for (auto& [cell, p] : cells_) p /= total;
    cumulative_.clear();
}

double CellDistribution::probability(const MechanismCell& cell) const {
    const auto it = std::lower_bound(
        cells_.begin(), cells_.end(), cell,
        [](const auto& entry, const MechanismCell& c) { return entry.first < c; });
    if (it != cells_.end() && it->first == cell) return it->second;
    return 0.0;
}

MechanismCell CellDistribution::sample(SplitMix64& rng) const {
    if (cumulative_.empty()) {
        cumulative_.reserve(cells_.size());
        double acc = 0.0;
        for (const auto& [cell, p] : cells_) {
            acc += p;
            cumulative_.push_back(acc);
        }
    }
    return cells_[sample_cumulative(cumulative_, rng)].first;
}

std::map<ErrorType, double> CellDistribution::type_marginal() const {
    std::map<ErrorType, double> out;
    for (const auto& [cell, p] : cells_) out[cell.type] += p;
    return out;
}

std::map<int, double> CellDistribution::bucket_marginal() const {
    std::map<int, double> out;
    for (const auto& [cell, p] : cells_) out[cell.bucket] += p;
    return out;
}

std::map<EditPosition, double> CellDistribution::position_marginal() const {
    std::map<EditPosition, double> out;
    for (const auto& [cell, p] : cells_) out[cell.position] += p;
    return out;
}

void CharInventory::add(EditPosition pos, char32_t ch) {
    auto& bucket = counts_[pos];
    for (auto& [c, n] : bucket) {
        if (c == ch) {
            n += 1.0;
            return;
        }
    }
    bucket.emplace_back(ch, 1.0);
}

bool CharInventory::has(EditPosition pos) const {
    const auto it = counts_.find(pos);
    return it != counts_.end() && !it->second.empty();
}

char32_t CharInventory::sample(EditPosition pos, SplitMix64& rng) const {
    const auto it = counts_.find(pos);
    if (it == counts_.end() || it->second.empty()) {
        return static_cast<char32_t>(U'A' + rng.next_below(26));
    }
    std::vector<double> cumulative;
    cumulative.reserve(it->second.size());
    double acc = 0.0;
    for (const auto& [c, n] : it->second) {
        acc += n;
        cumulative.push_back(acc);
    }
    return it->second[sample_cumulative(cumulative, rng)].first;
}

nlohmann::json CharInventory::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [pos, chars] : counts_) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [c, n] : chars) {
            arr.push_back({{"ch", utf8_encode(std::u32string(1, c))}, {"n", n}});
        }
        j[edit_position_name(pos)] = std::move(arr);
    }
    return j;
}

CharInventory CharInventory::from_json(const nlohmann::json& j) {
    CharInventory inv;
    for (const auto& [key, arr] : j.items()) {
        const auto pos = edit_position_from_name(key);
        if (!pos) continue;
        for (const auto& entry : arr) {
            const std::u32string ch = utf8_decode(entry.at("ch").get<std::string>());
            if (ch.empty()) continue;
            auto& bucket = inv.counts_[*pos];
            bucket.emplace_back(ch[0], entry.at("n").get<double>());
        }
    }
    return inv;
}

const CellDistribution& ErrorProfile::distribution_for(const std::string& group,
                                                       bool allow_pooled_fallback) const {
    const auto it = groups.find(group);
    if (it != groups.end() && !it->second.empty()) return it->second;
    if (allow_pooled_fallback && !pooled.empty()) return pooled;
    throw MissingGroupProfileError(group);
}

namespace {

nlohmann::json cells_to_json(const CellDistribution& dist) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& [cell, p] : dist.cells()) {
        cells.push_back({{"type", error_type_name(cell.type)},
                         {"bucket", bucket_label(cell.bucket)},
                         {"position", edit_position_name(cell.position)},
                         {"p", p}});
    }
    return nlohmann::json{{"cells", std::move(cells)}};
}

CellDistribution cells_from_json(const nlohmann::json& j) {
    CellDistribution dist;
    for (const auto& entry : j.at("cells")) {
        MechanismCell cell;
        const auto type = error_type_from_name(entry.at("type").get<std::string>());
        const auto bucket = bucket_from_label(entry.at("bucket").get<std::string>());
        const auto pos = edit_position_from_name(entry.at("position").get<std::string>());
        if (!type || !bucket || !pos) {
            throw ConfigError("malformed profile cell: " + entry.dump());
        }
        cell.type = *type;
        cell.bucket = *bucket;
        cell.position = *pos;
        dist.add(cell, entry.at("p").get<double>());
    }
    return dist;
}

}  // namespace

nlohmann::json ErrorProfile::to_json() const {
    nlohmann::json groups_json = nlohmann::json::object();
    for (const auto& [group, dist] : groups) {
        groups_json[group] = cells_to_json(dist);
    }
    return nlohmann::json{{"groups", std::move(groups_json)},
                          {"pooled", cells_to_json(pooled)},
                          {"char_inventory", chars.to_json()},
                          {"inherited_groups", inherited_groups}};
}

ErrorProfile ErrorProfile::from_json(const nlohmann::json& j) {
    ErrorProfile profile;
    for (const auto& [group, dist] : j.at("groups").items()) {
        profile.groups[group] = cells_from_json(dist);
    }
    profile.pooled = cells_from_json(j.at("pooled"));
    if (j.contains("char_inventory")) {
        profile.chars = CharInventory::from_json(j.at("char_inventory"));
    }
    if (j.contains("inherited_groups")) {
        profile.inherited_groups = j.at("inherited_groups").get<std::vector<std::string>>();
    }
    return profile;
}

ErrorProfile build_profile(std::span<const DiscrepancyRecord> discrepancies,
                           const std::function<std::string(const std::string&)>& group_of,
                           const std::vector<std::string>& expected_groups) {
    if (discrepancies.empty()) throw EmptyGroupError("<all>");

    ErrorProfile profile;
    for (const DiscrepancyRecord& d : discrepancies) {
        const MechanismCell cell{d.cls.primary_type, d.cls.bucket, d.cls.position};
        profile.groups[group_of(d.person_id)].add(cell);
        profile.pooled.add(cell);

        // character inventory from the actual scripts
        const std::u32string ua = utf8_decode(d.value_a);
        const std::u32string ub = utf8_decode(d.value_b);
        const EditScript script = edit_script(ua, ub);
        for (const EditOp& op : script.ops) {
            if (op.kind == EditKind::deletion) continue;
            profile.chars.add(op_position(op, static_cast<int>(ub.size())), op.ch);
        }
    }
    for (auto& [group, dist] : profile.groups) dist.normalise();
    profile.pooled.normalise();

    for (const std::string& g : expected_groups) {
        if (!profile.groups.count(g)) {
            profile.groups[g] = profile.pooled;
            profile.inherited_groups.push_back(g);
        }
    }
    return profile;
}

}  // namespace namelink
