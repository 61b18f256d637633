#include "namelink/linkage_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>

#include "namelink/csv.hpp"
#include "namelink/rng.hpp"
#include "namelink/string_metrics.hpp"
#include "namelink/unicode.hpp"

namespace namelink {

namespace {

std::string prefix_codepoints(const std::string& s, int k) {
    if (k <= 0) return s;
    const std::u32string cps = utf8_decode(s);
    if (cps.size() <= static_cast<std::size_t>(k)) return s;
    return utf8_encode(std::u32string_view(cps).substr(0, k));
}

std::string blocking_key(const PersonRecord& r, const BlockingRule& rule) {
    std::string key;
    for (const BlockingKeyPart& part : rule.keys) {
        switch (part.attr) {
            case BlockingKeyPart::Attr::birth_year:
                key += std::to_string(r.birth_year);
                break;
            case BlockingKeyPart::Attr::gender:
                key += r.gender;
                break;
            case BlockingKeyPart::Attr::forename:
                key += prefix_codepoints(r.forename, part.prefix);
                break;
            case BlockingKeyPart::Attr::surname:
                key += prefix_codepoints(r.surname, part.prefix);
                break;
        }
        key += '\x1f';
    }
    return key;
}

}  // namespace

std::vector<BlockingRule> default_blocking_rules() {
    using Attr = BlockingKeyPart::Attr;
    BlockingRule r1;
    r1.keys = {{Attr::birth_year, 0}, {Attr::gender, 0}, {Attr::surname, 0}, {Attr::forename, 3}};
    BlockingRule r2;
    r2.keys = {{Attr::birth_year, 0}, {Attr::gender, 0}, {Attr::forename, 3}};
    return {r1, r2};
}

std::vector<std::vector<std::uint32_t>> block(const Dataset& left, const Dataset& right,
                                              const std::vector<BlockingRule>& rules) {
    std::vector<std::vector<std::uint32_t>> out(left.size());
    for (const BlockingRule& rule : rules) {
        std::unordered_map<std::string, std::vector<std::uint32_t>> index;
        for (std::size_t j = 0; j < right.size(); ++j) {
            index[blocking_key(right[j], rule)].push_back(static_cast<std::uint32_t>(j));
        }
        for (std::size_t i = 0; i < left.size(); ++i) {
            const auto it = index.find(blocking_key(left[i], rule));
            if (it == index.end()) continue;
            out[i].insert(out[i].end(), it->second.begin(), it->second.end());
        }
    }
    for (auto& candidates : out) {
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    }
    return out;
}

const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::jw: return "jw";
        case ModelKind::jw_no_tf: return "jw_no_tf";
        case ModelKind::levenshtein: return "levenshtein";
        case ModelKind::levenshtein_no_tf: return "levenshtein_no_tf";
        default: return "combined";
    }
}

std::optional<ModelKind> model_kind_from_name(std::string_view name) {
    for (const ModelKind k : all_model_kinds()) {
        if (name == model_kind_name(k)) return k;
    }
    return std::nullopt;
}

const std::vector<ModelKind>& all_model_kinds() {
    static const std::vector<ModelKind> kinds = {
        ModelKind::jw, ModelKind::jw_no_tf, ModelKind::levenshtein,
        ModelKind::levenshtein_no_tf, ModelKind::combined};
    return kinds;
}

int FieldComparison::level_count() const {
    switch (comparator) {
        case ComparatorKind::jaro_winkler:
            return static_cast<int>(jw_cuts.size()) + 2;  // exact + bands + else
        case ComparatorKind::levenshtein:
            return static_cast<int>(lev_cuts.size()) + 2;
        default:
            return 5;  // discretised pc levels
    }
}

std::vector<std::string> FieldComparison::level_names() const {
    std::vector<std::string> names;
    switch (comparator) {
        case ComparatorKind::jaro_winkler: {
            names.push_back("exact");
            char buf[32];
            for (const double c : jw_cuts) {
                std::snprintf(buf, sizeof(buf), "jw>=%.2f", c);
                names.push_back(buf);
            }
            names.push_back("else");
            break;
        }
        case ComparatorKind::levenshtein: {
            names.push_back("exact");
            for (const int c : lev_cuts) names.push_back("lev<=" + std::to_string(c));
            names.push_back("else");
            break;
        }
        default:
            names = {"pc4", "pc3", "pc2", "pc1", "pc0"};
            break;
    }
    return names;
}

std::string FieldComparison::column_name() const {
    std::string name = field_name(field);
    if (comparator == ComparatorKind::pc_cluster && pc_component >= 0) {
        name += "_pc" + std::to_string(pc_component + 1);
    }
    return name;
}

ComparisonSpec spec_for_model(ModelKind kind, bool aggregate_pc) {
    ComparisonSpec spec;
    const bool tf = kind == ModelKind::jw || kind == ModelKind::levenshtein ||
                    kind == ModelKind::combined;
    FieldComparison forename;
    forename.field = Field::forename;
    forename.value_slot = static_cast<int>(Field::forename);
    FieldComparison surname;
    surname.field = Field::surname;
    surname.value_slot = static_cast<int>(Field::surname);
    switch (kind) {
        case ModelKind::jw:
        case ModelKind::jw_no_tf:
            forename.comparator = ComparatorKind::jaro_winkler;
            forename.jw_cuts = {0.92, 0.88, 0.70};
            forename.tf_adjust = tf;
            surname.comparator = ComparatorKind::jaro_winkler;
            surname.jw_cuts = {0.92, 0.88, 0.70};
            surname.tf_adjust = tf;
            spec.fields = {forename, surname};
            break;
        case ModelKind::levenshtein:
        case ModelKind::levenshtein_no_tf:
            forename.comparator = ComparatorKind::levenshtein;
            forename.lev_cuts = {1, 2};
            forename.tf_adjust = tf;
            surname.comparator = ComparatorKind::levenshtein;
            surname.lev_cuts = {1, 2};
            surname.tf_adjust = tf;
            spec.fields = {forename, surname};
            break;
        case ModelKind::combined: {
            surname.comparator = ComparatorKind::jaro_winkler;
            surname.jw_cuts = {0.92, 0.88, 0.70};
            surname.tf_adjust = true;
            // the pc columns carry no frequency signal, so no TF on them
            forename.comparator = ComparatorKind::pc_cluster;
            forename.tf_adjust = false;
            forename.value_slot = -1;
            if (aggregate_pc) {
                forename.pc_component = -1;
                spec.fields = {forename, surname};
            } else {
                for (int k = 0; k < kComponentCount; ++k) {
                    FieldComparison column = forename;
                    column.pc_component = k;
                    spec.fields.push_back(column);
                }
                spec.fields.push_back(surname);
            }
            break;
        }
    }
    return spec;
}

const PcVector* PcContext::projection(const std::string& name) const {
    const auto it = cache_.find(name);
    if (it != cache_.end()) return &it->second;
    try {
        const PcVector p = project(extract_features(name, stats_), model_);
        return &cache_.emplace(name, p).first->second;
    } catch (const EmptyNameError&) {
        return nullptr;
    }
}

int PcContext::level(const std::string& a, const std::string& b) const {
    if (a.empty() || b.empty()) return 4;
    const PcVector* pa = projection(a);
    const PcVector* pb = projection(b);
    if (!pa || !pb) return 4;
    return 4 - discretise(pc_distance(*pa, *pb), thresholds_);
}

int PcContext::component_level(const std::string& a, const std::string& b, int component) const {
    if (!component_thresholds_) {
        throw Error("per-component thresholds were not fitted");
    }
    if (a.empty() || b.empty()) return 4;
    const PcVector* pa = projection(a);
    const PcVector* pb = projection(b);
    if (!pa || !pb) return 4;
    const double d = std::abs((*pa)[component] - (*pb)[component]);
    return 4 - discretise(d, (*component_thresholds_)[component]);
}

ComparisonVector compare(const PersonRecord& left, const PersonRecord& right,
                         const ComparisonSpec& spec, const PcContext* pc) {
    ComparisonVector out;
    for (std::size_t f = 0; f < spec.fields.size(); ++f) {
        const FieldComparison& fc = spec.fields[f];
        const std::string& a = left.name(fc.field);
        const std::string& b = right.name(fc.field);
        const int last = fc.level_count() - 1;
        int level = last;
        switch (fc.comparator) {
            case ComparatorKind::jaro_winkler: {
                if (a.empty() || b.empty()) break;
                if (a == b) {
                    level = 0;
                    if (fc.value_slot >= 0) out.exact_value[fc.value_slot] = b;
                    break;
                }
                const double s = jaro_winkler(std::string_view(a), std::string_view(b));
                for (std::size_t c = 0; c < fc.jw_cuts.size(); ++c) {
                    if (s >= fc.jw_cuts[c]) {
                        level = static_cast<int>(c) + 1;
                        break;
                    }
                }
                break;
            }
            case ComparatorKind::levenshtein: {
                if (a.empty() || b.empty()) break;
                if (a == b) {
                    level = 0;
                    if (fc.value_slot >= 0) out.exact_value[fc.value_slot] = b;
                    break;
                }
                const int d = levenshtein(std::string_view(a), std::string_view(b));
                for (std::size_t c = 0; c < fc.lev_cuts.size(); ++c) {
                    if (d <= fc.lev_cuts[c]) {
                        level = static_cast<int>(c) + 1;
                        break;
                    }
                }
                break;
            }
            case ComparatorKind::pc_cluster:
                if (pc) {
                    level = fc.pc_component >= 0 ? pc->component_level(a, b, fc.pc_component)
                                                 : pc->level(a, b);
                } else {
                    level = last;
                }
                break;
        }
        out.level[f] = static_cast<std::uint8_t>(level);
    }
    return out;
}

TfTables TfTables::from_dataset(const Dataset& original) {
    TfTables tables;
    std::array<std::int64_t, kFieldCount> totals{0, 0};
    for (const PersonRecord& r : original.records()) {
        for (const Field f : {Field::forename, Field::surname}) {
            const std::string& v = r.name(f);
            if (v.empty()) continue;
            tables.by_field[static_cast<int>(f)][v] += 1.0;
            ++totals[static_cast<int>(f)];
        }
    }
    for (int f = 0; f < kFieldCount; ++f) {
        const double total = std::max<double>(static_cast<double>(totals[f]), 1.0);
        for (auto& [value, count] : tables.by_field[f]) count /= total;
    }
    tables.floor = 1.0 / (10.0 * std::max<double>(static_cast<double>(original.size()), 1.0));
    return tables;
}

double TfTables::lookup(Field f, std::string_view value) const {
    const auto& table = by_field[static_cast<int>(f)];
    const auto it = table.find(std::string(value));
    return it == table.end() ? floor : std::max(it->second, floor);
}

LevelTable estimate_u(const Dataset& left, const Dataset& right, const ComparisonSpec& spec,
                      const PcContext* pc, std::size_t pair_count, std::uint64_t seed) {
    LevelTable counts(spec.fields.size());
    for (std::size_t f = 0; f < spec.fields.size(); ++f) {
        counts[f].assign(spec.fields[f].level_count(), 0.0);
    }
    SplitMix64 rng(combine_seed(seed, 0x75657374ULL));
    for (std::size_t k = 0; k < pair_count; ++k) {
        const std::size_t i = static_cast<std::size_t>(rng.next_below(left.size()));
        const std::size_t j = static_cast<std::size_t>(rng.next_below(right.size()));
        const ComparisonVector vec = compare(left[i], right[j], spec, pc);
        for (std::size_t f = 0; f < spec.fields.size(); ++f) counts[f][vec.level[f]] += 1.0;
    }
    for (std::size_t f = 0; f < spec.fields.size(); ++f) {
        double total = 0.0;
        for (double& c : counts[f]) {
            c = std::max(c / static_cast<double>(pair_count), kLevelFloor);
            total += c;
        }
        for (double& c : counts[f]) c /= total;
    }
    return counts;
}

std::vector<ComparisonVector> sample_estimation_vectors(const Dataset& left,
                                                        const Dataset& right,
                                                        const ComparisonSpec& spec,
                                                        const PcContext* pc,
                                                        std::size_t pair_count,
                                                        std::uint64_t seed) {
    std::unordered_map<std::string, std::vector<std::uint32_t>> cells;
    for (std::size_t j = 0; j < right.size(); ++j) {
        cells[std::to_string(right[j].birth_year) + '\x1f' + right[j].gender].push_back(
            static_cast<std::uint32_t>(j));
    }
    std::vector<ComparisonVector> vectors;
    vectors.reserve(pair_count);
    SplitMix64 rng(combine_seed(seed, 0x70616972ULL));
    std::size_t guard = 0;
    while (vectors.size() < pair_count && guard < pair_count * 4) {
        ++guard;
        const std::size_t i = static_cast<std::size_t>(rng.next_below(left.size()));
        const auto it =
            cells.find(std::to_string(left[i].birth_year) + '\x1f' + left[i].gender);
        if (it == cells.end() || it->second.empty()) continue;
        const std::uint32_t j = it->second[rng.next_below(it->second.size())];
        vectors.push_back(compare(left[i], right[j], spec, pc));
    }
    return vectors;
}

namespace {

constexpr double kLambdaFloor = 1e-6;

void clamp_and_normalise(std::vector<double>& probs) {
    double total = 0.0;
    for (double& p : probs) {
        p = std::max(p, kLevelFloor);
        total += p;
    }
    for (double& p : probs) p /= total;
}

}  // namespace

LinkageModel em_fit(std::span<const ComparisonVector> vectors, const ComparisonSpec& spec,
                    const LevelTable& initial_u, const EmOptions& options) {
    if (vectors.empty()) throw Error("cannot fit a model on zero comparison vectors");
    const std::size_t nf = spec.fields.size();
    if (nf > kMaxComparisonFields) throw Error("too many comparison columns");

    // sufficient statistics: counts per level pattern
    std::map<std::array<std::uint8_t, kMaxComparisonFields>, double> pattern_counts;
    for (const ComparisonVector& v : vectors) pattern_counts[v.level] += 1.0;
    const double n = static_cast<double>(vectors.size());

    LinkageModel model;
    model.lambda = options.init_lambda;
    model.m.resize(nf);
    model.u.resize(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        const int levels = spec.fields[f].level_count();
        model.m[f].assign(levels, 0.0);
        // strongest level dominant, geometric tail
        double share = 0.7;
        for (int l = 0; l < levels; ++l) {
            model.m[f][l] = (l == levels - 1) ? share * 2.0 : share;
            share *= 0.5;
        }
        clamp_and_normalise(model.m[f]);
        model.u[f] = initial_u[f];
        clamp_and_normalise(model.u[f]);
    }

    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        // E-step over distinct patterns
        double responsibility_sum = 0.0;
        LevelTable m_acc(nf), u_acc(nf);
        for (std::size_t f = 0; f < nf; ++f) {
            m_acc[f].assign(model.m[f].size(), 0.0);
            u_acc[f].assign(model.u[f].size(), 0.0);
        }
        for (const auto& [pattern, count] : pattern_counts) {
            double pm = model.lambda, pu = 1.0 - model.lambda;
            for (std::size_t f = 0; f < nf; ++f) {
                pm *= model.m[f][pattern[f]];
                pu *= model.u[f][pattern[f]];
            }
            const double r = pm / (pm + pu);
            responsibility_sum += r * count;
            for (std::size_t f = 0; f < nf; ++f) {
                m_acc[f][pattern[f]] += r * count;
                u_acc[f][pattern[f]] += (1.0 - r) * count;
            }
        }

        // M-step
        double delta = 0.0;
        const double new_lambda =
            std::clamp(responsibility_sum / n, kLambdaFloor, 1.0 - kLambdaFloor);
        delta = std::max(delta, std::abs(new_lambda - model.lambda));
        model.lambda = new_lambda;

        const double match_mass = std::max(responsibility_sum, kLevelFloor);
        const double nonmatch_mass = std::max(n - responsibility_sum, kLevelFloor);
        const double beta = std::max(options.level_smoothing, 0.0);
        for (std::size_t f = 0; f < nf; ++f) {
            std::vector<double> new_m(model.m[f].size());
            for (std::size_t l = 0; l < new_m.size(); ++l) {
                new_m[l] = (m_acc[f][l] + beta * match_mass) / match_mass;
            }
            clamp_and_normalise(new_m);
            for (std::size_t l = 0; l < new_m.size(); ++l) {
                delta = std::max(delta, std::abs(new_m[l] - model.m[f][l]));
            }
            model.m[f] = std::move(new_m);

            if (options.estimate_u) {
                std::vector<double> new_u(model.u[f].size());
                for (std::size_t l = 0; l < new_u.size(); ++l) {
                    new_u[l] = (u_acc[f][l] + beta * nonmatch_mass) / nonmatch_mass;
                }
                clamp_and_normalise(new_u);
                for (std::size_t l = 0; l < new_u.size(); ++l) {
                    delta = std::max(delta, std::abs(new_u[l] - model.u[f][l]));
                }
                model.u[f] = std::move(new_u);
            }
        }

        model.iterations = iter;
        if (delta < options.tolerance) {
            model.converged = true;
            break;
        }
    }
    return model;
}

double match_weight(const ComparisonVector& vec, const LinkageModel& model,
                    const ComparisonSpec& spec) {
    double w = std::log2(model.lambda / (1.0 - model.lambda));
    for (std::size_t f = 0; f < spec.fields.size(); ++f) {
        const int level = vec.level[f];
        const double m = model.m[f][level];
        double u = model.u[f][level];
        const int slot = spec.fields[f].value_slot;
        if (spec.fields[f].tf_adjust && level == 0 && slot >= 0 &&
            !vec.exact_value[slot].empty() && model.tf) {
            u = model.tf->lookup(spec.fields[f].field, vec.exact_value[slot]);
        }
        w += std::log2(m / u);
    }
    return w;
}

std::vector<MatchDecision> link(const Dataset& left, const Dataset& right,
                                const std::vector<std::vector<std::uint32_t>>& candidates,
                                const LinkageModel& model, const ComparisonSpec& spec,
                                const PcContext* pc, double threshold) {
    std::vector<MatchDecision> decisions;
    decisions.reserve(left.size());
    for (std::size_t i = 0; i < left.size(); ++i) {
        MatchDecision d;
        d.left_id = left[i].id;
        d.threshold = threshold;
        double best_weight = kNoCandidateWeight;
        const std::string* best_id = nullptr;
        for (const std::uint32_t j : candidates[i]) {
            const ComparisonVector vec = compare(left[i], right[j], spec, pc);
            const double w = match_weight(vec, model, spec);
            if (w > best_weight || (w == best_weight && best_id && right[j].id < *best_id)) {
                best_weight = w;
                best_id = &right[j].id;
            }
        }
        d.weight = best_weight;
        if (best_id && best_weight >= threshold) d.right_id = *best_id;
        decisions.push_back(std::move(d));
    }
    return decisions;
}

nlohmann::json LinkageModel::to_json(const ComparisonSpec& spec) const {
    nlohmann::json fields = nlohmann::json::array();
    for (std::size_t f = 0; f < spec.fields.size(); ++f) {
        fields.push_back({{"column", spec.fields[f].column_name()},
                          {"levels", spec.fields[f].level_names()},
                          {"tf_adjust", spec.fields[f].tf_adjust},
                          {"m", m[f]},
                          {"u", u[f]}});
    }
    return nlohmann::json{{"lambda", lambda},
                          {"fields", std::move(fields)},
                          {"converged", converged},
                          {"iterations", iterations},
                          {"tf_floor", tf ? tf->floor : 0.0}};
}

namespace {

std::string format_weight(double w) {
    if (w == kNoCandidateWeight) return "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", w);
    return buf;
}

}  // namespace

void write_decisions_csv(std::ostream& out, std::span<const MatchDecision> decisions) {
    write_csv_row(out, {"left_id", "right_id", "match_weight", "threshold"});
    for (const MatchDecision& d : decisions) {
        write_csv_row(out, {d.left_id, d.right_id.value_or(""), format_weight(d.weight),
                            format_weight(d.threshold)});
    }
}

std::vector<MatchDecision> read_decisions_csv(std::istream& in) {
    CsvReader reader(in);
    const int c_left = reader.column("left_id");
    const int c_right = reader.column("right_id");
    const int c_weight = reader.column("match_weight");
    const int c_threshold = reader.column("threshold");
    if (c_left < 0 || c_right < 0 || c_weight < 0 || c_threshold < 0) {
        throw SchemaError("decisions csv column");
    }
    std::vector<MatchDecision> out;
    std::vector<std::string> row;
    while (reader.next(row)) {
        if (row.size() < 4) continue;
        MatchDecision d;
        d.left_id = row[c_left];
        if (!row[c_right].empty()) d.right_id = row[c_right];
        d.weight = row[c_weight] == "-inf" ? kNoCandidateWeight : std::stod(row[c_weight]);
        d.threshold = row[c_threshold] == "-inf" ? kNoCandidateWeight : std::stod(row[c_threshold]);
        out.push_back(std::move(d));
    }
    return out;
}

}  // namespace namelink
