#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "namelink/name_features.hpp"
#include "namelink/record.hpp"

#include <nlohmann/json_fwd.hpp>

namespace namelink {

// ---------------------------------------------------------------------------
// Blocking

struct BlockingKeyPart {
    enum class Attr : std::uint8_t { birth_year, gender, forename, surname };
    Attr attr = Attr::birth_year;
    int prefix = 0;  // 0 = whole value; otherwise first `prefix` code points
};

struct BlockingRule {
    std::vector<BlockingKeyPart> keys;
};

// Rule 1: birth year + gender + surname + forename 3-prefix.
// Rule 2: birth year + gender + forename 3-prefix.
std::vector<BlockingRule> default_blocking_rules();

// Union of the per-rule equijoins, deduplicated; per left record the sorted
// list of right-record indices.
std::vector<std::vector<std::uint32_t>> block(const Dataset& left, const Dataset& right,
                                              const std::vector<BlockingRule>& rules);

// ---------------------------------------------------------------------------
// Comparison specs

enum class ModelKind : std::uint8_t { jw, jw_no_tf, levenshtein, levenshtein_no_tf, combined };

const char* model_kind_name(ModelKind k);
std::optional<ModelKind> model_kind_from_name(std::string_view name);
const std::vector<ModelKind>& all_model_kinds();

enum class ComparatorKind : std::uint8_t { jaro_winkler, levenshtein, pc_cluster };

// Upper bound on comparison columns (two string fields, or eight per-PC
// columns plus a string field).
constexpr int kMaxComparisonFields = 12;

// Agreement levels for one comparison column, strongest first; the last
// level is the catch-all disagreement. A column where either value is
// missing always lands on the catch-all.
struct FieldComparison {
    Field field = Field::forename;
    ComparatorKind comparator = ComparatorKind::jaro_winkler;
    std::vector<double> jw_cuts;  // jaro_winkler: thresholds below exact, descending
    std::vector<int> lev_cuts;    // levenshtein: max distances below exact, ascending
    bool tf_adjust = false;       // term-frequency adjustment on the exact level
    int pc_component = -1;        // pc_cluster: component index, -1 = aggregate norm
    int value_slot = -1;          // exact_value slot for string comparators

    int level_count() const;
    std::vector<std::string> level_names() const;
    std::string column_name() const;
};

struct ComparisonSpec {
    std::vector<FieldComparison> fields;
};

// The combined model defaults to one comparison column per principal
// component; `aggregate_pc` collapses them into a single column on the
// euclidean norm of the component differences.
ComparisonSpec spec_for_model(ModelKind kind, bool aggregate_pc = false);

// Projection support for the pc_cluster comparator; caches projections per
// distinct name.
class PcContext {
public:
    PcContext(EmbeddingModel model, PcDistanceThresholds thresholds, CorpusStats stats)
        : model_(std::move(model)), thresholds_(std::move(thresholds)), stats_(std::move(stats)) {}

    PcContext(EmbeddingModel model, PcDistanceThresholds thresholds,
              ComponentThresholds component_thresholds, CorpusStats stats)
        : model_(std::move(model)),
          thresholds_(std::move(thresholds)),
          component_thresholds_(component_thresholds),
          stats_(std::move(stats)) {}

    // 0 = strongest agreement .. 4 = weakest; names without alphabetic
    // content fall to the weakest level.
    int level(const std::string& a, const std::string& b) const;

    // Same scale for a single component's absolute difference.
    int component_level(const std::string& a, const std::string& b, int component) const;

    bool has_component_thresholds() const { return component_thresholds_.has_value(); }
    const EmbeddingModel& model() const { return model_; }
    const PcDistanceThresholds& thresholds() const { return thresholds_; }

private:
    const PcVector* projection(const std::string& name) const;

    EmbeddingModel model_;
    PcDistanceThresholds thresholds_;
    std::optional<ComponentThresholds> component_thresholds_;
    CorpusStats stats_;
    mutable std::unordered_map<std::string, PcVector> cache_;
};

struct ComparisonVector {
    std::array<std::uint8_t, kMaxComparisonFields> level{};
    // value both sides agreed on at a string column's exact level, by slot
    std::array<std::string_view, kFieldCount> exact_value{};
};

// First satisfied level per field. `pc` may be null unless the spec uses the
// pc_cluster comparator.
ComparisonVector compare(const PersonRecord& left, const PersonRecord& right,
                         const ComparisonSpec& spec, const PcContext* pc);

// ---------------------------------------------------------------------------
// Model estimation

// Term-frequency tables built from the original dataset's values; the floor
// is 1/(10 N).
struct TfTables {
    std::array<std::unordered_map<std::string, double>, kFieldCount> by_field;
    double floor = 1e-9;

    static TfTables from_dataset(const Dataset& original);
    double lookup(Field f, std::string_view value) const;
};

using LevelTable = std::vector<std::vector<double>>;  // per column, per level

struct LinkageModel {
    double lambda = 0.1;
    LevelTable m;
    LevelTable u;
    std::shared_ptr<const TfTables> tf;  // consulted only where the spec enables it
    bool converged = false;
    int iterations = 0;

    nlohmann::json to_json(const ComparisonSpec& spec) const;
};

constexpr double kLevelFloor = 1e-9;

// Empirical level frequencies among randomly drawn cross pairs, floored at
// kLevelFloor and renormalised.
LevelTable estimate_u(const Dataset& left, const Dataset& right, const ComparisonSpec& spec,
                      const PcContext* pc, std::size_t pair_count, std::uint64_t seed);

struct EmOptions {
    double init_lambda = 0.1;
    int max_iterations = 200;
    double tolerance = 1e-6;
    bool estimate_u = false;  // re-estimate u in the M-step instead of fixing it
    // symmetric Dirichlet prior on the level multinomials, as a fraction of
    // the class mass per level; keeps sparsely-observed levels from blowing
    // up into extreme log ratios
    double level_smoothing = 0.0;
};

// Comparison vectors for parameter estimation, drawn from pairs that agree
// on birth year and gender only. Leaving the name fields unconstrained keeps
// the non-match name distribution compatible with the random-pair u, which
// the EM holds fixed; the tighter prefix rules are used for prediction only.
std::vector<ComparisonVector> sample_estimation_vectors(const Dataset& left,
                                                        const Dataset& right,
                                                        const ComparisonSpec& spec,
                                                        const PcContext* pc,
                                                        std::size_t pair_count,
                                                        std::uint64_t seed);

// Fellegi-Sunter parameter estimation under conditional independence of the
// fields. Lambda is clamped to [1e-6, 1-1e-6]; a model that hits the
// iteration cap is returned with converged=false.
LinkageModel em_fit(std::span<const ComparisonVector> vectors, const ComparisonSpec& spec,
                    const LevelTable& initial_u, const EmOptions& options = {});

// log2 prior odds plus summed log2 m/u; with TF enabled and exact agreement
// on value v, u is replaced by max(tf(v), floor) for that field.
double match_weight(const ComparisonVector& vec, const LinkageModel& model,
                    const ComparisonSpec& spec);

// ---------------------------------------------------------------------------
// Decisions

constexpr double kNoCandidateWeight = -std::numeric_limits<double>::infinity();

struct MatchDecision {
    std::string left_id;
    std::optional<std::string> right_id;  // set only when weight >= threshold
    double weight = kNoCandidateWeight;   // best candidate weight
    double threshold = 0.0;
};

// Per left record: the best-weight candidate at or above the threshold; ties
// go to the smaller right id.
std::vector<MatchDecision> link(const Dataset& left, const Dataset& right,
                                const std::vector<std::vector<std::uint32_t>>& candidates,
                                const LinkageModel& model, const ComparisonSpec& spec,
                                const PcContext* pc, double threshold);

void write_decisions_csv(std::ostream& out, std::span<const MatchDecision> decisions);
std::vector<MatchDecision> read_decisions_csv(std::istream& in);

}  // namespace namelink
