#pragma once

#include <Eigen/Dense>

#include <array>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "namelink/errors.hpp"

#include <nlohmann/json_fwd.hpp>

namespace namelink {

constexpr int kFeatureCount = 13;
constexpr int kComponentCount = 8;

using FeatureVector = Eigen::Matrix<double, kFeatureCount, 1>;
using PcVector = Eigen::Matrix<double, kComponentCount, 1>;
using LoadingMatrix = Eigen::Matrix<double, kFeatureCount, kComponentCount>;

// Storage order of the name-structure features.
enum FeatureIndex : int {
    kHyphen = 0,
    kApostrophe,
    kLengthWithSpace,
    kLengthWithoutSpace,
    kVowelConsonantRatio,
    kLongestVowelRun,
    kUniqueBinary,
    kUniquenessContinuous,
    kNumberOfTerms,
    kMiddleNameBinary,
    kSharedTrigramCount,
    kEndsWithVowel,
    kCharactersPerTerm,
};

const std::vector<std::string>& feature_names();

// Frequency tables over the uncorrupted reference corpus; feeds the
// prevalence-dependent features.
class CorpusStats {
public:
    static CorpusStats from_names(std::span<const std::string> normalised_names);

    std::int64_t total() const { return total_; }
    std::int64_t name_count(const std::string& name) const;
    std::int64_t prefix_count(const std::string& name) const;  // initial trigram bucket

    // First three code points of the name (the whole name when shorter).
    static std::string initial_trigram(const std::string& name);

private:
    std::unordered_map<std::string, std::int64_t> name_counts_;
    std::unordered_map<std::string, std::int64_t> trigram_counts_;
    std::int64_t total_ = 0;
};

// Feature extraction for a normalised name. Throws EmptyNameError when the
// name has no alphabetic characters.
FeatureVector extract_features(const std::string& name, const CorpusStats& stats);

struct EmbeddingModel {
    FeatureVector feature_means;
    FeatureVector feature_sds;
    LoadingMatrix loadings;           // orthonormal columns, PC1..PC8
    PcVector explained_variance;      // non-increasing

    nlohmann::json to_json() const;
    static EmbeddingModel from_json(const nlohmann::json& j);
};

// Standardised PCA over the feature corpus: z-scores with the stored
// means/sds, eigendecomposition of the correlation matrix, first eight
// components kept. Each loading column is flipped so its largest-magnitude
// entry is positive. Throws DegenerateFeatureError for a zero-variance
// feature.
EmbeddingModel fit_embedding(std::span<const FeatureVector> corpus);

PcVector project(const FeatureVector& v, const EmbeddingModel& m);

// Euclidean norm of the componentwise absolute differences.
double pc_distance(const PcVector& p, const PcVector& q);

struct PcDistanceThresholds {
    double cut_p5 = 0.0;
    double cut_p10 = 0.0;
    double cut_p25 = 0.0;
    double cut_p50 = 0.0;

    nlohmann::json to_json() const;
    static PcDistanceThresholds from_json(const nlohmann::json& j);
};

// Quantile with linear interpolation between order statistics
// (h = (n-1)p + 1 on the sorted sample).
double linear_quantile(std::span<const double> sorted_values, double p);

constexpr std::size_t kMinThresholdPairs = 100;

// Percentile cuts per principal component, over the absolute differences of
// within-person pairs.
using ComponentThresholds = std::array<PcDistanceThresholds, kComponentCount>;

ComponentThresholds fit_component_thresholds(
    std::span<const std::pair<std::string, std::string>> within_person_pairs,
    const EmbeddingModel& m, const CorpusStats& stats);

nlohmann::json component_thresholds_to_json(const ComponentThresholds& t);
ComponentThresholds component_thresholds_from_json(const nlohmann::json& j);

// Percentile cuts of pc_distance over within-person discrepant name pairs.
// Throws InsufficientPairsError below the minimum and
// StrictOrderViolationError when the cuts do not strictly increase.
PcDistanceThresholds fit_thresholds(
    std::span<const std::pair<std::string, std::string>> within_person_pairs,
    const EmbeddingModel& m, const CorpusStats& stats);

// Ordinal agreement level: 4 strongest (d < cut_p5) down to 0 (d >= cut_p50).
int discretise(double d, const PcDistanceThresholds& t);

// Bundles the embedding and its cuts into one document.
nlohmann::json embedding_document(const EmbeddingModel& m, const PcDistanceThresholds& t);
nlohmann::json embedding_document(const EmbeddingModel& m, const PcDistanceThresholds& t,
                                  const ComponentThresholds& component_cuts);
std::pair<EmbeddingModel, PcDistanceThresholds> embedding_from_document(const nlohmann::json& j);

}  // namespace namelink
