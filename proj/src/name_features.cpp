#include "namelink/name_features.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "namelink/unicode.hpp"

namespace namelink {

const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = {
        "hyphen",
        "apostrophe",
        "length_with_space",
        "length_without_space",
        "vowel_consonant_ratio",
        "longest_vowel_run",
        "unique_binary",
        "uniqueness_continuous",
        "number_of_terms",
        "middle_name_binary",
        "shared_trigram_count",
        "ends_with_vowel",
        "characters_per_term",
    };
    return names;
}

CorpusStats CorpusStats::from_names(std::span<const std::string> normalised_names) {
    CorpusStats stats;
    for (const std::string& name : normalised_names) {
        if (name.empty()) continue;
        ++stats.name_counts_[name];
        ++stats.trigram_counts_[initial_trigram(name)];
        ++stats.total_;
    }
    return stats;
}

std::int64_t CorpusStats::name_count(const std::string& name) const {
    const auto it = name_counts_.find(name);
    return it == name_counts_.end() ? 0 : it->second;
}

std::int64_t CorpusStats::prefix_count(const std::string& name) const {
    const auto it = trigram_counts_.find(initial_trigram(name));
    return it == trigram_counts_.end() ? 0 : it->second;
}

std::string CorpusStats::initial_trigram(const std::string& name) {
    const std::u32string cps = utf8_decode(name);
    return utf8_encode(cps.substr(0, 3));
}

FeatureVector extract_features(const std::string& name, const CorpusStats& stats) {
    const std::u32string cps = utf8_decode(name);

    bool any_alpha = false;
    for (const char32_t c : cps) {
        if (is_ascii_alpha(c) || c >= 0x00C0) any_alpha = true;
    }
    if (!any_alpha) throw EmptyNameError();

    FeatureVector v = FeatureVector::Zero();

    int with_space = 0, without_space = 0;
    int vowels = 0, consonants = 0;
    int vowel_run = 0, longest_run = 0;
    int terms = 1;
    bool hyphen = false, apostrophe = false;
    char32_t last_alpha = 0;
    for (const char32_t c : cps) {
        ++with_space;
        if (c == U' ') {
            ++terms;
            vowel_run = 0;
            continue;
        }
        ++without_space;
        if (c == U'-') hyphen = true;
        if (c == U'\'') apostrophe = true;
        if (is_ascii_alpha(c) || c >= 0x00C0) {
            last_alpha = c;
            if (is_vowel(c)) {
                ++vowels;
                ++vowel_run;
                longest_run = std::max(longest_run, vowel_run);
            } else {
                ++consonants;
                vowel_run = 0;
            }
        } else {
            vowel_run = 0;
        }
    }

    const std::int64_t occurrences = stats.name_count(name);
    const std::int64_t in_prefix_bucket = stats.prefix_count(name);
    const double total = static_cast<double>(std::max<std::int64_t>(stats.total(), 1));

    v[kHyphen] = hyphen ? 1.0 : 0.0;
    v[kApostrophe] = apostrophe ? 1.0 : 0.0;
    v[kLengthWithSpace] = with_space;
    v[kLengthWithoutSpace] = without_space;
    v[kVowelConsonantRatio] = static_cast<double>(vowels) / std::max(consonants, 1);
    v[kLongestVowelRun] = longest_run;
    v[kUniqueBinary] = occurrences == 1 ? 1.0 : 0.0;
    v[kUniquenessContinuous] = 1.0 - static_cast<double>(occurrences) / total;
    v[kNumberOfTerms] = terms;
    v[kMiddleNameBinary] = terms >= 2 ? 1.0 : 0.0;
    v[kSharedTrigramCount] =
        static_cast<double>(std::max<std::int64_t>(in_prefix_bucket - occurrences, 0));
    v[kEndsWithVowel] = (last_alpha != 0 && is_vowel(last_alpha)) ? 1.0 : 0.0;
    v[kCharactersPerTerm] = static_cast<double>(without_space) / terms;
    return v;
}

EmbeddingModel fit_embedding(std::span<const FeatureVector> corpus) {
    const std::size_t n = corpus.size();
    if (n < static_cast<std::size_t>(kFeatureCount)) {
        throw Error("embedding corpus must have at least " +
                    std::to_string(kFeatureCount) + " vectors");
    }

    Eigen::MatrixXd data(n, kFeatureCount);
    for (std::size_t i = 0; i < n; ++i) data.row(i) = corpus[i].transpose();

    // exact zero-variance check before any division
    for (int f = 0; f < kFeatureCount; ++f) {
        if (data.col(f).maxCoeff() == data.col(f).minCoeff()) {
            throw DegenerateFeatureError(f);
        }
    }

    EmbeddingModel model;
    model.feature_means = data.colwise().mean().transpose();
    Eigen::MatrixXd standardised = data.rowwise() - model.feature_means.transpose();
    for (int f = 0; f < kFeatureCount; ++f) {
        model.feature_sds[f] =
            std::sqrt(standardised.col(f).squaredNorm() / static_cast<double>(n - 1));
        standardised.col(f) /= model.feature_sds[f];
    }

    const Eigen::MatrixXd correlation =
        (standardised.transpose() * standardised) / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(correlation);
    if (solver.info() != Eigen::Success) throw Error("eigendecomposition failed");

    // eigenvalues come out ascending; keep the top kComponentCount descending
    for (int c = 0; c < kComponentCount; ++c) {
        const int src = kFeatureCount - 1 - c;
        model.explained_variance[c] = std::max(solver.eigenvalues()[src], 0.0);
        Eigen::VectorXd column = solver.eigenvectors().col(src);
        int peak = 0;
        for (int f = 1; f < kFeatureCount; ++f) {
            if (std::abs(column[f]) > std::abs(column[peak])) peak = f;
        }
        if (column[peak] < 0.0) column = -column;
        model.loadings.col(c) = column;
    }
    return model;
}

PcVector project(const FeatureVector& v, const EmbeddingModel& m) {
    const FeatureVector z =
        (v - m.feature_means).array() / m.feature_sds.array();
    return m.loadings.transpose() * z;
}

double pc_distance(const PcVector& p, const PcVector& q) {
    return (p - q).norm();
}

double linear_quantile(std::span<const double> sorted_values, double p) {
    const std::size_t n = sorted_values.size();
    if (n == 0) return 0.0;
    if (n == 1) return sorted_values[0];
    const double h = (static_cast<double>(n) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted_values[lo] + frac * (sorted_values[hi] - sorted_values[lo]);
}

PcDistanceThresholds fit_thresholds(
    std::span<const std::pair<std::string, std::string>> within_person_pairs,
    const EmbeddingModel& m, const CorpusStats& stats) {
    if (within_person_pairs.size() < kMinThresholdPairs) {
        throw InsufficientPairsError(within_person_pairs.size(), kMinThresholdPairs);
    }
    std::vector<double> distances;
    distances.reserve(within_person_pairs.size());
    for (const auto& [a, b] : within_person_pairs) {
        const PcVector pa = project(extract_features(a, stats), m);
        const PcVector pb = project(extract_features(b, stats), m);
        distances.push_back(pc_distance(pa, pb));
    }
    std::sort(distances.begin(), distances.end());

    PcDistanceThresholds t;
    t.cut_p5 = linear_quantile(distances, 0.05);
    t.cut_p10 = linear_quantile(distances, 0.10);
    t.cut_p25 = linear_quantile(distances, 0.25);
    t.cut_p50 = linear_quantile(distances, 0.50);
    if (!(t.cut_p5 < t.cut_p10 && t.cut_p10 < t.cut_p25 && t.cut_p25 < t.cut_p50)) {
        throw StrictOrderViolationError();
    }
    return t;
}

int discretise(double d, const PcDistanceThresholds& t) {
    if (d < t.cut_p5) return 4;
    if (d < t.cut_p10) return 3;
    if (d < t.cut_p25) return 2;
    if (d < t.cut_p50) return 1;
    return 0;
}

nlohmann::json EmbeddingModel::to_json() const {
    nlohmann::json j;
    j["means"] = std::vector<double>(feature_means.data(), feature_means.data() + kFeatureCount);
    j["sds"] = std::vector<double>(feature_sds.data(), feature_sds.data() + kFeatureCount);
    std::vector<double> loadings_row_major;
    loadings_row_major.reserve(kFeatureCount * kComponentCount);
    for (int f = 0; f < kFeatureCount; ++f) {
        for (int c = 0; c < kComponentCount; ++c) loadings_row_major.push_back(loadings(f, c));
    }
    j["loadings"] = std::move(loadings_row_major);
    j["explained_variance"] =
        std::vector<double>(explained_variance.data(), explained_variance.data() + kComponentCount);
    j["feature_names"] = feature_names();
    return j;
}

EmbeddingModel EmbeddingModel::from_json(const nlohmann::json& j) {
    EmbeddingModel m;
    const auto means = j.at("means").get<std::vector<double>>();
    const auto sds = j.at("sds").get<std::vector<double>>();
    const auto loadings = j.at("loadings").get<std::vector<double>>();
    const auto ev = j.at("explained_variance").get<std::vector<double>>();
    if (means.size() != kFeatureCount || sds.size() != kFeatureCount ||
        loadings.size() != kFeatureCount * kComponentCount || ev.size() != kComponentCount) {
        throw ConfigError("embedding document has wrong dimensions");
    }
    for (int f = 0; f < kFeatureCount; ++f) {
        m.feature_means[f] = means[f];
        m.feature_sds[f] = sds[f];
        for (int c = 0; c < kComponentCount; ++c) {
            m.loadings(f, c) = loadings[f * kComponentCount + c];
        }
    }
    for (int c = 0; c < kComponentCount; ++c) m.explained_variance[c] = ev[c];
    return m;
}

nlohmann::json PcDistanceThresholds::to_json() const {
    return nlohmann::json{
        {"p5", cut_p5}, {"p10", cut_p10}, {"p25", cut_p25}, {"p50", cut_p50}};
}

PcDistanceThresholds PcDistanceThresholds::from_json(const nlohmann::json& j) {
    PcDistanceThresholds t;
    t.cut_p5 = j.at("p5").get<double>();
    t.cut_p10 = j.at("p10").get<double>();
    t.cut_p25 = j.at("p25").get<double>();
    t.cut_p50 = j.at("p50").get<double>();
    return t;
}

ComponentThresholds fit_component_thresholds(
    std::span<const std::pair<std::string, std::string>> within_person_pairs,
    const EmbeddingModel& m, const CorpusStats& stats) {
    if (within_person_pairs.size() < kMinThresholdPairs) {
        throw InsufficientPairsError(within_person_pairs.size(), kMinThresholdPairs);
    }
    std::array<std::vector<double>, kComponentCount> diffs;
    for (auto& d : diffs) d.reserve(within_person_pairs.size());
    for (const auto& [a, b] : within_person_pairs) {
        const PcVector pa = project(extract_features(a, stats), m);
        const PcVector pb = project(extract_features(b, stats), m);
        for (int k = 0; k < kComponentCount; ++k) diffs[k].push_back(std::abs(pa[k] - pb[k]));
    }
    ComponentThresholds cuts;
    for (int k = 0; k < kComponentCount; ++k) {
        std::sort(diffs[k].begin(), diffs[k].end());
        PcDistanceThresholds t;
        t.cut_p5 = linear_quantile(diffs[k], 0.05);
        t.cut_p10 = linear_quantile(diffs[k], 0.10);
        t.cut_p25 = linear_quantile(diffs[k], 0.25);
        t.cut_p50 = linear_quantile(diffs[k], 0.50);
        if (!(t.cut_p5 < t.cut_p10 && t.cut_p10 < t.cut_p25 && t.cut_p25 < t.cut_p50)) {
            throw StrictOrderViolationError();
        }
        cuts[k] = t;
    }
    return cuts;
}

nlohmann::json component_thresholds_to_json(const ComponentThresholds& t) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : t) arr.push_back(c.to_json());
    return arr;
}

ComponentThresholds component_thresholds_from_json(const nlohmann::json& j) {
    ComponentThresholds t;
    if (j.size() != t.size()) throw ConfigError("expected one cut set per component");
    for (std::size_t k = 0; k < t.size(); ++k) {
        t[k] = PcDistanceThresholds::from_json(j[k]);
    }
    return t;
}

nlohmann::json embedding_document(const EmbeddingModel& m, const PcDistanceThresholds& t) {
    nlohmann::json j = m.to_json();
    j["cuts"] = t.to_json();
    return j;
}

nlohmann::json embedding_document(const EmbeddingModel& m, const PcDistanceThresholds& t,
                                  const ComponentThresholds& component_cuts) {
    nlohmann::json j = embedding_document(m, t);
    j["component_cuts"] = component_thresholds_to_json(component_cuts);
    return j;
}

std::pair<EmbeddingModel, PcDistanceThresholds> embedding_from_document(const nlohmann::json& j) {
    return {EmbeddingModel::from_json(j), PcDistanceThresholds::from_json(j.at("cuts"))};
}

}  // namespace namelink
