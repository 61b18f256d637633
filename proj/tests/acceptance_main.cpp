// Acceptance suite: one self-contained check per shipped guarantee, each
// printed as a PASS/FAIL line. Exit code 0 only when every check passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "namelink/corruption_engine.hpp"
#include "namelink/discrepancy_profiler.hpp"
#include "namelink/evaluation.hpp"
#include "namelink/linkage_engine.hpp"
#include "namelink/pipeline.hpp"
#include "namelink/string_metrics.hpp"
#include "namelink/synth.hpp"
#include "namelink/unicode.hpp"

#include "oracles.hpp"

using namespace namelink;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

int g_failures = 0;

void run_criterion(const std::string& name, double budget_seconds,
                   const std::function<Outcome()>& body) {
    const auto start = Clock::now();
    Outcome outcome;
    try {
        outcome = body();
    } catch (const std::exception& e) {
        outcome.pass = false;
        outcome.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (budget_seconds > 0.0 && seconds > budget_seconds) {
        outcome.pass = false;
        outcome.detail += (outcome.detail.empty() ? "" : "; ");
        outcome.detail += "runtime " + std::to_string(seconds) + "s exceeds budget";
    }
    if (!outcome.pass) ++g_failures;
    std::printf("%s  %-24s (%.1fs)  %s\n", outcome.pass ? "PASS" : "FAIL", name.c_str(), seconds,
                outcome.detail.c_str());
    std::fflush(stdout);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// ---------------------------------------------------------------------------

Outcome comparator_oracles() {
    SplitMix64 rng(0xACC1);
    for (int k = 0; k < 1000; ++k) {
        const std::u32string a = oracle::random_name(rng, 0, 12, 8);
        const std::u32string b = oracle::random_name(rng, 0, 12, 8);
        if (levenshtein(std::u32string_view(a), std::u32string_view(b)) !=
            oracle::levenshtein_matrix(a, b)) {
            return {false, "levenshtein mismatch on " + utf8_encode(a) + "/" + utf8_encode(b)};
        }
        if (std::abs(jaro(std::u32string_view(a), std::u32string_view(b)) -
                     oracle::jaro_definition(a, b)) > 1e-12) {
            return {false, "jaro mismatch on " + utf8_encode(a) + "/" + utf8_encode(b)};
        }
        if (std::abs(jaro_winkler(std::u32string_view(a), std::u32string_view(b)) -
                     oracle::jaro_winkler_definition(a, b)) > 1e-12) {
            return {false, "jaro-winkler mismatch on " + utf8_encode(a) + "/" + utf8_encode(b)};
        }
    }
    const double jw = jaro_winkler(std::string_view("MARTHA"), std::string_view("MARHTA"));
    if (std::abs(jw - 173.0 / 180.0) > 1e-12) {
        return {false, "JW(MARTHA,MARHTA) = " + std::to_string(jw)};
    }
    return {true, "1000 random pairs + reference value"};
}

Outcome edit_round_trip() {
    SynthSpec spec;
    spec.size = 3000;
    spec.seed = 314;
    const Dataset data = synth_corpus(spec);
    const auto [snap_a, snap_b] = synth_snapshot_pair(data, spec);
    const auto discrepancies = pair_snapshots(snap_a, snap_b);
    const auto profile = build_profile(discrepancies, [&](const std::string& id) {
        const std::size_t i = data.index_of(id);
        return i == Dataset::npos ? std::string("Unknown") : data[i].group;
    });

    SplitMix64 rng(0xE417);
    int exact = 0, degraded = 0, mismatches = 0;
    while (exact < 10000) {
        const PersonRecord& r = data[rng.next_below(data.size())];
        const std::string& name = rng.next_double() < 0.5 ? r.forename : r.surname;
        if (name.empty()) continue;
        const MechanismCell cell = profile.pooled.sample(rng);
        const CorruptionResult result = apply_corruption(name, cell, profile.chars, rng);
        if (result.fallback) {
            ++degraded;
            continue;
        }
        ++exact;
        const EditClassification cls =
            classify_edit(std::string_view(name), std::string_view(result.value));
        if (cls.primary_type != cell.type || cls.bucket != cell.bucket ||
            cls.position != cell.position) {
            ++mismatches;
        }
    }
    std::ostringstream detail;
    detail << exact << " clean events, " << degraded << " degraded, " << mismatches
           << " classification mismatches";
    return {mismatches == 0, detail.str()};
}

Outcome exposure_exactness() {
    // settings 1 and 2 on a two-group corpus
    Dataset data;
    int serial = 0;
    const auto add_group = [&](const std::string& group, int count) {
        for (int i = 0; i < count; ++i) {
            PersonRecord r;
            r.id = "R" + std::to_string(serial++);
            r.forename = "ANNA";
            r.surname = "SMITH";
            r.birth_year = 1980;
            r.gender = "F";
            r.group = group;
            data.add(std::move(r));
        }
    };
    add_group("Non-Hispanic White", 633);
    add_group("Asian", 367);

    CorruptionSetting s1;
    s1.kind = ExposureKind::uniform;
    s1.overall_rate = 0.10;
    s1.replicate_seed = 5;
    const ExposurePlan p1 = plan_exposure(s1, data, Field::forename);
    if (p1.total != 100) return {false, "uniform budget " + std::to_string(p1.total)};
    const auto chosen1 = select_exposed(data, Field::forename, p1, 5);
    if (chosen1.size() != 100) return {false, "uniform realisation"};

    CorruptionSetting s2 = s1;
    s2.kind = ExposureKind::equal_exposure;
    const ExposurePlan p2 = plan_exposure(s2, data, Field::forename);
    if (p2.group_targets.at("Non-Hispanic White") != 63 || p2.group_targets.at("Asian") != 37) {
        return {false, "equal-exposure per-group budgets"};
    }

    // setting 3 on a four-group fixture with a binding capacity:
    // budget 61, weights (.5,.25,.15,.10), eligible (30,100,100,100)
    // largest remainder: raw (30.5,15.25,9.15,6.1) -> floors + 1 to A -> 31
    // capped at 30, shortfall 1 redistributed -> B
    // expected (30,16,9,6)
    Dataset fixture;
    serial = 0;
    const auto add_fixture = [&](const std::string& group, int count) {
        for (int i = 0; i < count; ++i) {
            PersonRecord r;
            r.id = "F" + std::to_string(serial++);
            r.forename = "NAME";
            r.surname = "NAME";
            r.birth_year = 1980;
            r.gender = "F";
            r.group = group;
            fixture.add(std::move(r));
        }
    };
    add_fixture("A", 30);
    add_fixture("B", 100);
    add_fixture("C", 100);
    add_fixture("D", 100);
    CorruptionSetting s3;
    s3.kind = ExposureKind::disproportionate;
    s3.overall_rate = 61.0 / 330.0;
    s3.group_weights = {{"A", 0.5}, {"B", 0.25}, {"C", 0.15}, {"D", 0.10}};
    const ExposurePlan p3 = plan_exposure(s3, fixture, Field::forename);
    const std::map<std::string, std::int64_t> expected = {{"A", 30}, {"B", 16}, {"C", 9}, {"D", 6}};
    if (p3.group_targets != expected) {
        std::ostringstream got;
        for (const auto& [g, c] : p3.group_targets) got << g << "=" << c << " ";
        return {false, "disproportionate allocation: " + got.str()};
    }
    return {true, "uniform 100/1000, per-group 63/37, capacity fixture (30,16,9,6)"};
}

Outcome em_recovery() {
    const double true_lambda = 0.3;
    const LevelTable true_m = {
        std::vector<double>{0.85, 0.10, 0.05}, std::vector<double>{0.75, 0.15, 0.10}};
    const LevelTable true_u = {
        std::vector<double>{0.05, 0.15, 0.80}, std::vector<double>{0.10, 0.20, 0.70}};

    ComparisonSpec spec;
    for (const Field f : {Field::forename, Field::surname}) {
        FieldComparison fc;
        fc.field = f;
        fc.comparator = ComparatorKind::levenshtein;
        fc.lev_cuts = {1};
        spec.fields.push_back(fc);
    }

    SplitMix64 rng(0xE3);
    std::vector<ComparisonVector> vectors(50000);
    const auto draw = [&](const std::vector<double>& probs) {
        const double x = rng.next_double();
        double acc = 0.0;
        for (std::size_t l = 0; l < probs.size(); ++l) {
            acc += probs[l];
            if (x < acc) return static_cast<std::uint8_t>(l);
        }
        return static_cast<std::uint8_t>(probs.size() - 1);
    };
    for (ComparisonVector& v : vectors) {
        const bool match = rng.next_double() < true_lambda;
        for (int f = 0; f < 2; ++f) v.level[f] = draw(match ? true_m[f] : true_u[f]);
    }

    EmOptions options;
    options.init_lambda = 0.5;
    const LinkageModel fit = em_fit(vectors, spec, true_u, options);
    double worst = std::abs(fit.lambda - true_lambda);
    for (int f = 0; f < 2; ++f) {
        for (int l = 0; l < 3; ++l) {
            worst = std::max(worst, std::abs(fit.m[f][l] - true_m[f][l]));
            worst = std::max(worst, std::abs(fit.u[f][l] - true_u[f][l]));
        }
    }
    if (worst >= 0.02) return {false, "worst parameter error " + std::to_string(worst)};

    std::vector<ComparisonVector> reversed(vectors.rbegin(), vectors.rend());
    const LinkageModel fit2 = em_fit(reversed, spec, true_u, options);
    if (fit2.lambda != fit.lambda || fit2.m != fit.m || fit2.u != fit.u) {
        return {false, "permutation changed the fit"};
    }
    std::ostringstream detail;
    detail << "n=50000, worst error " << worst << ", converged in " << fit.iterations
           << " iterations";
    return {true, detail.str()};
}

Outcome threshold_calibration() {
    SplitMix64 rng(0xCA1);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 5 + static_cast<int>(rng.next_below(80));
        std::vector<double> weights;
        for (int i = 0; i < n; ++i) {
            weights.push_back(std::floor(rng.next_double() * 12.0) / 2.0);
        }
        if (rng.next_double() < 0.25) weights[0] = kNoCandidateWeight;
        const double target = rng.next_double();
        const double got = calibrate_threshold(weights, target);
        const double expected = oracle::brute_force_threshold(weights, target);
        if (got != expected) {
            return {false, "trial " + std::to_string(trial) + ": got " + std::to_string(got) +
                               " expected " + std::to_string(expected)};
        }
    }
    return {true, "1000 random weight sets match the exhaustive scan"};
}

Outcome stratified_sampling() {
    SynthSpec spec;
    spec.size = 50000;
    spec.seed = 606;
    const Dataset data = synth_corpus(spec);
    const auto [snap_a, snap_b] = synth_snapshot_pair(data, spec);
    const auto discrepancies = pair_snapshots(snap_a, snap_b);
    std::vector<DiscrepancyRecord> fore, sur;
    for (const DiscrepancyRecord& d : discrepancies) {
        (d.field == Field::forename ? fore : sur).push_back(d);
    }
    const auto group_of = [&](const std::string& id) {
        const std::size_t i = data.index_of(id);
        return i == Dataset::npos ? std::string("Unknown") : data[i].group;
    };
    const auto fore_profile = build_profile(fore, group_of, standard_groups());
    const auto sur_profile = build_profile(sur, group_of, standard_groups());

    RunConfig weights_config;
    CorruptionSetting setting = setting_for(weights_config, 3, 11);
    const CorruptionOutput corrupted = corrupt_dataset(data, setting, fore_profile, sur_profile);

    const auto exposure = corrupted.audit.exposure_by_id();
    std::map<StratumKey, double> population;
    for (const PersonRecord& r : corrupted.corrupted.records()) {
        population[{r.group, status_from_exposure(exposure.at(r.id))}] += 1.0;
    }
    const double n = static_cast<double>(corrupted.corrupted.size());

    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto sample =
            stratified_sample(corrupted.corrupted, corrupted.audit, 0.05, seed);
        std::map<StratumKey, double> got;
        for (const std::size_t i : sample) {
            const PersonRecord& r = corrupted.corrupted[i];
            got[{r.group, status_from_exposure(exposure.at(r.id))}] += 1.0;
        }
        for (const auto& [key, pop] : population) {
            const double population_share = pop / n;
            const double sample_share =
                (got.count(key) ? got.at(key) : 0.0) / static_cast<double>(sample.size());
            worst = std::max(worst, std::abs(sample_share - population_share));
        }
    }
    std::ostringstream detail;
    detail << "worst joint-stratum share deviation " << worst * 100.0 << " pp over 100 seeds";
    return {worst <= 0.005, detail.str()};
}

// full desk-scale run shared by the directional criterion
Outcome directional_findings() {
    const fs::path dir = fs::temp_directory_path() / "namelink_acceptance_full";
    fs::remove_all(dir);
    fs::create_directories(dir);

    SynthSpec spec;
    spec.size = 50000;
    spec.seed = 2024;
    const Dataset base = synth_corpus(spec);
    const auto [snap_a, snap_b] = synth_snapshot_pair(base, spec);
    {
        std::ofstream f(dir / "base.csv", std::ios::binary);
        write_dataset_csv(f, base);
        std::ofstream fa(dir / "a.csv", std::ios::binary);
        write_dataset_csv(fa, snap_a);
        std::ofstream fb(dir / "b.csv", std::ios::binary);
        write_dataset_csv(fb, snap_b);
    }

    RunConfig config;
    config.snapshot_a_path = (dir / "a.csv").string();
    config.snapshot_b_path = (dir / "b.csv").string();
    config.base_path = (dir / "base.csv").string();
    config.master_seed = 777;
    config.output_dir = (dir / "out").string();

    run_all(config);  // also materialises the report files

    const std::string overall = slurp(dir / "out" / "overall.csv");
    const long rows = std::count(overall.begin(), overall.end(), '\n') - 1;
    if (rows != 15) {
        return {false, "expected 15 overall rows, got " + std::to_string(rows)};
    }

    const RunResults results = run_all_collect(config);
    const auto overall_fmr = [&](ModelKind m, int s, int replicate) {
        return results.rates.at(m).at(s)[replicate].overall.fmr;
    };
    const std::string high_exposure_group = "Hispanic (White or Black)";
    const auto mmr_disp = [&](ModelKind m, int replicate) {
        return results.rates.at(m).at(3)[replicate].mmr_disparity_pp.at(high_exposure_group);
    };

    std::ostringstream detail;
    bool pass = true;

    // (a) TF reduces false matches for both string families in settings 1-2
    for (const int s : {1, 2}) {
        int jw_ok = 0, lev_ok = 0;
        for (int r = 0; r < config.replicates; ++r) {
            jw_ok += overall_fmr(ModelKind::jw_no_tf, s, r) > overall_fmr(ModelKind::jw, s, r);
            lev_ok += overall_fmr(ModelKind::levenshtein_no_tf, s, r) >
                      overall_fmr(ModelKind::levenshtein, s, r);
        }
        detail << "S" << s << " fmr no_tf>tf jw " << jw_ok << "/5 lev " << lev_ok << "/5; ";
        pass = pass && jw_ok >= 4 && lev_ok >= 4;
    }

    // (b) setting 3 high-exposure-group MMR disparity ordering
    int order_ok = 0;
    for (int r = 0; r < config.replicates; ++r) {
        const double no_tf = mmr_disp(ModelKind::jw_no_tf, r);
        const double tf = mmr_disp(ModelKind::jw, r);
        const double combined = mmr_disp(ModelKind::combined, r);
        order_ok += (no_tf > tf && tf > combined) ? 1 : 0;
    }
    detail << "S3 disparity no_tf>tf>combined " << order_ok << "/5; ";
    pass = pass && order_ok >= 4;

    // (c) the embedding model trades false matches for recall equity
    int fmr_ok = 0;
    for (int r = 0; r < config.replicates; ++r) {
        fmr_ok += overall_fmr(ModelKind::combined, 3, r) > overall_fmr(ModelKind::jw, 3, r);
    }
    detail << "S3 combined fmr>jw " << fmr_ok << "/5";
    pass = pass && fmr_ok >= 4;

    return {pass, detail.str()};
}

Outcome replicate_aggregation() {
    const auto s = aggregate_replicates("m", {1, 2, 3, 4, 5});
    const double half = (s.ci_high - s.ci_low) / 2.0;
    // oracle: 2.776 * sd / sqrt(k) with sd = sqrt(2.5)
    const double expected = 2.776 * std::sqrt(2.5) / std::sqrt(5.0);
    std::ostringstream detail;
    detail << "mean " << s.mean << ", half-width " << half << " (oracle " << expected << ")";
    const bool pass = std::abs(s.mean - 3.0) < 1e-12 && std::abs(half - expected) <= 1e-4;
    return {pass, detail.str()};
}

Outcome determinism() {
    const fs::path dir = fs::temp_directory_path() / "namelink_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);

    SynthSpec spec;
    spec.size = 4000;
    spec.seed = 99;
    const Dataset base = synth_corpus(spec);
    const auto [snap_a, snap_b] = synth_snapshot_pair(base, spec);
    {
        std::ofstream f(dir / "base.csv", std::ios::binary);
        write_dataset_csv(f, base);
        std::ofstream fa(dir / "a.csv", std::ios::binary);
        write_dataset_csv(fa, snap_a);
        std::ofstream fb(dir / "b.csv", std::ios::binary);
        write_dataset_csv(fb, snap_b);
    }
    RunConfig config;
    config.snapshot_a_path = (dir / "a.csv").string();
    config.snapshot_b_path = (dir / "b.csv").string();
    config.base_path = (dir / "base.csv").string();
    config.models = {ModelKind::jw, ModelKind::combined};
    config.settings = {1, 3};
    config.replicates = 2;
    config.master_seed = 31337;
    config.u_pair_count = 50000;
    config.output_dir = (dir / "out").string();

    run_all(config);
    std::map<std::string, std::string> first;
    for (const char* name : {"overall.csv", "by_group.csv", "manifest.json"}) {
        first[name] = slurp(fs::path(config.output_dir) / name);
    }
    run_all(config);
    for (const char* name : {"overall.csv", "by_group.csv", "manifest.json"}) {
        if (slurp(fs::path(config.output_dir) / name) != first[name]) {
            return {false, std::string(name) + " differs between runs"};
        }
    }
    return {true, "overall.csv, by_group.csv, manifest.json byte-identical"};
}

}  // namespace

int main() {
    std::printf("acceptance suite\n----------------\n");
    run_criterion("comparator_oracles", 5.0, comparator_oracles);
    run_criterion("edit_round_trip", 30.0, edit_round_trip);
    run_criterion("exposure_exactness", 0.0, exposure_exactness);
    run_criterion("em_recovery", 60.0, em_recovery);
    run_criterion("threshold_calibration", 0.0, threshold_calibration);
    run_criterion("stratified_sampling", 0.0, stratified_sampling);
    run_criterion("directional_findings", 600.0, directional_findings);
    run_criterion("replicate_aggregation", 0.0, replicate_aggregation);
    run_criterion("determinism", 0.0, determinism);

    std::printf("----------------\n%s\n", g_failures == 0 ? "ALL CRITERIA PASSED"
                                                          : "CRITERIA FAILED");
    return g_failures == 0 ? 0 : 1;
}
