#include "namelink/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "namelink/corruption_engine.hpp"
#include "namelink/csv.hpp"
#include "namelink/discrepancy_profiler.hpp"
#include "namelink/evaluation.hpp"
#include "namelink/unicode.hpp"

namespace namelink {

namespace {

std::string trim_copy(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string fmt(double v, const char* format = "%.6f") {
    char buf[48];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

}  // namespace

Dataset ingest(std::istream& in, const ColumnMapping& columns, IngestReport* report) {
    CsvReader reader(in);
    const int c_id = reader.column(columns.id);
    const int c_fore = reader.column(columns.forename);
    const int c_sur = reader.column(columns.surname);
    const int c_year = reader.column(columns.birth_year);
    const int c_gender = reader.column(columns.gender);
    const int c_group = reader.column(columns.ethnic_group);
    if (c_id < 0) throw SchemaError(columns.id);
    if (c_fore < 0) throw SchemaError(columns.forename);
    if (c_sur < 0) throw SchemaError(columns.surname);
    if (c_year < 0) throw SchemaError(columns.birth_year);
    if (c_gender < 0) throw SchemaError(columns.gender);
    if (c_group < 0) throw SchemaError(columns.ethnic_group);

    Dataset data;
    std::vector<std::string> row;
    const int max_col = std::max({c_id, c_fore, c_sur, c_year, c_gender, c_group});
    while (reader.next(row)) {
        if (report) ++report->rows_read;
        if (static_cast<int>(row.size()) <= max_col) {
            bool all_empty = true;
            for (const std::string& cell : row) {
                if (!cell.empty()) all_empty = false;
            }
            if (all_empty) continue;  // blank line
            throw SchemaError("row with " + std::to_string(row.size()) + " columns");
        }
        PersonRecord r;
        r.id = trim_copy(row[c_id]);
        if (r.id.empty()) {
            if (report) ++report->rows_missing_id;
            continue;
        }
        r.forename = normalize_name(row[c_fore]);
        r.surname = normalize_name(row[c_sur]);
        const std::string year = trim_copy(row[c_year]);
        if (!year.empty()) {
            try {
                r.birth_year = std::stoi(year);
            } catch (const std::exception&) {
                throw SchemaError(columns.birth_year + " value '" + year + "'");
            }
        }
        r.gender = trim_copy(row[c_gender]);
        r.group = trim_copy(row[c_group]);
        data.add(std::move(r));
    }
    return data;
}

Dataset ingest_file(const std::string& path, const ColumnMapping& columns,
                    IngestReport* report) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    return ingest(in, columns, report);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
    write_csv_row(out, {"id", "forename", "surname", "birth_year", "gender", "ethnic_group"});
    for (const PersonRecord& r : data.records()) {
        write_csv_row(out, {r.id, r.forename, r.surname, std::to_string(r.birth_year), r.gender,
                            r.group});
    }
}

const std::map<std::string, double>& default_setting3_weights() {
    static const std::map<std::string, double> weights = {
        {"Non-Hispanic White", 0.1}, {"Non-Hispanic Black", 0.2},
        {"Hispanic (White or Black)", 0.2}, {"Asian", 0.15},
        {"Other", 0.2}, {"Mixed", 0.1},
        {"Indigenous or Pacific Islander", 0.1}, {"Unknown", 0.1},
    };
    return weights;
}

namespace {

constexpr const char* kWeightKeyPrefix = "weight.";

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(value);
    while (std::getline(ss, item, ',')) {
        item = trim_copy(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

RunConfig parse_run_config(std::istream& in) {
    RunConfig config;
    bool weights_overridden = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string trimmed = trim_copy(line);
        if (trimmed.empty() || trimmed[0] == '#') continue;
        const std::size_t eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key = trim_copy(trimmed.substr(0, eq));
        const std::string value = trim_copy(trimmed.substr(eq + 1));

        try {
            if (key == "snapshot_a") {
                config.snapshot_a_path = value;
            } else if (key == "snapshot_b") {
                config.snapshot_b_path = value;
            } else if (key == "base") {
                config.base_path = value;
            } else if (key == "models") {
                config.models.clear();
                for (const std::string& name : split_list(value)) {
                    const auto kind = model_kind_from_name(name);
                    if (!kind) throw ConfigError("unknown model: " + name);
                    config.models.push_back(*kind);
                }
            } else if (key == "settings") {
                config.settings.clear();
                for (const std::string& s : split_list(value)) {
                    const int n = std::stoi(s);
                    if (n < 1 || n > 3) throw ConfigError("setting out of range: " + s);
                    config.settings.push_back(n);
                }
            } else if (key == "replicates") {
                config.replicates = std::stoi(value);
            } else if (key == "overall_rate") {
                config.overall_rate = std::stod(value);
            } else if (key == "sampling_fraction") {
                config.sampling_fraction = std::stod(value);
            } else if (key == "target_mmr") {
                config.target_mmr = std::stod(value);
            } else if (key == "master_seed") {
                config.master_seed = std::stoull(value);
            } else if (key == "output_dir") {
                config.output_dir = value;
            } else if (key == "u_pairs") {
                config.u_pair_count = std::stoull(value);
            } else if (key == "estimation_pairs") {
                config.estimation_pair_count = std::stoull(value);
            } else if (key == "em_init_lambda") {
                config.em_init_lambda = std::stod(value);
            } else if (key == "combined_aggregate_pc") {
                config.combined_aggregate_pc = value == "true" || value == "1";
            } else if (key.rfind(kWeightKeyPrefix, 0) == 0) {
                if (!weights_overridden) {
                    config.setting3_weights.clear();
                    weights_overridden = true;
                }
                config.setting3_weights[key.substr(std::string(kWeightKeyPrefix).size())] =
                    std::stod(value);
            } else {
                throw ConfigError("unknown config key: " + key);
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return config;
}

RunConfig parse_run_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return parse_run_config(in);
}

std::string canonical_config_string(const RunConfig& c) {
    std::ostringstream out;
    out << "base=" << c.base_path << '\n';
    out << "em_init_lambda=" << fmt(c.em_init_lambda, "%.10g") << '\n';
    out << "master_seed=" << c.master_seed << '\n';
    std::string models;
    for (const ModelKind m : c.models) {
        if (!models.empty()) models += ',';
        models += model_kind_name(m);
    }
    out << "models=" << models << '\n';
    out << "output_dir=" << c.output_dir << '\n';
    out << "overall_rate=" << fmt(c.overall_rate, "%.10g") << '\n';
    out << "replicates=" << c.replicates << '\n';
    out << "sampling_fraction=" << fmt(c.sampling_fraction, "%.10g") << '\n';
    std::string settings;
    for (const int s : c.settings) {
        if (!settings.empty()) settings += ',';
        settings += std::to_string(s);
    }
    out << "settings=" << settings << '\n';
    out << "snapshot_a=" << c.snapshot_a_path << '\n';
    out << "snapshot_b=" << c.snapshot_b_path << '\n';
    out << "target_mmr=" << fmt(c.target_mmr, "%.10g") << '\n';
    out << "combined_aggregate_pc=" << (c.combined_aggregate_pc ? "true" : "false") << '\n';
    out << "estimation_pairs=" << c.estimation_pair_count << '\n';
    out << "u_pairs=" << c.u_pair_count << '\n';
    for (const auto& [group, w] : c.setting3_weights) {
        out << kWeightKeyPrefix << group << "=" << fmt(w, "%.10g") << '\n';
    }
    return out.str();
}

CorruptionSetting setting_for(const RunConfig& config, int setting_number,
                              std::uint64_t replicate_seed) {
    CorruptionSetting s;
    s.overall_rate = config.overall_rate;
    s.replicate_seed = replicate_seed;
    switch (setting_number) {
        case 1:
            s.kind = ExposureKind::uniform;
            break;
        case 2:
            s.kind = ExposureKind::equal_exposure;
            break;
        case 3:
            s.kind = ExposureKind::disproportionate;
            s.group_weights = config.setting3_weights;
            break;
        default:
            throw ConfigError("setting out of range: " + std::to_string(setting_number));
    }
    return s;
}

namespace {

std::vector<MatchDecision> rethreshold(std::vector<MatchDecision> decisions, double threshold) {
    for (MatchDecision& d : decisions) {
        d.threshold = threshold;
        if (d.weight < threshold) d.right_id.reset();
    }
    return decisions;
}

Dataset subset(const Dataset& data, const std::vector<std::size_t>& indices) {
    Dataset out;
    for (const std::size_t i : indices) out.add(data[i]);
    return out;
}

struct SummaryRow {
    double mean = 0.0, lo = 0.0, hi = 0.0;
};

SummaryRow summarise(const std::vector<double>& values) {
    SummaryRow row;
    if (values.size() == 1) {
        row.mean = row.lo = row.hi = values[0];
        return row;
    }
    const ReplicateSummary s = aggregate_replicates("", std::vector<double>(values));
    row.mean = s.mean;
    row.lo = s.ci_low;
    row.hi = s.ci_high;
    return row;
}

}  // namespace

RunResults run_all_collect(const RunConfig& config) {
    const Dataset snap_a = ingest_file(config.snapshot_a_path);
    const Dataset snap_b = ingest_file(config.snapshot_b_path);
    const Dataset base = ingest_file(config.base_path);

    std::vector<std::string> groups_present;
    {
        std::set<std::string> seen;
        for (const PersonRecord& r : base.records()) seen.insert(r.group);
        groups_present.assign(seen.begin(), seen.end());
    }

    // within-person discrepancy profiles from the snapshot pair
    const auto discrepancies = pair_snapshots(snap_a, snap_b);
    std::vector<DiscrepancyRecord> fore_disc, sur_disc;
    for (const DiscrepancyRecord& d : discrepancies) {
        (d.field == Field::forename ? fore_disc : sur_disc).push_back(d);
    }
    const auto group_of = [&](const std::string& id) {
        const std::size_t i = base.index_of(id);
        return i == Dataset::npos ? std::string("Unknown") : base[i].group;
    };
    const ErrorProfile fore_profile = build_profile(fore_disc, group_of, groups_present);
    const ErrorProfile sur_profile = build_profile(sur_disc, group_of, groups_present);

    // forename embedding over the base extract. Only the combined
    // model consumes it, so skip the fit otherwise.
    const bool wants_combined =
        std::find(config.models.begin(), config.models.end(), ModelKind::combined) !=
        config.models.end();
    std::unique_ptr<PcContext> pc_holder;
    PcDistanceThresholds cuts;
    if (wants_combined) {
        std::vector<std::string> base_forenames;
        base_forenames.reserve(base.size());
        for (const PersonRecord& r : base.records()) base_forenames.push_back(r.forename);
        CorpusStats stats = CorpusStats::from_names(base_forenames);
        std::vector<FeatureVector> feature_corpus;
        feature_corpus.reserve(base.size());
        for (const PersonRecord& r : base.records()) {
            if (r.forename.empty()) continue;
            feature_corpus.push_back(extract_features(r.forename, stats));
        }
        const EmbeddingModel embedding = fit_embedding(feature_corpus);
        std::vector<std::pair<std::string, std::string>> fore_pairs;
        fore_pairs.reserve(fore_disc.size());
        for (const DiscrepancyRecord& d : fore_disc) {
            fore_pairs.emplace_back(d.value_a, d.value_b);
        }
        cuts = fit_thresholds(fore_pairs, embedding, stats);
        const ComponentThresholds component_cuts =
            fit_component_thresholds(fore_pairs, embedding, stats);
        pc_holder = std::make_unique<PcContext>(embedding, cuts, component_cuts,
                                                std::move(stats));
    }
    const PcContext* pc = pc_holder.get();

    const auto tf = std::make_shared<const TfTables>(TfTables::from_dataset(base));
    const auto rules = default_blocking_rules();

    nlohmann::json manifest;
    const std::string canonical = canonical_config_string(config);
    char hash_hex[24];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(hash_bytes(canonical)));
    manifest["config"] = canonical;
    manifest["config_hash"] = hash_hex;
    manifest["reference_group"] = kReferenceGroup;
    manifest["blocking_rules"] = {"birth_year+gender+surname+forename[0:3]",
                                  "birth_year+gender+forename[0:3]"};
    manifest["profile_inherited_groups"] = {{"forename", fore_profile.inherited_groups},
                                            {"surname", sur_profile.inherited_groups}};
    manifest["embedding_cuts"] = wants_combined ? cuts.to_json() : nlohmann::json();
    manifest["tf_floor"] = tf->floor;
    manifest["em"] = {{"init_lambda", config.em_init_lambda},
                      {"max_iterations", 200},
                      {"tolerance", 1e-6},
                      {"u_fixed_from_random_pairs", true},
                      {"u_pair_count", config.u_pair_count},
                      {"estimation_blocking", "birth_year+gender"},
                      {"estimation_pair_count", config.estimation_pair_count}};
    manifest["combined_forename_columns"] =
        config.combined_aggregate_pc ? "aggregate_norm" : "per_component";
    manifest["seeds"] = nlohmann::json::object();
    manifest["thresholds"] = nlohmann::json::object();
    manifest["em_fits"] = nlohmann::json::object();

    // rates[model][setting] -> per-replicate reports
    std::map<ModelKind, std::map<int, std::vector<RatesReport>>> rates;

    for (const int setting_number : config.settings) {
        std::map<ModelKind, ComparisonSpec> specs;
        std::map<ModelKind, LinkageModel> models;
        std::map<ModelKind, double> thresholds;
        for (const ModelKind m : config.models) {
            specs.emplace(m, spec_for_model(m, config.combined_aggregate_pc));
        }

        for (int replicate = 1; replicate <= config.replicates; ++replicate) {
            const std::uint64_t replicate_seed = combine_seed(
                combine_seed(config.master_seed, static_cast<std::uint64_t>(setting_number)),
                static_cast<std::uint64_t>(replicate));
            manifest["seeds"]["setting" + std::to_string(setting_number) + "_replicate" +
                     std::to_string(replicate)] = replicate_seed;

            const CorruptionSetting setting =
                setting_for(config, setting_number, replicate_seed);
            CorruptionOutput corrupted =
                corrupt_dataset(base, setting, fore_profile, sur_profile);

            if (replicate == 1) {
                // fit every model on the first replicate; estimation pairs
                // agree on birth year and gender only, prediction uses the
                // name-prefix rules
                for (const ModelKind m : config.models) {
                    const ComparisonSpec& spec = specs.at(m);
                    const PcContext* pc_ptr =
                        m == ModelKind::combined ? pc : nullptr;
                    const auto vectors = sample_estimation_vectors(
                        corrupted.corrupted, base, spec, pc_ptr, config.estimation_pair_count,
                        combine_seed(replicate_seed, hash_bytes(model_kind_name(m)) ^ 0xE5ULL));
                    const auto u = estimate_u(corrupted.corrupted, base, spec, pc_ptr,
                                              config.u_pair_count,
                                              combine_seed(replicate_seed, hash_bytes(
                                                  model_kind_name(m))));
                    EmOptions options;
                    options.init_lambda = config.em_init_lambda;
                    LinkageModel model = em_fit(vectors, spec, u, options);
                    model.tf = tf;
                    manifest["em_fits"][std::string(model_kind_name(m)) + "_setting" +
                             std::to_string(setting_number)] = {
                        {"lambda", model.lambda},
                        {"converged", model.converged},
                        {"iterations", model.iterations},
                        {"vectors", vectors.size()}};
                    models.emplace(m, std::move(model));
                }
            }

            // evaluation sample for this replicate
            const auto sample_indices = stratified_sample(
                corrupted.corrupted, corrupted.audit, config.sampling_fraction,
                combine_seed(replicate_seed, 0x7374726174ULL));
            const Dataset eval = subset(corrupted.corrupted, sample_indices);
            const auto exposure = corrupted.audit.exposure_by_id();
            const auto eval_candidates = block(eval, base, rules);

            for (const ModelKind m : config.models) {
                const ComparisonSpec& spec = specs.at(m);
                const PcContext* pc_ptr = m == ModelKind::combined ? pc : nullptr;
                const auto raw = link(eval, base, eval_candidates, models.at(m), spec, pc_ptr,
                                      kNoCandidateWeight);
                if (replicate == 1) {
                    std::vector<double> weights;
                    weights.reserve(raw.size());
                    for (const MatchDecision& d : raw) weights.push_back(d.weight);
                    const double t = calibrate_threshold(weights, config.target_mmr);
                    thresholds[m] = t;
                    manifest["thresholds"][std::string(model_kind_name(m)) + "_setting" +
                             std::to_string(setting_number)] = t;
                }
                const auto decisions = rethreshold(raw, thresholds.at(m));
                const auto counts = classify_outcomes(decisions, base, exposure);
                rates[m][setting_number].push_back(rates_and_disparities(counts));
            }
        }
    }

    RunResults results;
    results.rates = std::move(rates);
    results.manifest = std::move(manifest);
    return results;
}

void run_all(const RunConfig& config) {
    namespace fs = std::filesystem;
    fs::create_directories(config.output_dir);

    const RunResults results = run_all_collect(config);
    const auto& rates = results.rates;

    std::ofstream overall(fs::path(config.output_dir) / "overall.csv", std::ios::binary);
    write_csv_row(overall, {"model", "setting", "fmr_mean", "fmr_lo", "fmr_hi", "mmr_mean",
                            "mmr_lo", "mmr_hi"});
    for (const ModelKind m : config.models) {
        for (const int s : config.settings) {
            const auto& reports = rates.at(m).at(s);
            std::vector<double> fmr, mmr;
            for (const RatesReport& r : reports) {
                fmr.push_back(r.overall.fmr * 100.0);
                mmr.push_back(r.overall.mmr * 100.0);
            }
            const SummaryRow f = summarise(fmr), q = summarise(mmr);
            write_csv_row(overall, {model_kind_name(m), "Setting " + std::to_string(s),
                                    fmt(f.mean, "%.4f"), fmt(f.lo, "%.4f"), fmt(f.hi, "%.4f"),
                                    fmt(q.mean, "%.4f"), fmt(q.lo, "%.4f"), fmt(q.hi, "%.4f")});
        }
    }
    overall.close();

    std::ofstream by_group(fs::path(config.output_dir) / "by_group.csv", std::ios::binary);
    write_csv_row(by_group,
                  {"model", "setting", "group", "n_mean", "fmr_mean", "fmr_lo", "fmr_hi",
                   "mmr_mean", "mmr_lo", "mmr_hi", "fmr_disparity_mean", "fmr_disparity_lo",
                   "fmr_disparity_hi", "mmr_disparity_mean", "mmr_disparity_lo",
                   "mmr_disparity_hi"});
    for (const ModelKind m : config.models) {
        for (const int s : config.settings) {
            const auto& reports = rates.at(m).at(s);
            std::set<std::string> in_all;
            for (const auto& [group, r] : reports.front().by_group) in_all.insert(group);
            for (const RatesReport& r : reports) {
                std::set<std::string> keep;
                for (const std::string& g : in_all) {
                    if (r.by_group.count(g)) keep.insert(g);
                }
                in_all = std::move(keep);
            }
            for (const std::string& g : in_all) {
                std::vector<double> n, fmr, mmr, fdisp, mdisp;
                for (const RatesReport& r : reports) {
                    n.push_back(static_cast<double>(r.by_group.at(g).n));
                    fmr.push_back(r.by_group.at(g).fmr * 100.0);
                    mmr.push_back(r.by_group.at(g).mmr * 100.0);
                    fdisp.push_back(r.fmr_disparity_pp.at(g));
                    mdisp.push_back(r.mmr_disparity_pp.at(g));
                }
                const SummaryRow sn = summarise(n), sf = summarise(fmr), sm = summarise(mmr),
                                 sfd = summarise(fdisp), smd = summarise(mdisp);
                write_csv_row(by_group,
                              {model_kind_name(m), "Setting " + std::to_string(s), g,
                               fmt(sn.mean, "%.1f"), fmt(sf.mean, "%.4f"), fmt(sf.lo, "%.4f"),
                               fmt(sf.hi, "%.4f"), fmt(sm.mean, "%.4f"), fmt(sm.lo, "%.4f"),
                               fmt(sm.hi, "%.4f"), fmt(sfd.mean, "%.4f"), fmt(sfd.lo, "%.4f"),
                               fmt(sfd.hi, "%.4f"), fmt(smd.mean, "%.4f"),
                               fmt(smd.lo, "%.4f"), fmt(smd.hi, "%.4f")});
            }
        }
    }
    by_group.close();

    std::ofstream manifest_out(fs::path(config.output_dir) / "manifest.json", std::ios::binary);
    manifest_out << results.manifest.dump(2) << '\n';
    manifest_out.close();
}

}  // namespace namelink
