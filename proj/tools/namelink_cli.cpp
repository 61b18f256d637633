#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>

#include <nlohmann/json.hpp>

#include "namelink/corruption_engine.hpp"
#include "namelink/csv.hpp"
#include "namelink/discrepancy_profiler.hpp"
#include "namelink/evaluation.hpp"
#include "namelink/linkage_engine.hpp"
#include "namelink/name_features.hpp"
#include "namelink/pipeline.hpp"
#include "namelink/synth.hpp"

namespace fs = std::filesystem;
using namespace namelink;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

nlohmann::json load_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return nlohmann::json::parse(in);
}

std::map<std::string, double> parse_weight_args(const std::vector<std::string>& args) {
    std::map<std::string, double> weights;
    for (const std::string& arg : args) {
        const std::size_t eq = arg.find('=');
        if (eq == std::string::npos) throw ConfigError("expected GROUP=WEIGHT: " + arg);
        weights[arg.substr(0, eq)] = std::stod(arg.substr(eq + 1));
    }
    return weights;
}

int cmd_synth(const std::string& out_path, const std::string& snap_a_path,
              const std::string& snap_b_path, std::int64_t size, std::uint64_t seed,
              double zipf_alpha_forename, double zipf_alpha_surname, double drift_forename,
              double drift_surname) {
    SynthSpec spec;
    spec.size = size;
    spec.seed = seed;
    spec.zipf_alpha_forename = zipf_alpha_forename;
    spec.zipf_alpha_surname = zipf_alpha_surname;
    spec.drift_forename_rate = drift_forename;
    spec.drift_surname_rate = drift_surname;
    const Dataset base = synth_corpus(spec);
    {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw Error("cannot write " + out_path);
        write_dataset_csv(out, base);
    }
    if (!snap_a_path.empty() || !snap_b_path.empty()) {
        const auto [snap_a, snap_b] = synth_snapshot_pair(base, spec);
        if (!snap_a_path.empty()) {
            std::ofstream out(snap_a_path, std::ios::binary);
            write_dataset_csv(out, snap_a);
        }
        if (!snap_b_path.empty()) {
            std::ofstream out(snap_b_path, std::ios::binary);
            write_dataset_csv(out, snap_b);
        }
    }
    std::cout << "synth: " << base.size() << " records -> " << out_path << "\n";
    return 0;
}

int cmd_profile(const std::string& snap_a_path, const std::string& snap_b_path,
                const std::string& base_path, const std::string& out_dir) {
    const Dataset snap_a = ingest_file(snap_a_path);
    const Dataset snap_b = ingest_file(snap_b_path);
    const Dataset base = ingest_file(base_path);

    std::vector<std::string> groups;
    {
        std::set<std::string> seen;
        for (const PersonRecord& r : base.records()) seen.insert(r.group);
        groups.assign(seen.begin(), seen.end());
    }
    const auto discrepancies = pair_snapshots(snap_a, snap_b);
    std::vector<DiscrepancyRecord> fore, sur;
    for (const DiscrepancyRecord& d : discrepancies) {
        (d.field == Field::forename ? fore : sur).push_back(d);
    }
    const auto group_of = [&](const std::string& id) {
        const std::size_t i = base.index_of(id);
        return i == Dataset::npos ? std::string("Unknown") : base[i].group;
    };
    const ErrorProfile fore_profile = build_profile(fore, group_of, groups);
    const ErrorProfile sur_profile = build_profile(sur, group_of, groups);

    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "profile_forename.json", fore_profile.to_json().dump(2) + "\n");
    write_file(fs::path(out_dir) / "profile_surname.json", sur_profile.to_json().dump(2) + "\n");

    const std::pair<const char*, const ErrorProfile*> emitted[] = {{"forename", &fore_profile},
                                                                   {"surname", &sur_profile}};
    for (const auto& [name, prof] : emitted) {
        if (!prof->inherited_groups.empty()) {
            std::cerr << "warning: " << name << " profile: groups without discrepancies"
                      << " inherit the pooled distribution:";
            for (const std::string& g : prof->inherited_groups) std::cerr << " [" << g << "]";
            std::cerr << "\n";
        }
    }

    // embedding + discretisation cuts from the same inputs
    std::vector<std::string> forenames;
    forenames.reserve(base.size());
    for (const PersonRecord& r : base.records()) forenames.push_back(r.forename);
    const CorpusStats stats = CorpusStats::from_names(forenames);
    std::vector<FeatureVector> features;
    for (const PersonRecord& r : base.records()) {
        if (!r.forename.empty()) features.push_back(extract_features(r.forename, stats));
    }
    const EmbeddingModel embedding = fit_embedding(features);
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const DiscrepancyRecord& d : fore) pairs.emplace_back(d.value_a, d.value_b);
    const PcDistanceThresholds cuts = fit_thresholds(pairs, embedding, stats);
    const ComponentThresholds component_cuts =
        fit_component_thresholds(pairs, embedding, stats);
    write_file(fs::path(out_dir) / "embedding.json",
               embedding_document(embedding, cuts, component_cuts).dump(2) + "\n");

    std::cout << "profile: " << fore.size() << " forename and " << sur.size()
              << " surname discrepancies -> " << out_dir << "\n";
    return 0;
}

int cmd_corrupt(const std::string& base_path, const std::string& profile_dir, int setting_number,
                double rate, std::uint64_t seed, int replicate,
                const std::vector<std::string>& weight_args, const std::string& out_path,
                const std::string& audit_path) {
    const Dataset base = ingest_file(base_path);
    const ErrorProfile fore_profile =
        ErrorProfile::from_json(load_json(fs::path(profile_dir) / "profile_forename.json"));
    const ErrorProfile sur_profile =
        ErrorProfile::from_json(load_json(fs::path(profile_dir) / "profile_surname.json"));

    RunConfig config;
    config.overall_rate = rate;
    if (!weight_args.empty()) config.setting3_weights = parse_weight_args(weight_args);
    const std::uint64_t replicate_seed = combine_seed(
        combine_seed(seed, static_cast<std::uint64_t>(setting_number)),
        static_cast<std::uint64_t>(replicate));
    const CorruptionSetting setting = setting_for(config, setting_number, replicate_seed);

    const CorruptionOutput out = corrupt_dataset(base, setting, fore_profile, sur_profile);
    {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw Error("cannot write " + out_path);
        write_dataset_csv(f, out.corrupted);
    }
    {
        std::ofstream f(audit_path, std::ios::binary);
        if (!f) throw Error("cannot write " + audit_path);
        out.audit.write_csv(f);
    }
    std::int64_t exposed = 0;
    for (const AuditEntry& e : out.audit.entries) exposed += e.exposed ? 1 : 0;
    std::cout << "corrupt: " << exposed << " exposures over " << base.size() << " records -> "
              << out_path << "\n";
    return 0;
}

int cmd_link(const std::string& left_path, const std::string& right_path,
             const std::string& model_name, const std::string& embedding_path, double threshold,
             std::uint64_t seed, const std::string& out_path, const std::string& model_out) {
    const auto kind = model_kind_from_name(model_name);
    if (!kind) throw ConfigError("unknown model: " + model_name);
    const Dataset left = ingest_file(left_path);
    const Dataset right = ingest_file(right_path);
    const ComparisonSpec spec = spec_for_model(*kind);

    std::unique_ptr<PcContext> pc;
    if (*kind == ModelKind::combined) {
        if (embedding_path.empty()) {
            throw ConfigError("the combined model needs --embedding");
        }
        const nlohmann::json doc = load_json(embedding_path);
        auto [embedding, cuts] = embedding_from_document(doc);
        std::vector<std::string> names;
        for (const PersonRecord& r : right.records()) names.push_back(r.forename);
        if (doc.contains("component_cuts")) {
            pc = std::make_unique<PcContext>(
                std::move(embedding), cuts,
                component_thresholds_from_json(doc.at("component_cuts")),
                CorpusStats::from_names(names));
        } else {
            pc = std::make_unique<PcContext>(std::move(embedding), cuts,
                                             CorpusStats::from_names(names));
        }
    }

    const auto rules = default_blocking_rules();
    const auto candidates = block(left, right, rules);
    std::vector<ComparisonVector> vectors;
    for (std::size_t i = 0; i < left.size(); ++i) {
        for (const std::uint32_t j : candidates[i]) {
            vectors.push_back(compare(left[i], right[j], spec, pc.get()));
        }
    }
    const auto u = estimate_u(left, right, spec, pc.get(), 200000, combine_seed(seed, 0x75ULL));
    LinkageModel model = em_fit(vectors, spec, u);
    model.tf = std::make_shared<const TfTables>(TfTables::from_dataset(right));

    const auto decisions = link(left, right, candidates, model, spec, pc.get(), threshold);
    {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw Error("cannot write " + out_path);
        write_decisions_csv(f, decisions);
    }
    if (!model_out.empty()) write_file(model_out, model.to_json(spec).dump(2) + "\n");

    std::int64_t linked = 0;
    for (const MatchDecision& d : decisions) linked += d.right_id ? 1 : 0;
    std::cout << "link: " << linked << "/" << decisions.size() << " linked at threshold "
              << threshold << " -> " << out_path << "\n";
    return 0;
}

int cmd_evaluate(const std::string& decisions_path, const std::string& base_path,
                 const std::string& audit_path, const std::string& out_dir,
                 const std::string& reference_group) {
    const Dataset base = ingest_file(base_path);
    std::ifstream decisions_in(decisions_path, std::ios::binary);
    if (!decisions_in) throw Error("cannot open " + decisions_path);
    const auto decisions = read_decisions_csv(decisions_in);
    std::ifstream audit_in(audit_path, std::ios::binary);
    if (!audit_in) throw Error("cannot open " + audit_path);
    const CorruptionAudit audit = CorruptionAudit::read_csv(audit_in);

    const auto counts = classify_outcomes(decisions, base, audit.exposure_by_id());
    const RatesReport report = rates_and_disparities(counts, reference_group);

    fs::create_directories(out_dir);
    std::ofstream out(fs::path(out_dir) / "rates.csv", std::ios::binary);
    write_csv_row(out, {"group", "n", "fmr_percent", "mmr_percent", "fmr_disparity_pp",
                        "mmr_disparity_pp"});
    const auto pct = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", v);
        return std::string(buf);
    };
    write_csv_row(out, {"<overall>", std::to_string(report.overall.n),
                        pct(report.overall.fmr * 100.0), pct(report.overall.mmr * 100.0), "", ""});
    for (const auto& [group, rates] : report.by_group) {
        write_csv_row(out, {group, std::to_string(rates.n), pct(rates.fmr * 100.0),
                            pct(rates.mmr * 100.0), pct(report.fmr_disparity_pp.at(group)),
                            pct(report.mmr_disparity_pp.at(group))});
    }
    std::cout << "evaluate: overall FMR " << pct(report.overall.fmr * 100.0) << "% MMR "
              << pct(report.overall.mmr * 100.0) << "% -> " << out_dir << "/rates.csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"record linkage stress-testing toolkit"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic registry corpus");
    std::string synth_out = "base.csv", synth_a, synth_b;
    std::int64_t synth_size = 50000;
    std::uint64_t synth_seed = 1;
    double synth_alpha_f = 0.35, synth_alpha_s = 0.70;
    double synth_drift_f = 0.03, synth_drift_s = 0.04;
    synth->add_option("--out", synth_out, "base corpus CSV path");
    synth->add_option("--snap-a", synth_a, "snapshot A CSV path (optional)");
    synth->add_option("--snap-b", synth_b, "snapshot B CSV path (optional)");
    synth->add_option("--size", synth_size, "record count");
    synth->add_option("--seed", synth_seed, "corpus seed")->required();
    synth->add_option("--zipf-alpha-forename", synth_alpha_f, "forename rank skew");
    synth->add_option("--zipf-alpha-surname", synth_alpha_s, "surname rank skew");
    synth->add_option("--drift-forename", synth_drift_f, "snapshot forename drift rate");
    synth->add_option("--drift-surname", synth_drift_s, "snapshot surname drift rate");

    // profile
    auto* profile = app.add_subcommand("profile", "learn error profiles from a snapshot pair");
    std::string prof_a, prof_b, prof_base, prof_out = "profiles";
    profile->add_option("--snap-a", prof_a)->required();
    profile->add_option("--snap-b", prof_b)->required();
    profile->add_option("--base", prof_base, "reference corpus for groups/embedding")->required();
    profile->add_option("--out-dir", prof_out);

    // corrupt
    auto* corrupt = app.add_subcommand("corrupt", "corrupt a corpus under a setting");
    std::string cor_base, cor_profiles = "profiles", cor_out = "corrupted.csv",
                cor_audit = "audit.csv";
    int cor_setting = 1, cor_replicate = 1;
    double cor_rate = 0.10;
    std::uint64_t cor_seed = 0;
    std::vector<std::string> cor_weights;
    corrupt->add_option("--base", cor_base)->required();
    corrupt->add_option("--profiles", cor_profiles, "profile directory");
    corrupt->add_option("--setting", cor_setting, "1 uniform, 2 equal exposure, 3 disproportionate")
        ->check(CLI::Range(1, 3));
    corrupt->add_option("--rate", cor_rate, "overall corruption rate");
    corrupt->add_option("--seed", cor_seed, "master seed")->required();
    corrupt->add_option("--replicate", cor_replicate, "replicate number");
    corrupt->add_option("--weight", cor_weights, "GROUP=WEIGHT for setting 3");
    corrupt->add_option("--out", cor_out, "corrupted corpus CSV");
    corrupt->add_option("--audit", cor_audit, "audit CSV");

    // link
    auto* link_cmd = app.add_subcommand("link", "link a corrupted corpus back to its original");
    std::string link_left, link_right, link_model = "jw", link_embedding,
                link_out = "decisions.csv", link_model_out;
    double link_threshold = 0.0;
    std::uint64_t link_seed = 0;
    link_cmd->add_option("--left", link_left, "corrupted CSV")->required();
    link_cmd->add_option("--right", link_right, "original CSV")->required();
    link_cmd->add_option("--model", link_model,
                         "jw | jw_no_tf | levenshtein | levenshtein_no_tf | combined");
    link_cmd->add_option("--embedding", link_embedding, "embedding.json (combined model)");
    link_cmd->add_option("--threshold", link_threshold, "match-weight threshold")->required();
    link_cmd->add_option("--seed", link_seed, "u-estimation seed");
    link_cmd->add_option("--out", link_out, "decisions CSV");
    link_cmd->add_option("--model-out", link_model_out, "fitted model JSON (optional)");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "score decisions against gold records");
    std::string eval_decisions, eval_base, eval_audit, eval_out = "evaluation";
    std::string eval_reference = kReferenceGroup;
    evaluate->add_option("--decisions", eval_decisions)->required();
    evaluate->add_option("--base", eval_base)->required();
    evaluate->add_option("--audit", eval_audit)->required();
    evaluate->add_option("--out-dir", eval_out);
    evaluate->add_option("--reference-group", eval_reference);

    // run-all
    auto* run = app.add_subcommand("run-all", "full pipeline from a config file");
    std::string run_config_path;
    std::string run_out;
    std::uint64_t run_seed = 0;
    bool run_seed_set = false;
    run->add_option("--config", run_config_path, "flat key=value config")->required();
    auto* seed_opt = run->add_option("--seed", run_seed, "master seed (overrides config)")->required();
    run->add_option("--out-dir", run_out, "output directory (overrides config)");
    run->callback([&] { run_seed_set = seed_opt->count() > 0; });

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            return cmd_synth(synth_out, synth_a, synth_b, synth_size, synth_seed,
                             synth_alpha_f, synth_alpha_s, synth_drift_f, synth_drift_s);
        }
        if (profile->parsed()) return cmd_profile(prof_a, prof_b, prof_base, prof_out);
        if (corrupt->parsed()) {
            return cmd_corrupt(cor_base, cor_profiles, cor_setting, cor_rate, cor_seed,
                               cor_replicate, cor_weights, cor_out, cor_audit);
        }
        if (link_cmd->parsed()) {
            return cmd_link(link_left, link_right, link_model, link_embedding, link_threshold,
                            link_seed, link_out, link_model_out);
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(eval_decisions, eval_base, eval_audit, eval_out, eval_reference);
        }
        if (run->parsed()) {
            RunConfig config = parse_run_config_file(run_config_path);
            if (run_seed_set) config.master_seed = run_seed;
            if (!run_out.empty()) config.output_dir = run_out;
            run_all(config);
            std::cout << "run-all: reports in " << config.output_dir << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
