#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "namelink/corruption_engine.hpp"
#include "namelink/evaluation.hpp"
#include "namelink/linkage_engine.hpp"
#include "namelink/record.hpp"
#include "namelink/synth.hpp"

namespace namelink {

struct ColumnMapping {
    std::string id = "id";
    std::string forename = "forename";
    std::string surname = "surname";
    std::string birth_year = "birth_year";
    std::string gender = "gender";
    std::string ethnic_group = "ethnic_group";
};

struct IngestReport {
    std::size_t rows_read = 0;
    std::size_t rows_missing_id = 0;  // rejected
};

// Reads a registry-shaped CSV; names are normalised, rows without an id are
// dropped (counted in the report), missing names stay empty and are treated
// as non-corruptible downstream.
Dataset ingest(std::istream& in, const ColumnMapping& columns = {},
               IngestReport* report = nullptr);
Dataset ingest_file(const std::string& path, const ColumnMapping& columns = {},
                    IngestReport* report = nullptr);

void write_dataset_csv(std::ostream& out, const Dataset& data);

// Exposure weights behind the disproportionate setting, as shipped.
const std::map<std::string, double>& default_setting3_weights();

struct RunConfig {
    std::string snapshot_a_path;
    std::string snapshot_b_path;
    std::string base_path;
    std::vector<ModelKind> models = all_model_kinds();
    std::vector<int> settings = {1, 2, 3};
    int replicates = 5;
    double overall_rate = 0.10;
    std::map<std::string, double> setting3_weights = default_setting3_weights();
    double sampling_fraction = 0.05;
    double target_mmr = 0.20;
    std::uint64_t master_seed = 0;
    std::string output_dir = ".";
    std::size_t u_pair_count = 200000;
    std::size_t estimation_pair_count = 2000000;
    double em_init_lambda = 0.01;
    bool combined_aggregate_pc = false;  // single aggregate pc column instead of per-PC
};

// Flat key=value config document; unknown keys are an error.
RunConfig parse_run_config(std::istream& in);
RunConfig parse_run_config_file(const std::string& path);
std::string canonical_config_string(const RunConfig& config);

CorruptionSetting setting_for(const RunConfig& config, int setting_number,
                              std::uint64_t replicate_seed);

struct RunResults {
    // per (model, setting): one RatesReport per replicate, in replicate order
    std::map<ModelKind, std::map<int, std::vector<RatesReport>>> rates;
    nlohmann::json manifest;
};

// Full pipeline: profile -> corrupt (setting x replicate) -> fit on
// replicate 1 -> calibrate per (model x setting) -> link and evaluate every
// replicate.
RunResults run_all_collect(const RunConfig& config);

// run_all_collect plus overall.csv, by_group.csv, manifest.json under
// output_dir.
void run_all(const RunConfig& config);

}  // namespace namelink
