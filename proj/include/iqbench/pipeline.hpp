#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "iqbench/report.hpp"
#include "iqbench/synthgen.hpp"
#include "iqbench/tuner.hpp"

namespace iqbench {

// One requested classifier. Explicit hyperparams suppress tuning for that
// model; an explicit seed overrides the derived per-model fit seed.
struct ModelSelection {
    ModelKind kind = ModelKind::FidelityFit;
    nlohmann::json hyperparams = nlohmann::json::object();
    std::optional<std::uint64_t> seed;
};

struct TuningConfig {
    bool enabled = true;
    int folds = 5;
    std::size_t grid_cap = 10000;
    NnLayersMode nn_layers = NnLayersMode::Range;
    int n_initial = 8;       // successive halving entrants
    int eta = 4;
    int max_resource = 30;   // NN epoch budget at the final round
    // per-model overrides of `enabled`, keyed by machine id
    nlohmann::json enable = nlohmann::json::object();

    bool enabled_for(ModelKind kind) const;
};

struct BenchConfig {
    int train_repetitions = 3;
    int predict_repetitions = 11;
    int grid_resolution = 80;
};

// Whole-run configuration. One master seed fans out to per-stage seeds so
// stages are individually reproducible; explicit per-stage seeds win.
struct RunConfig {
    std::uint64_t seed = 20260821;
    CloudParams generator;  // generator.seed == 0 means "derive from master"
    bool generator_seed_explicit = false;
    double test_fraction = 0.25;
    bool stratified = true;
    std::optional<std::uint64_t> split_seed;
    std::vector<ModelSelection> models;  // defaults to all eight
    TuningConfig tuning;
    BenchConfig bench;
    bool standardize = false;
    std::string output_dir = "out";

    std::uint64_t generator_seed() const;
    std::uint64_t split_seed_value() const;
    std::uint64_t tune_seed(ModelKind kind) const;
    std::uint64_t fit_seed(const ModelSelection& selection) const;
};

// Strict parse: unknown keys anywhere raise ConfigError naming the key.
RunConfig parse_run_config(const nlohmann::json& doc);
// Defaults when path is empty; otherwise reads and parses the JSON file.
RunConfig load_run_config(const std::filesystem::path& path);

// Canonical, content-based dataset fingerprint shared by train and bench.
std::string dataset_fingerprint(const Dataset& data);

// Raises SplitSeedMismatchError unless the model's provenance matches the
// config's split seed, test fraction, and dataset fingerprint.
void verify_split_provenance(const nlohmann::json& model_metadata, const RunConfig& config,
                             const std::string& fingerprint);

// --- pipeline stages ------------------------------------------------------
// Each stage reads its inputs from and writes its artifacts under `out_dir`.

struct GenerateResult {
    CloudParams params;
    Dataset data;
    nlohmann::json meta;  // counts, centroids, Bayes-optimal accuracy
};

// data.csv + generate.json
GenerateResult run_generate(const RunConfig& config, const std::filesystem::path& out_dir);

struct StageOutcome {
    std::vector<std::string> completed;  // model ids, in processing order
    std::vector<std::pair<std::string, std::string>> failures;  // (model id, error)
    bool partial() const { return !failures.empty(); }
};

// Splits data.csv, tunes where enabled, fits on the training side, and
// writes model_<id>.json plus tuning_<id>.csv trial logs. A failing model is
// recorded and skipped.
StageOutcome run_train(const RunConfig& config, const std::filesystem::path& out_dir);

// Loads data.csv and the trained models, re-creates the identical split,
// verifies provenance, evaluates + times everything, and renders the report
// bundle. `outcome` lists models that failed and were left out of the report.
StageOutcome run_bench(const RunConfig& config, const std::filesystem::path& out_dir,
                       ReportBundle* bundle_out = nullptr);

// Re-renders every report artifact from records.json.
void run_report(const std::filesystem::path& out_dir);

}  // namespace iqbench
