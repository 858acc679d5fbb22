#include "iqbench/pipeline.hpp"

#include <unistd.h>

#include <algorithm>
#include <fstream>

#include "iqbench/errors.hpp"
#include "iqbench/rng.hpp"
#include "iqbench/util.hpp"

#ifndef IQBENCH_BUILD_FLAGS
#define IQBENCH_BUILD_FLAGS "unknown"
#endif

namespace iqbench {

namespace {

using nlohmann::json;

// Strict object reader: every key must be consumed, leftovers are config
// errors that name the full path of the offending key.
class ObjectReader {
public:
    ObjectReader(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
        if (!doc.is_object())
            throw ConfigError("config node '" + path_ + "' must be a JSON object");
    }

    const json* find(const char* name) {
        seen_.push_back(name);
        const auto it = doc_.find(name);
        return it == doc_.end() ? nullptr : &*it;
    }

    bool boolean(const char* name, bool fallback) {
        const json* v = find(name);
        if (!v) return fallback;
        if (!v->is_boolean()) throw ConfigError(key(name) + " must be a boolean");
        return v->get<bool>();
    }

    double real(const char* name, double fallback) {
        const json* v = find(name);
        if (!v) return fallback;
        if (!v->is_number()) throw ConfigError(key(name) + " must be a number");
        return v->get<double>();
    }

    std::int64_t integer(const char* name, std::int64_t fallback) {
        const json* v = find(name);
        if (!v) return fallback;
        if (!v->is_number_integer()) throw ConfigError(key(name) + " must be an integer");
        return v->get<std::int64_t>();
    }

    std::uint64_t uinteger(const char* name, std::uint64_t fallback) {
        const json* v = find(name);
        if (!v) return fallback;
        if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0))
            throw ConfigError(key(name) + " must be a non-negative integer");
        return v->get<std::uint64_t>();
    }

    std::string text(const char* name, const std::string& fallback) {
        const json* v = find(name);
        if (!v) return fallback;
        if (!v->is_string()) throw ConfigError(key(name) + " must be a string");
        return v->get<std::string>();
    }

    std::string key(const char* name) const {
        return "config key '" + (path_.empty() ? std::string(name) : path_ + "." + name) + "'";
    }

    void finish() const {
        for (auto it = doc_.begin(); it != doc_.end(); ++it)
            if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end())
                throw ConfigError("unknown config key '" +
                                  (path_.empty() ? it.key() : path_ + "." + it.key()) + "'");
    }

private:
    const json& doc_;
    std::string path_;
    std::vector<std::string> seen_;
};

IQPoint point_from(const json& v, const std::string& key) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError("config key '" + key + "' must be a [i, q] number pair");
    return IQPoint{v[0].get<double>(), v[1].get<double>()};
}

std::vector<ModelSelection> default_selections() {
    std::vector<ModelSelection> out;
    for (const ModelKind kind : kAllModelKinds) out.push_back(ModelSelection{kind, {}, {}});
    return out;
}

ModelSelection parse_selection(const json& entry, std::size_t index) {
    ModelSelection sel;
    if (entry.is_string()) {
        sel.kind = kind_from_id(entry.get<std::string>());
        return sel;
    }
    if (!entry.is_object())
        throw ConfigError("config key 'models[" + std::to_string(index) +
                          "]' must be a model id or an object");
    ObjectReader reader(entry, "models[" + std::to_string(index) + "]");
    const json* kind = reader.find("kind");
    if (!kind || !kind->is_string())
        throw ConfigError(reader.key("kind") + " must name a model");
    sel.kind = kind_from_id(kind->get<std::string>());
    if (const json* hp = reader.find("hyperparams")) {
        if (!hp->is_object()) throw ConfigError(reader.key("hyperparams") + " must be an object");
        sel.hyperparams = *hp;
        validate_hyperparams(sel.kind, sel.hyperparams);  // fail fast on typos
    }
    if (const json* seed = reader.find("seed")) {
        if (!seed->is_number_unsigned() &&
            !(seed->is_number_integer() && seed->get<std::int64_t>() >= 0))
            throw ConfigError(reader.key("seed") + " must be a non-negative integer");
        sel.seed = seed->get<std::uint64_t>();
    }
    reader.finish();
    return sel;
}

std::filesystem::path model_path(const std::filesystem::path& out_dir, ModelKind kind) {
    return out_dir / ("model_" + kind_id(kind) + ".json");
}

json read_json_file(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path);
    if (!in)
        throw IoError(std::string("cannot open ") + what + " '" + path.string() + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError(std::string(what) + " '" + path.string() + "' is not valid JSON: " +
                          e.what());
    }
    return doc;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");
}

std::string host_name() {
    char buf[256] = {0};
    if (gethostname(buf, sizeof(buf) - 1) != 0) return "unknown";
    return buf;
}

std::string trials_csv(const std::vector<Trial>& trials) {
    std::string out = "trial,score,failed,hyperparams,fold_accuracies,error\n";
    for (std::size_t t = 0; t < trials.size(); ++t) {
        const Trial& trial = trials[t];
        std::string folds;
        for (std::size_t f = 0; f < trial.fold_accuracies.size(); ++f) {
            if (f) folds += ';';
            folds += format_double(trial.fold_accuracies[f]);
        }
        out += std::to_string(t) + "," + format_double(trial.score) + "," +
               (trial.failed ? "1" : "0") + "," + csv_quote(trial.hyperparams.dump()) + "," +
               csv_quote(folds) + "," + csv_quote(trial.error) + "\n";
    }
    return out;
}

json bracket_to_json(const std::vector<HalvingRound>& bracket) {
    json rounds = json::array();
    for (const auto& r : bracket)
        rounds.push_back(json{{"budget", r.budget}, {"entrants", r.entrants}, {"kept", r.kept}});
    return rounds;
}

struct PreparedData {
    Dataset data;
    std::string fingerprint;
    Dataset train;
    Dataset test;
};

PreparedData prepare_data(const RunConfig& config, const std::filesystem::path& out_dir) {
    PreparedData prepared;
    prepared.data = load_csv(out_dir / "data.csv");
    prepared.fingerprint = dataset_fingerprint(prepared.data);
    SplitDataset parts = split(prepared.data, config.test_fraction, config.split_seed_value(),
                               config.stratified);
    prepared.train = std::move(parts.train);
    prepared.test = std::move(parts.test);
    return prepared;
}

}  // namespace

bool TuningConfig::enabled_for(ModelKind kind) const {
    const auto it = enable.find(kind_id(kind));
    if (it != enable.end()) return it->get<bool>();
    return enabled;
}

std::uint64_t RunConfig::generator_seed() const {
    return generator_seed_explicit ? generator.seed : derive_seed(seed, "generate");
}

std::uint64_t RunConfig::split_seed_value() const {
    return split_seed ? *split_seed : derive_seed(seed, "split");
}

std::uint64_t RunConfig::tune_seed(ModelKind kind) const {
    return derive_seed(seed, "tune-" + kind_id(kind));
}

std::uint64_t RunConfig::fit_seed(const ModelSelection& selection) const {
    return selection.seed ? *selection.seed : derive_seed(seed, "fit-" + kind_id(selection.kind));
}

RunConfig parse_run_config(const nlohmann::json& doc) {
    RunConfig config;
    config.generator = default_cloud_params();
    config.models = default_selections();

    ObjectReader root(doc, "");
    config.seed = root.uinteger("seed", config.seed);

    if (const json* gen = root.find("generator")) {
        ObjectReader reader(*gen, "generator");
        if (const json* m0 = reader.find("mean0"))
            config.generator.mean0 = point_from(*m0, "generator.mean0");
        if (const json* m1 = reader.find("mean1"))
            config.generator.mean1 = point_from(*m1, "generator.mean1");
        config.generator.sigma = reader.real("sigma", config.generator.sigma);
        config.generator.decay_prob = reader.real("decay_prob", config.generator.decay_prob);
        config.generator.shots_per_class = static_cast<std::uint64_t>(
            reader.integer("shots_per_class",
                           static_cast<std::int64_t>(config.generator.shots_per_class)));
        if (const json* s = reader.find("seed")) {
            if (!s->is_number_unsigned() &&
                !(s->is_number_integer() && s->get<std::int64_t>() >= 0))
                throw ConfigError("config key 'generator.seed' must be a non-negative integer");
            config.generator.seed = s->get<std::uint64_t>();
            config.generator_seed_explicit = true;
        }
        reader.finish();
    }

    if (const json* sp = root.find("split")) {
        ObjectReader reader(*sp, "split");
        config.test_fraction = reader.real("test_fraction", config.test_fraction);
        config.stratified = reader.boolean("stratified", config.stratified);
        if (reader.find("seed") != nullptr)
            config.split_seed = reader.uinteger("seed", 0);  // find() above marked it seen
        reader.finish();
        if (!(config.test_fraction > 0.0) || !(config.test_fraction < 1.0))
            throw BadFractionError("config key 'split.test_fraction' must lie in (0,1)");
    }

    if (const json* models = root.find("models")) {
        if (models->is_string()) {
            if (models->get<std::string>() != "all")
                throw ConfigError("config key 'models' accepts \"all\" or a list");
        } else if (models->is_array()) {
            if (models->empty()) throw ConfigError("config key 'models' must select a model");
            config.models.clear();
            for (std::size_t k = 0; k < models->size(); ++k)
                config.models.push_back(parse_selection((*models)[k], k));
            for (std::size_t a = 0; a < config.models.size(); ++a)
                for (std::size_t b = a + 1; b < config.models.size(); ++b)
                    if (config.models[a].kind == config.models[b].kind)
                        throw ConfigError("config key 'models' lists '" +
                                          kind_id(config.models[a].kind) + "' twice");
        } else {
            throw ConfigError("config key 'models' accepts \"all\" or a list");
        }
    }

    if (const json* tn = root.find("tuning")) {
        ObjectReader reader(*tn, "tuning");
        config.tuning.enabled = reader.boolean("enabled", config.tuning.enabled);
        config.tuning.folds = static_cast<int>(reader.integer("folds", config.tuning.folds));
        config.tuning.grid_cap = static_cast<std::size_t>(
            reader.integer("grid_cap", static_cast<std::int64_t>(config.tuning.grid_cap)));
        const std::string layers = reader.text("nn_layers", "range");
        if (layers == "range")
            config.tuning.nn_layers = NnLayersMode::Range;
        else if (layers == "endpoints")
            config.tuning.nn_layers = NnLayersMode::Endpoints;
        else
            throw ConfigError("config key 'tuning.nn_layers' must be \"range\" or \"endpoints\"");
        if (const json* hv = reader.find("halving")) {
            ObjectReader halving(*hv, "tuning.halving");
            config.tuning.n_initial =
                static_cast<int>(halving.integer("n_initial", config.tuning.n_initial));
            config.tuning.eta = static_cast<int>(halving.integer("eta", config.tuning.eta));
            config.tuning.max_resource = static_cast<int>(
                halving.integer("max_resource", config.tuning.max_resource));
            halving.finish();
        }
        if (const json* enable = reader.find("enable")) {
            if (!enable->is_object())
                throw ConfigError("config key 'tuning.enable' must map model ids to booleans");
            for (auto it = enable->begin(); it != enable->end(); ++it) {
                kind_from_id(it.key());  // validates the id
                if (!it->is_boolean())
                    throw ConfigError("config key 'tuning.enable." + it.key() +
                                      "' must be a boolean");
            }
            config.tuning.enable = *enable;
        }
        reader.finish();
        if (config.tuning.folds < 2) throw ConfigError("config key 'tuning.folds' must be >= 2");
        if (config.tuning.grid_cap < 1)
            throw ConfigError("config key 'tuning.grid_cap' must be >= 1");
        if (config.tuning.eta < 2)
            throw ConfigError("config key 'tuning.halving.eta' must be >= 2");
        if (config.tuning.n_initial < config.tuning.eta)
            throw ConfigError("config key 'tuning.halving.n_initial' must be >= eta");
        if (config.tuning.max_resource < 1)
            throw ConfigError("config key 'tuning.halving.max_resource' must be >= 1");
    }

    if (const json* bn = root.find("bench")) {
        ObjectReader reader(*bn, "bench");
        config.bench.train_repetitions = static_cast<int>(
            reader.integer("train_repetitions", config.bench.train_repetitions));
        config.bench.predict_repetitions = static_cast<int>(
            reader.integer("predict_repetitions", config.bench.predict_repetitions));
        config.bench.grid_resolution =
            static_cast<int>(reader.integer("grid_resolution", config.bench.grid_resolution));
        reader.finish();
        if (config.bench.train_repetitions < 3 || config.bench.predict_repetitions < 3)
            throw ConfigError("config key 'bench.*_repetitions' must be >= 3");
        if (config.bench.grid_resolution < 2)
            throw ConfigError("config key 'bench.grid_resolution' must be >= 2");
    }

    config.standardize = root.boolean("standardize", config.standardize);
    config.output_dir = root.text("output_dir", config.output_dir);
    if (config.output_dir.empty())
        throw ConfigError("config key 'output_dir' must not be empty");
    root.finish();

    try {
        config.generator.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("config key 'generator' is invalid: ") + e.what());
    }
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    if (path.empty()) return parse_run_config(json::object());
    return parse_run_config(read_json_file(path, "config file"));
}

std::string dataset_fingerprint(const Dataset& data) {
    std::string blob;
    blob.reserve(data.size() * 48);
    for (const auto& shot : data.shots()) {
        blob += format_double(shot.point.i);
        blob += ',';
        blob += format_double(shot.point.q);
        blob += ',';
        blob += std::to_string(to_int(shot.label));
        blob += '\n';
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(blob)));
    return buf;
}

void verify_split_provenance(const nlohmann::json& model_metadata, const RunConfig& config,
                             const std::string& fingerprint) {
    if (!model_metadata.contains("provenance"))
        throw SplitSeedMismatchError("model metadata carries no split provenance");
    const json& prov = model_metadata.at("provenance");
    if (prov.value("split_seed", std::uint64_t{0}) != config.split_seed_value())
        throw SplitSeedMismatchError(
            "model was trained under split seed " + prov.value("split_seed", json()).dump() +
            " but the config asks for " + std::to_string(config.split_seed_value()));
    if (prov.value("test_fraction", -1.0) != config.test_fraction)
        throw SplitSeedMismatchError("model was trained under a different test fraction");
    if (prov.value("dataset_fingerprint", std::string()) != fingerprint)
        throw SplitSeedMismatchError("model was trained on a different dataset");
}

GenerateResult run_generate(const RunConfig& config, const std::filesystem::path& out_dir) {
    GenerateResult result;
    result.params = config.generator;
    result.params.seed = config.generator_seed();
    result.params.validate();
    result.data = generate(result.params);

    result.meta = json{
        {"format_version", 1},
        {"mean0", json::array({result.params.mean0.i, result.params.mean0.q})},
        {"mean1", json::array({result.params.mean1.i, result.params.mean1.q})},
        {"sigma", result.params.sigma},
        {"decay_prob", result.params.decay_prob},
        {"shots_per_class", result.params.shots_per_class},
        {"seed", result.params.seed},
        {"counts",
         json{{"ground", result.data.count(StateLabel::Ground)},
              {"excited", result.data.count(StateLabel::Excited)}}},
        {"bayes_optimal_accuracy", bayes_optimal_accuracy(result.params)},
        {"dataset_fingerprint", dataset_fingerprint(result.data)},
    };

    ensure_dir(out_dir);
    save_csv(result.data, out_dir / "data.csv");
    write_text_file(out_dir / "generate.json", result.meta.dump(2) + "\n");
    return result;
}

StageOutcome run_train(const RunConfig& config, const std::filesystem::path& out_dir) {
    const PreparedData prepared = prepare_data(config, out_dir);
    prepared.train.require_both_classes();
    ensure_dir(out_dir);

    StageOutcome outcome;
    for (const ModelSelection& selection : config.models) {
        const std::string id = kind_id(selection.kind);
        try {
            const SearchSpace space = table1_space(selection.kind, config.tuning.nn_layers);
            const bool preset = !selection.hyperparams.empty();
            const bool tune = config.tuning.enabled_for(selection.kind) && !preset &&
                              !space.singleton();

            json hyperparams = selection.hyperparams;
            json tuning_info{{"method", preset          ? "preset"
                                        : !tune          ? (space.singleton() ? "singleton"
                                                                              : "disabled")
                                                         : "pending"}};
            if (tune) {
                if (selection.kind == ModelKind::NeuralNet) {
                    const HalvingResult result = successive_halving(
                        space, "epochs", config.tuning.max_resource, prepared.train,
                        config.tuning.n_initial, config.tuning.eta, config.tuning.folds,
                        config.tune_seed(selection.kind));
                    hyperparams = result.best;
                    tuning_info = json{{"method", "successive_halving"},
                                       {"best_score", result.best_score},
                                       {"trials", result.trials.size()},
                                       {"bracket", bracket_to_json(result.bracket)}};
                    write_text_file(out_dir / ("tuning_" + id + ".csv"),
                                    trials_csv(result.trials));
                } else {
                    const GridSearchResult result = grid_search(
                        space, prepared.train, config.tuning.folds,
                        config.tune_seed(selection.kind), config.tuning.grid_cap);
                    hyperparams = result.best;
                    tuning_info = json{{"method", "grid"},
                                       {"best_score", result.best_score},
                                       {"trials", result.trials.size()},
                                       {"folds", config.tuning.folds}};
                    write_text_file(out_dir / ("tuning_" + id + ".csv"),
                                    trials_csv(result.trials));
                }
            }
            if (!hyperparams.contains("standardize"))
                hyperparams["standardize"] = config.standardize;

            TrainedModel model =
                fit(ClassifierSpec{selection.kind, hyperparams, config.fit_seed(selection)},
                    prepared.train);
            model.merge_metadata(json{
                {"provenance",
                 json{{"master_seed", config.seed},
                      {"split_seed", config.split_seed_value()},
                      {"test_fraction", config.test_fraction},
                      {"stratified", config.stratified},
                      {"dataset_fingerprint", prepared.fingerprint}}},
                {"tuning", tuning_info},
            });
            write_text_file(model_path(out_dir, selection.kind), model.to_json().dump(2) + "\n");
            outcome.completed.push_back(id);
        } catch (const Error& e) {
            outcome.failures.emplace_back(id, e.what());
        }
    }
    return outcome;
}

StageOutcome run_bench(const RunConfig& config, const std::filesystem::path& out_dir,
                       ReportBundle* bundle_out) {
    const PreparedData prepared = prepare_data(config, out_dir);

    bool any_model_file = false;
    for (const ModelSelection& selection : config.models)
        any_model_file |= std::filesystem::exists(model_path(out_dir, selection.kind));
    if (!any_model_file)
        throw IoError("no models found in '" + out_dir.string() +
                      "'; run the train subcommand first");

    std::vector<IQPoint> test_points;
    std::vector<StateLabel> test_truth;
    test_points.reserve(prepared.test.size());
    for (const auto& shot : prepared.test.shots()) {
        test_points.push_back(shot.point);
        test_truth.push_back(shot.label);
    }
    const BBox bbox = data_bbox(prepared.data);

    ReportBundle bundle;
    StageOutcome outcome;
    for (const ModelSelection& selection : config.models) {
        const std::string id = kind_id(selection.kind);
        try {
            const std::filesystem::path path = model_path(out_dir, selection.kind);
            if (!std::filesystem::exists(path))
                throw IoError("model file '" + path.string() + "' not found; train it first");
            const TrainedModel model =
                TrainedModel::from_json(read_json_file(path, "model file"));
            verify_split_provenance(model.metadata(), config, prepared.fingerprint);

            BenchmarkRecord record;
            record.kind = selection.kind;
            record.name = model.display_name();
            record.hyperparams = model.spec().hyperparams;

            const ConfusionCounts counts = evaluate(model, prepared.test);
            record.accuracy = counts.accuracy();
            record.tpr = counts.tpr();
            record.fpr = counts.fpr();
            record.roc = roc_curve(model.roc_scores(test_points), test_truth);
            record.auc = auc(record.roc);

            TimerOptions fit_timer;
            fit_timer.repetitions = config.bench.train_repetitions;
            const FitTiming fit_timing = time_fit(model.spec(), prepared.train, fit_timer);
            record.train_time_s = fit_timing.seconds;

            TimerOptions predict_timer;
            predict_timer.repetitions = config.bench.predict_repetitions;
            const PredictTiming predict_timing =
                time_predict(model, test_points, predict_timer);
            record.test_time_us_per_shot = predict_timing.micros_per_shot;

            record.grid = boundary_grid(model, bbox, config.bench.grid_resolution);
            record.extra = json{
                {"confusion",
                 json{{"tp", counts.tp}, {"fn", counts.fn}, {"fp", counts.fp},
                      {"tn", counts.tn}}},
                {"fit_time_samples_s", fit_timing.samples},
                {"predict_time_samples_us_per_shot", predict_timing.samples},
                {"predict_batch_multiplier", predict_timing.batch_multiplier},
                {"model_metadata", model.metadata()},
            };
            bundle.records.push_back(std::move(record));
            outcome.completed.push_back(id);
        } catch (const SplitSeedMismatchError&) {
            throw;  // a wrong split invalidates the whole bench, not one model
        } catch (const Error& e) {
            outcome.failures.emplace_back(id, e.what());
        }
    }

    if (bundle.records.empty())
        throw IoError("no model could be benchmarked in '" + out_dir.string() + "'");

    bundle.environment = json{
        {"host", host_name()},
        {"build_flags", IQBENCH_BUILD_FLAGS},
        {"seed", config.seed},
        {"split_seed", config.split_seed_value()},
        {"standardize", config.standardize},
        {"positive_class", "excited"},
        {"train_shots", prepared.train.size()},
        {"test_shots", prepared.test.size()},
        {"train_repetitions", config.bench.train_repetitions},
        {"predict_repetitions", config.bench.predict_repetitions},
        {"grid_resolution", config.bench.grid_resolution},
    };
    const std::filesystem::path generate_meta = out_dir / "generate.json";
    if (std::filesystem::exists(generate_meta)) {
        const json meta = read_json_file(generate_meta, "generate metadata");
        if (meta.contains("bayes_optimal_accuracy"))
            bundle.environment["bayes_optimal_accuracy"] = meta.at("bayes_optimal_accuracy");
    }

    render_report(bundle, out_dir);
    if (bundle_out != nullptr) *bundle_out = std::move(bundle);
    return outcome;
}

void run_report(const std::filesystem::path& out_dir) {
    const std::filesystem::path path = out_dir / "records.json";
    if (!std::filesystem::exists(path))
        throw IoError("no records.json in '" + out_dir.string() +
                      "'; run the bench subcommand first");
    render_report(bundle_from_json(read_json_file(path, "records file")), out_dir);
}

}  // namespace iqbench
