// iqbench: generate synthetic readout data, tune and train the classifier
// suite, benchmark it, and render the report bundle.
//
// Exit codes: 0 success, 1 partial model failure or runtime error,
// 2 usage/config/IO error.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iqbench/errors.hpp"
#include "iqbench/pipeline.hpp"
#include "iqbench/util.hpp"

namespace {

using iqbench::RunConfig;

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string models;
};

RunConfig effective_config(const CliOptions& options) {
    RunConfig config = iqbench::load_run_config(options.config_path);
    if (options.seed_given) config.seed = options.seed;
    if (!options.out_dir.empty()) config.output_dir = options.out_dir;
    if (!options.models.empty() && options.models != "all") {
        config.models.clear();
        std::size_t start = 0;
        while (start <= options.models.size()) {
            const std::size_t comma = options.models.find(',', start);
            const std::string id =
                options.models.substr(start, comma == std::string::npos ? std::string::npos
                                                                        : comma - start);
            if (!id.empty())
                config.models.push_back(
                    iqbench::ModelSelection{iqbench::kind_from_id(id), {}, {}});
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (config.models.empty())
            throw iqbench::ConfigError("--models selected nothing");
    }
    return config;
}

int report_outcome(const iqbench::StageOutcome& outcome, const char* stage) {
    for (const auto& [id, error] : outcome.failures)
        std::fprintf(stderr, "%s: %s failed: %s\n", stage, id.c_str(), error.c_str());
    if (outcome.partial()) {
        std::fprintf(stderr, "%s: %zu model(s) failed, %zu completed\n", stage,
                     outcome.failures.size(), outcome.completed.size());
        return 1;
    }
    return 0;
}

int dispatch(const std::string& command, const CliOptions& options) {
    const RunConfig config = effective_config(options);
    const std::filesystem::path out_dir = config.output_dir;

    if (command == "generate") {
        const iqbench::GenerateResult result = iqbench::run_generate(config, out_dir);
        std::printf("wrote %zu shots to %s\n", result.data.size(),
                    (out_dir / "data.csv").string().c_str());
        std::printf("  ground:  %zu shots, centroid target (%s, %s)\n",
                    result.data.count(iqbench::StateLabel::Ground),
                    iqbench::format_double(result.params.mean0.i).c_str(),
                    iqbench::format_double(result.params.mean0.q).c_str());
        std::printf("  excited: %zu shots, centroid target (%s, %s)\n",
                    result.data.count(iqbench::StateLabel::Excited),
                    iqbench::format_double(result.params.mean1.i).c_str(),
                    iqbench::format_double(result.params.mean1.q).c_str());
        std::printf("  Bayes-optimal accuracy: %s\n",
                    iqbench::format_double(
                        result.meta.at("bayes_optimal_accuracy").get<double>())
                        .c_str());
        return 0;
    }
    if (command == "train") {
        const iqbench::StageOutcome outcome = iqbench::run_train(config, out_dir);
        for (const auto& id : outcome.completed)
            std::printf("trained %s -> %s\n", id.c_str(),
                        (out_dir / ("model_" + id + ".json")).string().c_str());
        return report_outcome(outcome, "train");
    }
    if (command == "bench") {
        const iqbench::StageOutcome outcome = iqbench::run_bench(config, out_dir);
        std::printf("report written to %s\n", (out_dir / "report.md").string().c_str());
        return report_outcome(outcome, "bench");
    }
    if (command == "report") {
        iqbench::run_report(out_dir);
        std::printf("report re-rendered in %s\n", out_dir.string().c_str());
        return 0;
    }
    std::fprintf(stderr, "unknown command '%s'\n", command.c_str());
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic qubit-readout classifier benchmark"};
    app.require_subcommand(1);

    CliOptions options;
    app.add_option("--config", options.config_path, "JSON run configuration")
        ->check(CLI::ExistingFile);
    app.add_option("--out", options.out_dir, "output directory (overrides config)")
        ->envname("IQBENCH_OUT");
    auto* seed_opt = app.add_option("--seed", options.seed, "master seed (overrides config)");

    std::string models_help = "comma-separated model ids or \"all\"";
    CLI::App* generate = app.add_subcommand("generate", "write the synthetic dataset");
    CLI::App* train = app.add_subcommand("train", "tune and fit the selected models");
    train->add_option("--models", options.models, models_help);
    CLI::App* bench = app.add_subcommand("bench", "evaluate, time, and render the report");
    bench->add_option("--models", options.models, models_help);
    CLI::App* report = app.add_subcommand("report", "re-render artifacts from records.json");
    (void)generate;
    (void)report;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // --help/--version exit cleanly, misuse is 2
    }
    options.seed_given = seed_opt->count() > 0;

    try {
        return dispatch(app.get_subcommands().front()->get_name(), options);
    } catch (const iqbench::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const iqbench::InvalidHyperparamError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const iqbench::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const iqbench::BadFractionError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const iqbench::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const iqbench::ZeroDetuningError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const iqbench::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
}
