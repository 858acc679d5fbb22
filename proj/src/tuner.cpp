#include "iqbench/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "iqbench/errors.hpp"
#include "iqbench/evalbench.hpp"
#include "iqbench/rng.hpp"

namespace iqbench {

namespace {

using nlohmann::json;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Endpoints are emitted exactly: round-tripping them through the t-formula
// can land an ulp outside [lo, hi], and the hyperparameter schemas reject
// out-of-range values no matter how small the excess.
std::vector<json> linear_ints(int lo, int hi, int count) {
    std::vector<json> out;
    for (int k = 0; k < count; ++k) {
        if (k == 0) { out.push_back(lo); continue; }
        if (k == count - 1) { out.push_back(hi); continue; }
        const double t = static_cast<double>(k) / static_cast<double>(count - 1);
        out.push_back(static_cast<int>(std::llround(lo + t * (hi - lo))));
    }
    return out;
}

std::vector<json> linear_reals(double lo, double hi, int count) {
    std::vector<json> out;
    for (int k = 0; k < count; ++k) {
        if (k == 0) { out.push_back(lo); continue; }
        if (k == count - 1) { out.push_back(hi); continue; }
        const double t = static_cast<double>(k) / static_cast<double>(count - 1);
        out.push_back(lo + t * (hi - lo));
    }
    return out;
}

std::vector<json> log_reals(double lo, double hi, int count) {
    std::vector<json> out;
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int k = 0; k < count; ++k) {
        if (k == 0) { out.push_back(lo); continue; }
        if (k == count - 1) { out.push_back(hi); continue; }
        const double t = static_cast<double>(k) / static_cast<double>(count - 1);
        out.push_back(std::exp(llo + t * (lhi - llo)));
    }
    return out;
}

std::vector<json> geometric_ints(int lo, int hi, int count) {
    std::vector<json> out;
    const double llo = std::log(static_cast<double>(lo)), lhi = std::log(static_cast<double>(hi));
    for (int k = 0; k < count; ++k) {
        if (k == 0) { out.push_back(lo); continue; }
        if (k == count - 1) { out.push_back(hi); continue; }
        const double t = static_cast<double>(k) / static_cast<double>(count - 1);
        out.push_back(static_cast<int>(std::llround(std::exp(llo + t * (lhi - llo)))));
    }
    return out;
}

std::vector<json> strings(std::initializer_list<const char*> values) {
    std::vector<json> out;
    for (const char* v : values) out.push_back(v);
    return out;
}

Trial run_trial(const SearchSpace& space, const json& hyperparams, const Dataset& data,
                int folds, std::uint64_t fit_seed, std::uint64_t fold_seed) {
    Trial trial;
    trial.hyperparams = hyperparams;
    try {
        const ClassifierSpec spec{space.kind, hyperparams, fit_seed};
        CvSummary cv = kfold_cv(spec, data, folds, fold_seed);
        trial.fold_accuracies = std::move(cv.fold_accuracies);
        trial.score = cv.mean;
    } catch (const Error& e) {
        trial.failed = true;
        trial.error = e.what();
        trial.score = kNegInf;
        trial.fold_accuracies.clear();
    }
    return trial;
}

}  // namespace

bool SearchSpace::singleton() const {
    for (const auto& axis : axes)
        if (axis.values.size() > 1) return false;
    return true;
}

std::size_t SearchSpace::combinations() const {
    std::size_t n = 1;
    for (const auto& axis : axes) n *= std::max<std::size_t>(axis.values.size(), 1);
    return n;
}

SearchSpace table1_space(ModelKind kind, NnLayersMode layers_mode) {
    SearchSpace space;
    space.kind = kind;
    const std::vector<json> layer_values = layers_mode == NnLayersMode::Range
                                               ? geometric_ints(16, 1056, 10)
                                               : std::vector<json>{16, 1056};
    switch (kind) {
        case ModelKind::FidelityFit:
        case ModelKind::NaiveBayes:
        case ModelKind::GaussianProcess:
            break;  // no tunable axis
        case ModelKind::LinearSvm:
            space.axes.push_back({"C", linear_reals(0.01, 2.0, 10)});
            break;
        case ModelKind::RbfSvm:
            space.axes.push_back({"C", linear_reals(0.01, 2.0, 10)});
            space.axes.push_back({"degree", {2, 3, 4}});
            break;
        case ModelKind::AdaBoost:
            space.axes.push_back({"n_estimators", linear_ints(10, 200, 10)});
            space.axes.push_back({"learning_rate", linear_reals(0.1, 1.0, 10)});
            space.axes.push_back({"algorithm", strings({"SAMME", "SAMME.R"})});
            break;
        case ModelKind::RandomForest:
            space.axes.push_back({"n_estimators", linear_ints(10, 200, 5)});
            space.axes.push_back({"criterion", strings({"gini", "entropy", "log_loss"})});
            space.axes.push_back({"max_features", strings({"sqrt", "log2", "all"})});
            break;
        case ModelKind::NeuralNet:
            space.axes.push_back({"layer1", layer_values});
            space.axes.push_back({"layer2", layer_values});
            space.axes.push_back({"activation", strings({"relu", "sigmoid", "tanh", "rbf"})});
            space.axes.push_back({"learning_rate", log_reals(1e-4, 1e-2, 10)});
            space.axes.push_back({"optimizer", strings({"Adam", "Adagrad", "SGD", "RMSprop"})});
            break;
    }
    return space;
}

std::vector<nlohmann::json> enumerate_grid(const SearchSpace& space, std::size_t cap) {
    const std::size_t total = space.combinations();
    if (total > cap)
        throw GridTooLargeError("grid has " + std::to_string(total) +
                                " combinations, cap is " + std::to_string(cap));
    std::vector<json> grid;
    grid.reserve(total);
    std::vector<std::size_t> cursor(space.axes.size(), 0);
    for (std::size_t n = 0; n < total; ++n) {
        json combo = json::object();
        for (std::size_t a = 0; a < space.axes.size(); ++a)
            combo[space.axes[a].name] = space.axes[a].values[cursor[a]];
        grid.push_back(std::move(combo));
        // odometer increment, last axis fastest
        for (std::size_t a = space.axes.size(); a-- > 0;) {
            if (++cursor[a] < space.axes[a].values.size()) break;
            cursor[a] = 0;
        }
    }
    return grid;
}

GridSearchResult grid_search(const SearchSpace& space, const Dataset& data, int folds,
                             std::uint64_t seed, std::size_t cap) {
    GridSearchResult result;
    const auto grid = enumerate_grid(space, cap);
    if (space.singleton()) {
        result.best = grid.empty() ? json::object() : grid.front();
        result.best_score = std::numeric_limits<double>::quiet_NaN();
        result.cv_skipped = true;
        return result;
    }

    const std::uint64_t fit_seed = derive_seed(seed, "tuner-fit");
    const std::uint64_t fold_seed = derive_seed(seed, "tuner-folds");
    result.best_score = kNegInf;
    std::size_t best_index = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        Trial trial = run_trial(space, grid[g], data, folds, fit_seed, fold_seed);
        if (!trial.failed && trial.score > result.best_score) {
            result.best_score = trial.score;
            best_index = g;
        }
        result.trials.push_back(std::move(trial));
    }
    if (!std::isfinite(result.best_score))
        throw NonConvergenceError("grid search", "every trial failed");
    result.best = grid[best_index];
    return result;
}

HalvingResult successive_halving(const SearchSpace& space, const std::string& resource_axis,
                                 int max_resource, const Dataset& data, int n_initial, int eta,
                                 int folds, std::uint64_t seed) {
    if (eta < 2) throw ConfigError("successive halving needs eta >= 2");
    // n_initial == 1 is the identity case: the one sample trains at max_resource.
    if (n_initial != 1 && n_initial < eta)
        throw ConfigError("successive halving needs n_initial >= eta");
    if (max_resource < 1) throw ConfigError("successive halving needs max_resource >= 1");

    // Sample n_initial configurations, preferring distinct ones.
    Rng rng(derive_seed(seed, "halving-sample"));
    std::vector<json> configs;
    int attempts = 0;
    while (configs.size() < static_cast<std::size_t>(n_initial)) {
        json combo = json::object();
        for (const auto& axis : space.axes)
            combo[axis.name] = axis.values[rng.below(axis.values.size())];
        const bool seen = std::find(configs.begin(), configs.end(), combo) != configs.end();
        if (!seen || ++attempts > 100 * n_initial) configs.push_back(std::move(combo));
    }

    HalvingResult result;
    result.trials.resize(configs.size());
    for (std::size_t c = 0; c < configs.size(); ++c)
        result.trials[c].hyperparams = configs[c];

    const std::uint64_t fit_seed = derive_seed(seed, "halving-fit");
    // One fold partition shared by every entrant and round: scores stay
    // comparable across the bracket.
    const std::uint64_t fold_seed = derive_seed(seed, "halving-folds");
    // At least one round, so even a single sample gets trained at max_resource.
    const int rounds = std::max(
        1, static_cast<int>(std::ceil(std::log(static_cast<double>(n_initial)) /
                                      std::log(static_cast<double>(eta)))));

    std::vector<std::size_t> alive(configs.size());
    std::iota(alive.begin(), alive.end(), std::size_t{0});
    for (int round = 0; round < rounds && !alive.empty(); ++round) {
        HalvingRound log;
        log.budget = std::max(
            1, static_cast<int>(std::llround(max_resource /
                                             std::pow(static_cast<double>(eta),
                                                      static_cast<double>(rounds - 1 - round)))));
        log.entrants = alive;
        for (const std::size_t c : alive) {
            Trial& trial = result.trials[c];
            json hp = trial.hyperparams;
            hp[resource_axis] = log.budget;
            try {
                const CvSummary cv =
                    kfold_cv(ClassifierSpec{space.kind, hp, fit_seed}, data, folds, fold_seed);
                trial.score = cv.mean;
                trial.fold_accuracies = cv.fold_accuracies;
                trial.failed = false;
                trial.error.clear();
            } catch (const Error& e) {
                trial.score = kNegInf;
                trial.failed = true;
                trial.error = e.what();
                trial.fold_accuracies.clear();
            }
        }
        // keep the top ceil(|alive| / eta), score desc, earlier sample on ties
        std::vector<std::size_t> ranked = alive;
        std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
            return result.trials[a].score > result.trials[b].score;
        });
        const std::size_t keep =
            std::max<std::size_t>(1, (alive.size() + static_cast<std::size_t>(eta) - 1) /
                                         static_cast<std::size_t>(eta));
        ranked.resize(std::min(keep, ranked.size()));
        log.kept = ranked;
        alive = std::move(ranked);
        result.bracket.push_back(std::move(log));
    }

    if (alive.empty() || result.trials[alive.front()].failed)
        throw NonConvergenceError("successive halving", "every configuration failed");
    const Trial& winner = result.trials[alive.front()];
    result.best = winner.hyperparams;
    result.best[resource_axis] = max_resource;
    result.best_score = winner.score;
    return result;
}

}  // namespace iqbench
