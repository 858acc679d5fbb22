#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iqbench/classifiers/model.hpp"
#include "iqbench/iqcore.hpp"

namespace iqbench {

// One discrete hyperparameter axis. Continuous published ranges are
// discretized when the space is built (see table1_space).
struct ParamAxis {
    std::string name;
    std::vector<nlohmann::json> values;
};

struct SearchSpace {
    ModelKind kind = ModelKind::FidelityFit;
    std::vector<ParamAxis> axes;

    bool singleton() const;         // no axis offers a real choice
    std::size_t combinations() const;
};

// How to read the published neural-net layer sizes "16, 1056": as the
// endpoints of a range (default) or as exactly those two discrete choices.
enum class NnLayersMode { Range, Endpoints };

// The published configuration space for each model. Models tuned over a
// continuous range get ten grid points per axis (log-spaced for the neural
// net learning rate and layer widths, linear otherwise). Fidelity fit, naive
// Bayes, and the Gaussian process expose no tunable axis and come back as
// singletons.
SearchSpace table1_space(ModelKind kind, NnLayersMode layers_mode = NnLayersMode::Range);

// Cartesian product in declared axis order (the last axis varies fastest).
// Throws GridTooLargeError when the product exceeds `cap`.
std::vector<nlohmann::json> enumerate_grid(const SearchSpace& space, std::size_t cap = 10000);

struct Trial {
    nlohmann::json hyperparams;
    std::vector<double> fold_accuracies;  // empty for failed trials
    double score = 0.0;                   // mean CV accuracy; -inf when failed
    bool failed = false;
    std::string error;
};

struct GridSearchResult {
    nlohmann::json best;
    double best_score = 0.0;
    bool cv_skipped = false;  // true for singleton spaces: no folds were run
    std::vector<Trial> trials;
};

// Exhaustive search scored by k-fold CV mean accuracy. Ties go to the
// earlier grid position. Trials whose fit throws are recorded as failed and
// skipped. A singleton space returns its one configuration immediately
// without running any folds.
GridSearchResult grid_search(const SearchSpace& space, const Dataset& data, int folds,
                             std::uint64_t seed, std::size_t cap = 10000);

struct HalvingRound {
    int budget = 0;                     // resource (epochs) granted this round
    std::vector<std::size_t> entrants;  // trial indices evaluated
    std::vector<std::size_t> kept;      // survivors, best first
};

struct HalvingResult {
    nlohmann::json best;
    double best_score = 0.0;
    std::vector<Trial> trials;          // one per sampled config, scores from its last round
    std::vector<HalvingRound> bracket;  // budget schedule and survivor log
};

// Successive halving: n_initial configs sampled uniformly from the space,
// scored by k-fold CV mean accuracy (the same metric grid_search uses, same
// folds for every entrant) at geometrically growing values of
// `resource_axis` (budget multiplies by eta each round; the final round
// runs at max_resource). The top ceil(1/eta) fraction survives each round;
// failed trials score -inf. Ties go to the earlier sample.
HalvingResult successive_halving(const SearchSpace& space, const std::string& resource_axis,
                                 int max_resource, const Dataset& data, int n_initial, int eta,
                                 int folds, std::uint64_t seed);

}  // namespace iqbench
