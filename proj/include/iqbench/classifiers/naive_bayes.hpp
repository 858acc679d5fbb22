#pragma once

#include <array>

#include "iqbench/iqcore.hpp"

namespace iqbench {

// Per-class feature-wise Gaussian parameters with empirical priors. Feature
// independence is assumed within each class; variances are MLE (divide by N)
// with a floor of var_floor_rel times the pooled feature variance so
// duplicate-point classes stay usable.
struct GaussianNbModel {
    std::array<double, 2> prior{};                  // [ground, excited]
    std::array<std::array<double, 2>, 2> mean{};    // [class][feature]
    std::array<std::array<double, 2>, 2> var{};     // [class][feature]

    double log_joint(IQPoint p, int cls) const;
    // Posterior probability of the excited class.
    double posterior_excited(IQPoint p) const;
};

GaussianNbModel fit_naive_bayes(const Dataset& train, double var_floor_rel = 1e-9);

}  // namespace iqbench
