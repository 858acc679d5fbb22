#pragma once

#include <cstddef>
#include <vector>

#include "iqbench/iqcore.hpp"

namespace iqbench {

// Depth-1 decision stump: x[feature] <= threshold goes left, else right.
// Side values are the stump's real-valued vote: +-1 for SAMME (the majority
// class in signed form), half log-odds of Excited for SAMME.R.
struct Stump {
    int feature = 0;  // 0 = i, 1 = q
    double threshold = 0.0;
    double left_value = 0.0;
    double right_value = 0.0;

    double value(IQPoint p) const {
        const double x = feature == 0 ? p.i : p.q;
        return x <= threshold ? left_value : right_value;
    }
};

enum class AdaBoostVariant { Samme, SammeR };

struct BoostRound {
    Stump stump;
    double alpha = 0.0;  // vote weight: lr*ln((1-eps)/eps) for SAMME, lr for SAMME.R
    double eps = 0.0;    // weighted misclassification of the stump's argmax rule
    double z = 1.0;      // exact weight normalizer of the round
};

struct AdaBoostModel {
    AdaBoostVariant variant = AdaBoostVariant::Samme;
    double learning_rate = 1.0;
    std::vector<BoostRound> rounds;
    double training_error = 0.0;  // 0/1 error of the ensemble on its own training set

    // F(x) = sum_t alpha_t * stump_t(x); empty ensemble gives 0 (-> Ground).
    double decision(IQPoint p) const;
    StateLabel classify(IQPoint p) const {
        return decision(p) > 0.0 ? StateLabel::Excited : StateLabel::Ground;
    }
    double proba(IQPoint p) const;  // sigmoid of the ensemble decision

    // Freund-Schapire product bound prod_t 2*sqrt(eps_t*(1-eps_t)). An upper
    // bound on training_error for SAMME at learning_rate == 1.
    double fs_bound() const;
    // Exact normalizer product prod_t Z_t, Z_t = (1-eps)e^(-alpha/2) +
    // eps*e^(alpha/2); bounds training_error for SAMME at any learning rate.
    double z_bound() const;
};

// Boosted stumps per SAMME / SAMME.R. Stops early on a perfect round
// (eps = 0: the round is kept — it can only happen on the first round, where
// the stump alone is a perfect classifier) or a non-informative one
// (eps >= 0.5: the round is dropped). learning_rate must lie in (0, 1].
AdaBoostModel fit_adaboost(const Dataset& train, int n_estimators, double learning_rate,
                           AdaBoostVariant variant);

}  // namespace iqbench
