#include "iqbench/classifiers/adaboost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "iqbench/errors.hpp"

namespace iqbench {

namespace {

double stable_sigmoid(double x) {
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

struct SplitScan {
    bool found = false;
    int feature = 0;
    double threshold = 0.0;
    double impurity = std::numeric_limits<double>::infinity();
    // weights of (ground, excited) on each side of the best split
    double left_g = 0.0, left_e = 0.0, right_g = 0.0, right_e = 0.0;
};

double gini_term(double wg, double we) {
    const double total = wg + we;
    if (total <= 0.0) return 0.0;
    return total * (1.0 - (wg / total) * (wg / total) - (we / total) * (we / total));
}

// Weighted gini sweep over midpoints of consecutive distinct values; the order
// arrays are sorted once per fit since only the weights change between rounds.
SplitScan best_split(const std::vector<LabeledShot>& shots, const std::vector<double>& weights,
                     const std::vector<std::size_t>& order_i,
                     const std::vector<std::size_t>& order_q) {
    SplitScan best;
    double total_g = 0.0;
    double total_e = 0.0;
    for (std::size_t k = 0; k < shots.size(); ++k) {
        if (shots[k].label == StateLabel::Excited)
            total_e += weights[k];
        else
            total_g += weights[k];
    }

    for (int feature = 0; feature < 2; ++feature) {
        const auto& order = feature == 0 ? order_i : order_q;
        double lg = 0.0;
        double le = 0.0;
        for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
            const std::size_t k = order[pos];
            if (shots[k].label == StateLabel::Excited)
                le += weights[k];
            else
                lg += weights[k];
            const double a = feature == 0 ? shots[k].point.i : shots[k].point.q;
            const std::size_t nk = order[pos + 1];
            const double b = feature == 0 ? shots[nk].point.i : shots[nk].point.q;
            if (a == b) continue;
            // Keep the rule x <= t consistent with this partition even when
            // the midpoint rounds up to b.
            double t = 0.5 * (a + b);
            if (!(t < b)) t = a;
            const double imp = gini_term(lg, le) + gini_term(total_g - lg, total_e - le);
            if (imp < best.impurity) {
                best.found = true;
                best.impurity = imp;
                best.feature = feature;
                best.threshold = t;
                best.left_g = lg;
                best.left_e = le;
                best.right_g = total_g - lg;
                best.right_e = total_e - le;
            }
        }
    }
    return best;
}

}  // namespace

double AdaBoostModel::decision(IQPoint p) const {
    double f = 0.0;
    for (const auto& r : rounds) f += r.alpha * r.stump.value(p);
    return f;
}

double AdaBoostModel::proba(IQPoint p) const { return stable_sigmoid(decision(p)); }

double AdaBoostModel::fs_bound() const {
    double bound = 1.0;
    for (const auto& r : rounds) bound *= 2.0 * std::sqrt(r.eps * (1.0 - r.eps));
    return bound;
}

double AdaBoostModel::z_bound() const {
    double bound = 1.0;
    for (const auto& r : rounds) bound *= r.z;
    return bound;
}

AdaBoostModel fit_adaboost(const Dataset& train, int n_estimators, double learning_rate,
                           AdaBoostVariant variant) {
    if (n_estimators < 1)
        throw InvalidHyperparamError("n_estimators",
                                     "must be >= 1, got " + std::to_string(n_estimators));
    if (!(learning_rate > 0.0) || !(learning_rate <= 1.0))
        throw InvalidHyperparamError("learning_rate", "must lie in (0, 1], got " +
                                                          std::to_string(learning_rate));
    train.require_both_classes();
    const auto& shots = train.shots();
    const std::size_t n = shots.size();

    std::vector<std::size_t> order_i(n);
    std::iota(order_i.begin(), order_i.end(), std::size_t{0});
    std::vector<std::size_t> order_q = order_i;
    std::sort(order_i.begin(), order_i.end(),
              [&](std::size_t a, std::size_t b) { return shots[a].point.i < shots[b].point.i; });
    std::sort(order_q.begin(), order_q.end(),
              [&](std::size_t a, std::size_t b) { return shots[a].point.q < shots[b].point.q; });

    AdaBoostModel model;
    model.variant = variant;
    model.learning_rate = learning_rate;

    std::vector<double> weights(n, 1.0 / static_cast<double>(n));
    constexpr double kProbClip = 1e-12;

    for (int t = 0; t < n_estimators; ++t) {
        const SplitScan split = best_split(shots, weights, order_i, order_q);

        BoostRound round;
        double eps = 0.0;
        if (!split.found) {
            // No usable split (all feature values equal): constant stump
            // voting for the weighted majority class.
            double wg = 0.0, we = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                if (shots[k].label == StateLabel::Excited)
                    we += weights[k];
                else
                    wg += weights[k];
            }
            round.stump.feature = 0;
            round.stump.threshold = std::numeric_limits<double>::infinity();
            const double vote = we > wg ? 1.0 : -1.0;
            round.stump.left_value = vote;
            round.stump.right_value = vote;
            eps = std::min(wg, we);
        } else {
            round.stump.feature = split.feature;
            round.stump.threshold = split.threshold;
            if (variant == AdaBoostVariant::Samme) {
                round.stump.left_value = split.left_e > split.left_g ? 1.0 : -1.0;
                round.stump.right_value = split.right_e > split.right_g ? 1.0 : -1.0;
                eps = (round.stump.left_value > 0.0 ? split.left_g : split.left_e) +
                      (round.stump.right_value > 0.0 ? split.right_g : split.right_e);
            } else {
                const auto half_log_odds = [&](double wg, double we) {
                    const double total = wg + we;
                    double pe = total > 0.0 ? we / total : 0.5;
                    pe = std::clamp(pe, kProbClip, 1.0 - kProbClip);
                    return 0.5 * (std::log(pe) - std::log1p(-pe));
                };
                round.stump.left_value = half_log_odds(split.left_g, split.left_e);
                round.stump.right_value = half_log_odds(split.right_g, split.right_e);
                eps = (round.stump.left_value > 0.0 ? split.left_g : split.left_e) +
                      (round.stump.right_value > 0.0 ? split.right_g : split.right_e);
            }
        }
        round.eps = eps;

        if (eps >= 0.5) break;  // non-informative round: drop it and stop

        if (variant == AdaBoostVariant::Samme) {
            // eps == 0 means this very stump is perfect; it can only happen on
            // round 0, because weights stay strictly positive and a perfect
            // split (gini 0) would have won the first sweep already.
            round.alpha = eps == 0.0 ? 1.0 : learning_rate * std::log((1.0 - eps) / eps);
        } else {
            round.alpha = learning_rate;
        }
        const double half = 0.5 * round.alpha;
        round.z = (1.0 - eps) * std::exp(-half) + eps * std::exp(half);
        model.rounds.push_back(round);
        if (eps == 0.0) break;

        // Reweight and renormalize with the exponential update. For SAMME,
        // w *= exp(-(alpha/2) * y * vote) equals the classic
        // w *= exp(alpha * [misclassified]) rule up to normalization.
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double y = shots[k].label == StateLabel::Excited ? 1.0 : -1.0;
            double h;
            if (variant == AdaBoostVariant::Samme)
                h = half * round.stump.value(shots[k].point);
            else
                h = learning_rate * round.stump.value(shots[k].point);
            weights[k] *= std::exp(-y * h);
            sum += weights[k];
        }
        for (std::size_t k = 0; k < n; ++k) weights[k] /= sum;
    }

    std::size_t wrong = 0;
    for (const auto& s : shots)
        if (model.classify(s.point) != s.label) ++wrong;
    model.training_error = static_cast<double>(wrong) / static_cast<double>(n);
    return model;
}

}  // namespace iqbench
