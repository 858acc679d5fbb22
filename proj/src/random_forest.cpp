#include "iqbench/classifiers/random_forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "iqbench/errors.hpp"
#include "iqbench/rng.hpp"

namespace iqbench {

double node_impurity(double ground_weight, double excited_weight, SplitCriterion criterion) {
    const double total = ground_weight + excited_weight;
    if (total <= 0.0) return 0.0;
    const double pg = ground_weight / total;
    const double pe = excited_weight / total;
    if (criterion == SplitCriterion::Gini) return 1.0 - pg * pg - pe * pe;
    double h = 0.0;
    if (pg > 0.0) h -= pg * std::log2(pg);
    if (pe > 0.0) h -= pe * std::log2(pe);
    return h;
}

namespace {

struct NodeSplit {
    bool found = false;
    int feature = 0;
    double threshold = 0.0;
    double score = std::numeric_limits<double>::infinity();  // weighted child impurity
};

class TreeBuilder {
public:
    TreeBuilder(const std::vector<LabeledShot>& shots, SplitCriterion criterion,
                MaxFeatures max_features, Rng& rng)
        : shots_(shots), criterion_(criterion), max_features_(max_features), rng_(rng) {}

    DecisionTree build(std::vector<std::size_t> indices) {
        tree_.nodes.clear();
        grow(std::move(indices));
        return std::move(tree_);
    }

private:
    // Tries the given feature; returns the best midpoint split or not-found
    // when every value in this node is identical along that feature.
    void scan_feature(const std::vector<std::size_t>& idx, int feature, NodeSplit& best) const {
        std::vector<std::size_t> order = idx;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return value(a, feature) < value(b, feature);
        });
        double total_g = 0.0, total_e = 0.0;
        for (std::size_t k : order) {
            if (shots_[k].label == StateLabel::Excited)
                total_e += 1.0;
            else
                total_g += 1.0;
        }
        const double total = total_g + total_e;
        double lg = 0.0, le = 0.0;
        for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
            if (shots_[order[pos]].label == StateLabel::Excited)
                le += 1.0;
            else
                lg += 1.0;
            const double a = value(order[pos], feature);
            const double b = value(order[pos + 1], feature);
            if (a == b) continue;
            double t = 0.5 * (a + b);
            if (!(t < b)) t = a;  // keep x <= t splitting exactly here
            const double left_n = lg + le;
            const double score =
                left_n * node_impurity(lg, le, criterion_) +
                (total - left_n) * node_impurity(total_g - lg, total_e - le, criterion_);
            const bool better =
                score < best.score ||
                (score == best.score &&
                 (feature < best.feature || (feature == best.feature && t < best.threshold)));
            if (!best.found || better) {
                best.found = true;
                best.score = score;
                best.feature = feature;
                best.threshold = t;
            }
        }
    }

    int grow(std::vector<std::size_t> idx) {
        std::size_t excited = 0;
        for (std::size_t k : idx)
            if (shots_[k].label == StateLabel::Excited) ++excited;

        const int self = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();

        if (excited == 0 || excited == idx.size()) {
            tree_.nodes[static_cast<std::size_t>(self)].label =
                excited == 0 ? StateLabel::Ground : StateLabel::Excited;
            return self;
        }

        NodeSplit best;
        if (max_features_ == MaxFeatures::All) {
            scan_feature(idx, 0, best);
            scan_feature(idx, 1, best);
        } else {
            // floor(sqrt(2)) == floor(log2(2)) == 1: one random feature per
            // node, with the other as fallback if it cannot split.
            const int first = static_cast<int>(rng_.below(2));
            scan_feature(idx, first, best);
            if (!best.found) scan_feature(idx, 1 - first, best);
        }

        if (!best.found) {
            // Both classes present but all points coincide; majority leaf.
            tree_.nodes[static_cast<std::size_t>(self)].label =
                2 * excited > idx.size() ? StateLabel::Excited : StateLabel::Ground;
            return self;
        }

        std::vector<std::size_t> left, right;
        left.reserve(idx.size());
        right.reserve(idx.size());
        for (std::size_t k : idx) {
            if (value(k, best.feature) <= best.threshold)
                left.push_back(k);
            else
                right.push_back(k);
        }
        idx.clear();
        idx.shrink_to_fit();

        tree_.nodes[static_cast<std::size_t>(self)].feature = best.feature;
        tree_.nodes[static_cast<std::size_t>(self)].threshold = best.threshold;
        const int l = grow(std::move(left));
        tree_.nodes[static_cast<std::size_t>(self)].left = l;
        const int r = grow(std::move(right));
        tree_.nodes[static_cast<std::size_t>(self)].right = r;
        return self;
    }

    double value(std::size_t k, int feature) const {
        return feature == 0 ? shots_[k].point.i : shots_[k].point.q;
    }

    const std::vector<LabeledShot>& shots_;
    SplitCriterion criterion_;
    MaxFeatures max_features_;
    Rng& rng_;
    DecisionTree tree_;
};

}  // namespace

double RandomForestModel::proba(IQPoint p) const {
    std::size_t votes = 0;
    for (const auto& tree : trees)
        if (tree.classify(p) == StateLabel::Excited) ++votes;
    return static_cast<double>(votes) / static_cast<double>(trees.size());
}

RandomForestModel fit_random_forest(const Dataset& train, int n_estimators,
                                    SplitCriterion criterion, MaxFeatures max_features,
                                    std::uint64_t seed, bool bootstrap) {
    if (n_estimators < 1)
        throw InvalidHyperparamError("n_estimators",
                                     "must be >= 1, got " + std::to_string(n_estimators));
    train.require_both_classes();
    const auto& shots = train.shots();
    const std::size_t n = shots.size();

    RandomForestModel model;
    model.criterion = criterion;
    model.max_features = max_features;
    model.seed = seed;
    model.bootstrap = bootstrap;
    model.trees.reserve(static_cast<std::size_t>(n_estimators));

    for (int t = 0; t < n_estimators; ++t) {
        Rng rng(derive_seed(seed, "rf-tree-" + std::to_string(t)));
        std::vector<std::size_t> idx(n);
        if (bootstrap) {
            for (std::size_t k = 0; k < n; ++k) idx[k] = static_cast<std::size_t>(rng.below(n));
        } else {
            for (std::size_t k = 0; k < n; ++k) idx[k] = k;
        }
        TreeBuilder builder(shots, criterion, max_features, rng);
        model.trees.push_back(builder.build(std::move(idx)));
    }
    return model;
}

}  // namespace iqbench
