#pragma once

#include <cstdint>
#include <vector>

#include "iqbench/iqcore.hpp"

namespace iqbench {

enum class SplitCriterion { Gini, Entropy };  // log_loss is accepted as an alias of entropy
enum class MaxFeatures { Sqrt, Log2, All };   // with 2 features: sqrt -> 1, log2 -> 1, all -> 2

// Node impurity from (ground, excited) class weights: gini 1 - pg^2 - pe^2,
// entropy in bits.
double node_impurity(double ground_weight, double excited_weight, SplitCriterion criterion);

// Flat binary tree; feature == -1 marks a leaf.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    StateLabel label = StateLabel::Ground;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    StateLabel classify(IQPoint p) const {
        int at = 0;
        while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
            const TreeNode& node = nodes[static_cast<std::size_t>(at)];
            const double x = node.feature == 0 ? p.i : p.q;
            at = x <= node.threshold ? node.left : node.right;
        }
        return nodes[static_cast<std::size_t>(at)].label;
    }
};

struct RandomForestModel {
    std::vector<DecisionTree> trees;
    SplitCriterion criterion = SplitCriterion::Gini;
    MaxFeatures max_features = MaxFeatures::Sqrt;
    std::uint64_t seed = 0;
    bool bootstrap = true;

    double proba(IQPoint p) const;  // fraction of trees voting Excited
    StateLabel classify(IQPoint p) const {
        return proba(p) > 0.5 ? StateLabel::Excited : StateLabel::Ground;
    }
};

// Bagged fully-grown trees. Each tree draws a size-N bootstrap sample from its
// own seed (derived from the forest seed), picks a fresh feature subset per
// node, and splits on midpoints of consecutive distinct values until pure;
// a subset that admits no split falls back to the remaining features.
// bootstrap=false is a test hook that trains every tree on the full sample.
RandomForestModel fit_random_forest(const Dataset& train, int n_estimators,
                                    SplitCriterion criterion, MaxFeatures max_features,
                                    std::uint64_t seed, bool bootstrap = true);

}  // namespace iqbench
