#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "iqbench/classifiers/model.hpp"
#include "iqbench/iqcore.hpp"

namespace iqbench {

// Positive class = Excited throughout.
struct ConfusionCounts {
    std::size_t tp = 0;  // excited predicted excited
    std::size_t fn = 0;  // excited predicted ground
    std::size_t fp = 0;  // ground predicted excited
    std::size_t tn = 0;  // ground predicted ground

    std::size_t total() const { return tp + fn + fp + tn; }
    double accuracy() const { return static_cast<double>(tp + tn) / static_cast<double>(total()); }
    double tpr() const { return static_cast<double>(tp) / static_cast<double>(tp + fn); }
    double fpr() const { return static_cast<double>(fp) / static_cast<double>(fp + tn); }
};

ConfusionCounts confusion(const std::vector<StateLabel>& truth,
                          const std::vector<StateLabel>& predicted);

// Batch-predicts the test set and tallies the confusion matrix.
// Throws EmptyTestSetError when the test set has no shots.
ConfusionCounts evaluate(const TrainedModel& model, const Dataset& test);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0;  // score at/above which the point is called excited
};

// One point per distinct score (ties grouped), preceded by (0,0) at threshold
// +inf; the final point is always (1,1). Scores are "higher means more
// excited". Throws SingleClassError unless both classes appear in labels.
std::vector<RocPoint> roc_curve(const std::vector<double>& scores,
                                const std::vector<StateLabel>& labels);

// Trapezoid area under the curve. Equals the tie-corrected Mann-Whitney
// statistic P(score_E > score_G) + P(==)/2 up to rounding.
double auc(const std::vector<RocPoint>& curve);

// TPR at the given FPR by linear interpolation along the curve.
double roc_interpolate_tpr(const std::vector<RocPoint>& curve, double fpr);

// Deterministic k-fold partition: indices are shuffled once with the given
// seed and dealt round-robin. Every index lands in exactly one fold.
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, int k, std::uint64_t seed);

// Accuracy of the spec refit on each training complement and scored on the
// held-out fold. The training complement of every fold must contain both
// classes (FoldMissingClassError); a single-class validation fold is fine.
struct CvSummary {
    std::vector<double> fold_accuracies;
    double mean = 0.0;
    double stddev = 0.0;  // population standard deviation across folds
};
CvSummary kfold_cv(const ClassifierSpec& spec, const Dataset& data, int k, std::uint64_t seed);

// --- wall-clock timing -------------------------------------------------

// Timing core: one untimed warm-up call, then `repetitions` timed calls;
// the reported value is the median. `clock` returns nanoseconds and exists
// so tests can substitute a coarse fake; the default reads
// std::chrono::steady_clock. If a timed region spans fewer than min_ticks
// clock ticks the predict path doubles its batch (recorded in the result)
// before retrying; once the multiplier limit is hit it throws
// ClockResolutionTooCoarseError.
struct TimerOptions {
    int repetitions = 11;           // >= 3
    int min_ticks = 100;            // required region length, in clock ticks
    int max_multiplier = 1 << 16;   // largest allowed batch enlargement
    std::function<std::uint64_t()> clock = {};  // ns; empty = steady_clock
};

struct FitTiming {
    double seconds = 0.0;  // median
    int repetitions = 0;
    std::vector<double> samples;  // seconds, in run order
};

struct PredictTiming {
    double micros_per_shot = 0.0;  // median over repetitions
    int repetitions = 0;
    int batch_multiplier = 1;  // how many copies of the test set per timed call
    std::vector<double> samples;  // micros per shot, in run order
};

FitTiming time_fit(const std::function<void()>& body, const TimerOptions& options = {});
FitTiming time_fit(const ClassifierSpec& spec, const Dataset& train,
                   const TimerOptions& options = {});

PredictTiming time_predict(const std::function<void(const std::vector<IQPoint>&)>& body,
                           const std::vector<IQPoint>& points, const TimerOptions& options = {});
PredictTiming time_predict(const TrainedModel& model, const std::vector<IQPoint>& points,
                           const TimerOptions& options = {});

// --- decision boundary rasters ---------------------------------------

struct BBox {
    double i_min = 0.0, i_max = 1.0;
    double q_min = 0.0, q_max = 1.0;
};

// Axis-aligned data extent padded by `margin` times the extent per axis
// (a degenerate zero-extent axis is padded by 1.0 so the box stays a box).
BBox data_bbox(const Dataset& data, double margin = 0.10);

// Row-major raster: index = row * resolution + col, rows sweep q from q_min
// to q_max, cols sweep i. proba stays empty for models without probabilities.
struct BoundaryGrid {
    BBox bbox;
    int resolution = 0;
    std::vector<double> xs;  // resolution i-values
    std::vector<double> ys;  // resolution q-values
    std::vector<StateLabel> labels;
    std::vector<double> proba;
};

BoundaryGrid boundary_grid(const TrainedModel& model, const BBox& bbox, int resolution);

}  // namespace iqbench
