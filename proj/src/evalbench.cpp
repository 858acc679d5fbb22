#include "iqbench/evalbench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "iqbench/errors.hpp"
#include "iqbench/rng.hpp"

namespace iqbench {

namespace {

std::uint64_t steady_ns() {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now().time_since_epoch())
            .count());
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Smallest positive increment the clock exposes, in ns.
std::uint64_t clock_resolution(const std::function<std::uint64_t()>& clock) {
    std::uint64_t best = 0;
    for (int probe = 0; probe < 8; ++probe) {
        const std::uint64_t start = clock();
        std::uint64_t next = start;
        for (int spin = 0; spin < 1000000 && next == start; ++spin) next = clock();
        if (next > start) {
            const std::uint64_t delta = next - start;
            if (best == 0 || delta < best) best = delta;
        }
    }
    return best == 0 ? 1 : best;
}

void check_repetitions(int repetitions) {
    if (repetitions < 3) throw ConfigError("timing repetitions must be at least 3");
}

}  // namespace

ConfusionCounts confusion(const std::vector<StateLabel>& truth,
                          const std::vector<StateLabel>& predicted) {
    if (truth.size() != predicted.size())
        throw ConfigError("confusion: truth and prediction lengths differ");
    ConfusionCounts c;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        const bool actual_excited = truth[k] == StateLabel::Excited;
        const bool called_excited = predicted[k] == StateLabel::Excited;
        if (actual_excited)
            ++(called_excited ? c.tp : c.fn);
        else
            ++(called_excited ? c.fp : c.tn);
    }
    return c;
}

ConfusionCounts evaluate(const TrainedModel& model, const Dataset& test) {
    if (test.size() == 0) throw EmptyTestSetError("cannot evaluate on an empty test set");
    std::vector<IQPoint> points;
    std::vector<StateLabel> truth;
    points.reserve(test.size());
    truth.reserve(test.size());
    for (const auto& shot : test.shots()) {
        points.push_back(shot.point);
        truth.push_back(shot.label);
    }
    return confusion(truth, model.predict(points));
}

std::vector<RocPoint> roc_curve(const std::vector<double>& scores,
                                const std::vector<StateLabel>& labels) {
    if (scores.size() != labels.size())
        throw ConfigError("roc_curve: scores and labels lengths differ");
    for (const double s : scores)
        if (!std::isfinite(s)) throw NonFiniteValueError("ROC scores must be finite");
    std::size_t positives = 0;
    for (const auto& l : labels) positives += l == StateLabel::Excited;
    const std::size_t negatives = labels.size() - positives;
    if (positives == 0 || negatives == 0)
        throw SingleClassError("ROC needs both classes in the label vector");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::vector<RocPoint> curve;
    curve.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    std::size_t tp = 0, fp = 0, k = 0;
    while (k < order.size()) {
        const double s = scores[order[k]];
        // fold in the whole tie group before emitting a point
        while (k < order.size() && scores[order[k]] == s) {
            ++(labels[order[k]] == StateLabel::Excited ? tp : fp);
            ++k;
        }
        curve.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                         static_cast<double>(tp) / static_cast<double>(positives), s});
    }
    return curve;
}

double auc(const std::vector<RocPoint>& curve) {
    double area = 0.0;
    for (std::size_t k = 1; k < curve.size(); ++k)
        area += (curve[k].fpr - curve[k - 1].fpr) * (curve[k].tpr + curve[k - 1].tpr) * 0.5;
    return area;
}

double roc_interpolate_tpr(const std::vector<RocPoint>& curve, double fpr) {
    if (curve.empty()) throw ConfigError("roc_interpolate_tpr: empty curve");
    if (fpr <= curve.front().fpr) return curve.front().tpr;
    for (std::size_t k = 1; k < curve.size(); ++k) {
        if (fpr <= curve[k].fpr) {
            const double span = curve[k].fpr - curve[k - 1].fpr;
            if (span == 0.0) return curve[k].tpr;  // vertical segment: take the upper end
            const double t = (fpr - curve[k - 1].fpr) / span;
            return curve[k - 1].tpr + t * (curve[k].tpr - curve[k - 1].tpr);
        }
    }
    return curve.back().tpr;
}

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, int k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("k-fold needs k >= 2");
    if (static_cast<std::size_t>(k) > n)
        throw ConfigError("k-fold needs at least one shot per fold");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed, "kfold"));
    rng.shuffle(order);
    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    for (std::size_t j = 0; j < n; ++j) folds[j % static_cast<std::size_t>(k)].push_back(order[j]);
    return folds;
}

CvSummary kfold_cv(const ClassifierSpec& spec, const Dataset& data, int k, std::uint64_t seed) {
    const auto folds = kfold_indices(data.size(), k, seed);
    const auto& shots = data.shots();

    std::vector<double> accuracies;
    accuracies.reserve(folds.size());
    std::vector<char> held(data.size());
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::fill(held.begin(), held.end(), 0);
        for (const std::size_t idx : folds[f]) held[idx] = 1;

        std::vector<LabeledShot> train_shots;
        train_shots.reserve(data.size() - folds[f].size());
        for (std::size_t j = 0; j < shots.size(); ++j)
            if (!held[j]) train_shots.push_back(shots[j]);

        std::size_t excited = 0;
        for (const auto& shot : train_shots) excited += shot.label == StateLabel::Excited;
        if (excited == 0 || excited == train_shots.size())
            throw FoldMissingClassError("training complement of fold " + std::to_string(f) +
                                        " lost a class");

        const TrainedModel model = fit(spec, Dataset(std::move(train_shots)));

        std::vector<IQPoint> points;
        std::vector<StateLabel> truth;
        points.reserve(folds[f].size());
        for (const std::size_t idx : folds[f]) {
            points.push_back(shots[idx].point);
            truth.push_back(shots[idx].label);
        }
        const auto predicted = model.predict(points);
        std::size_t hits = 0;
        for (std::size_t j = 0; j < truth.size(); ++j) hits += predicted[j] == truth[j];
        accuracies.push_back(static_cast<double>(hits) / static_cast<double>(truth.size()));
    }

    CvSummary summary;
    summary.mean = std::accumulate(accuracies.begin(), accuracies.end(), 0.0) /
                   static_cast<double>(accuracies.size());
    double ss = 0.0;
    for (const double a : accuracies) ss += (a - summary.mean) * (a - summary.mean);
    summary.stddev = std::sqrt(ss / static_cast<double>(accuracies.size()));
    summary.fold_accuracies = std::move(accuracies);
    return summary;
}

FitTiming time_fit(const std::function<void()>& body, const TimerOptions& options) {
    check_repetitions(options.repetitions);
    const auto clock = options.clock ? options.clock : steady_ns;
    body();  // warm-up, untimed
    FitTiming timing;
    timing.repetitions = options.repetitions;
    for (int rep = 0; rep < options.repetitions; ++rep) {
        const std::uint64_t t0 = clock();
        body();
        const std::uint64_t t1 = clock();
        timing.samples.push_back(static_cast<double>(t1 - t0) * 1e-9);
    }
    timing.seconds = median_of(timing.samples);
    return timing;
}

FitTiming time_fit(const ClassifierSpec& spec, const Dataset& train,
                   const TimerOptions& options) {
    return time_fit([&] { (void)fit(spec, train); }, options);
}

PredictTiming time_predict(const std::function<void(const std::vector<IQPoint>&)>& body,
                           const std::vector<IQPoint>& points, const TimerOptions& options) {
    check_repetitions(options.repetitions);
    if (points.empty()) throw EmptyTestSetError("cannot time predictions on an empty batch");
    const auto clock = options.clock ? options.clock : steady_ns;
    const std::uint64_t resolution = clock_resolution(clock);
    const std::uint64_t min_region = resolution * static_cast<std::uint64_t>(options.min_ticks);

    int multiplier = 1;
    for (;;) {
        std::vector<IQPoint> batch;
        batch.reserve(points.size() * static_cast<std::size_t>(multiplier));
        for (int copy = 0; copy < multiplier; ++copy)
            batch.insert(batch.end(), points.begin(), points.end());

        body(batch);  // warm-up, untimed
        PredictTiming timing;
        timing.repetitions = options.repetitions;
        timing.batch_multiplier = multiplier;
        bool too_short = false;
        for (int rep = 0; rep < options.repetitions; ++rep) {
            const std::uint64_t t0 = clock();
            body(batch);
            const std::uint64_t t1 = clock();
            if (t1 - t0 < min_region) {
                too_short = true;
                break;
            }
            timing.samples.push_back(static_cast<double>(t1 - t0) * 1e-3 /
                                     static_cast<double>(batch.size()));
        }
        if (!too_short) {
            timing.micros_per_shot = median_of(timing.samples);
            return timing;
        }
        if (multiplier >= options.max_multiplier)
            throw ClockResolutionTooCoarseError(
                "timed region stayed under " + std::to_string(options.min_ticks) +
                " clock ticks at batch multiplier " + std::to_string(multiplier));
        multiplier *= 2;
    }
}

PredictTiming time_predict(const TrainedModel& model, const std::vector<IQPoint>& points,
                           const TimerOptions& options) {
    return time_predict([&](const std::vector<IQPoint>& batch) { (void)model.predict(batch); },
                        points, options);
}

BBox data_bbox(const Dataset& data, double margin) {
    if (data.size() == 0) throw EmptyTestSetError("cannot bound an empty dataset");
    BBox box{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& shot : data.shots()) {
        box.i_min = std::min(box.i_min, shot.point.i);
        box.i_max = std::max(box.i_max, shot.point.i);
        box.q_min = std::min(box.q_min, shot.point.q);
        box.q_max = std::max(box.q_max, shot.point.q);
    }
    const double i_pad = box.i_max > box.i_min ? (box.i_max - box.i_min) * margin : 1.0;
    const double q_pad = box.q_max > box.q_min ? (box.q_max - box.q_min) * margin : 1.0;
    box.i_min -= i_pad;
    box.i_max += i_pad;
    box.q_min -= q_pad;
    box.q_max += q_pad;
    return box;
}

BoundaryGrid boundary_grid(const TrainedModel& model, const BBox& bbox, int resolution) {
    if (resolution < 2) throw ConfigError("boundary grid resolution must be at least 2");
    BoundaryGrid grid;
    grid.bbox = bbox;
    grid.resolution = resolution;
    grid.xs.resize(static_cast<std::size_t>(resolution));
    grid.ys.resize(static_cast<std::size_t>(resolution));
    const double denom = static_cast<double>(resolution - 1);
    for (int k = 0; k < resolution; ++k) {
        const double t = static_cast<double>(k) / denom;
        grid.xs[static_cast<std::size_t>(k)] = bbox.i_min + t * (bbox.i_max - bbox.i_min);
        grid.ys[static_cast<std::size_t>(k)] = bbox.q_min + t * (bbox.q_max - bbox.q_min);
    }
    std::vector<IQPoint> points;
    points.reserve(grid.xs.size() * grid.ys.size());
    for (const double q : grid.ys)
        for (const double i : grid.xs) points.push_back(IQPoint{i, q});
    grid.labels = model.predict(points);
    if (model.supports_proba()) grid.proba = model.predict_proba(points);
    return grid;
}

}  // namespace iqbench
