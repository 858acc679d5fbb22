#pragma once

#include <cstdint>
#include <vector>

#include "iqbench/iqcore.hpp"

namespace iqbench {

// Sigmoid calibration of a decision value into P(Excited). Only the slope is
// fit (intercept pinned at 0) so that proba > 0.5 iff decision > 0 — the
// calibrated probabilities can never disagree with the sign rule.
struct PlattScale {
    double slope = 1.0;  // > 0

    double apply(double decision) const;
};

// Fits the slope by Newton's method on the binary cross-entropy of
// sigmoid(slope * decision) against labels01 in {0,1}. Separable data pushes
// the slope toward infinity; it is capped at 1e6 (probabilities saturate).
PlattScale fit_platt_slope(const std::vector<double>& decisions, const std::vector<int>& labels01);

// Solver diagnostics, exposed for property tests.
struct SmoReport {
    std::uint64_t iterations = 0;
    double dual_gap = 0.0;           // primal(w, b) - dual(alpha) at termination
    double max_kkt_violation = 0.0;  // max over points of the one-sided margin excess
};

struct LinearSvmModel {
    double w[2] = {0.0, 0.0};
    double b = 0.0;
    double C = 1.0;
    PlattScale platt;

    double decision(IQPoint p) const { return w[0] * p.i + w[1] * p.q + b; }
    StateLabel classify(IQPoint p) const {
        return decision(p) > 0.0 ? StateLabel::Excited : StateLabel::Ground;
    }
    double proba(IQPoint p) const { return platt.apply(decision(p)); }
};

struct RbfSvmModel {
    std::vector<IQPoint> support;  // training points with alpha > 0
    std::vector<double> coef;      // alpha_i * y_i per support vector
    double b = 0.0;
    double gamma = 1.0;
    double C = 1.0;
    int degree = 3;  // inert for an RBF kernel; carried through for the record
    PlattScale platt;

    double decision(IQPoint p) const;
    StateLabel classify(IQPoint p) const {
        return decision(p) > 0.0 ? StateLabel::Excited : StateLabel::Ground;
    }
    double proba(IQPoint p) const { return platt.apply(decision(p)); }
};

// Soft-margin SVM trained by SMO (maximal violating pair). Terminates when the
// primal-dual gap is <= 1e-6 and the KKT interval width is <= 1e-3; throws
// NonConvergenceError past 1e5 iterations.
//
// Scaling convention: mapping inputs x -> s*x with C -> C/s^2 leaves the
// decision signs unchanged (w scales by 1/s, b is unchanged).
LinearSvmModel fit_linear_svm(const Dataset& train, double C, SmoReport* report = nullptr);

RbfSvmModel fit_rbf_svm(const Dataset& train, double C, double gamma, int degree = 3,
                        SmoReport* report = nullptr);

// Data-scale default: 1 / (2 * mean per-feature variance) of the training
// inputs, so the kernel length scale tracks the cloud size.
double default_rbf_gamma(const Dataset& train);

}  // namespace iqbench
