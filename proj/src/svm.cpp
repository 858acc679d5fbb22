#include "iqbench/classifiers/svm.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "iqbench/errors.hpp"

namespace iqbench {

namespace {

constexpr double kGapTol = 1e-6;
constexpr double kKktTol = 1e-3;
constexpr std::uint64_t kMaxIter = 100000;
constexpr std::uint64_t kCheckEvery = 256;

double stable_sigmoid(double x) {
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Dense symmetric kernel matrix; training sets here are small enough (<= a few
// thousand points) that precomputing all n^2 entries beats any caching scheme.
std::vector<double> linear_kernel_matrix(const std::vector<LabeledShot>& s) {
    const std::size_t n = s.size();
    std::vector<double> k(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = s[i].point.i * s[j].point.i + s[i].point.q * s[j].point.q;
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    return k;
}

std::vector<double> rbf_kernel_matrix(const std::vector<LabeledShot>& s, double gamma) {
    const std::size_t n = s.size();
    std::vector<double> k(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double di = s[i].point.i - s[j].point.i;
            const double dq = s[i].point.q - s[j].point.q;
            const double v = std::exp(-gamma * (di * di + dq * dq));
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    return k;
}

struct SmoState {
    std::vector<double> alpha;
    std::vector<double> grad;  // gradient of 1/2 a'Qa - e'a, Q_ij = y_i y_j K_ij
    double b = 0.0;
    SmoReport report;
};

struct Selection {
    std::size_t up = 0;
    std::size_t low = 0;
    double m = -std::numeric_limits<double>::infinity();
    double big_m = std::numeric_limits<double>::infinity();
    bool valid = false;
};

// Maximal violating pair. v_k = -y_k * grad_k; KKT holds iff
// max_{up} v <= b <= min_{low} v for some b.
Selection select_pair(const std::vector<double>& alpha, const std::vector<double>& grad,
                      const std::vector<double>& y, double c) {
    Selection sel;
    const std::size_t n = alpha.size();
    bool have_up = false;
    bool have_low = false;
    for (std::size_t k = 0; k < n; ++k) {
        const double v = -y[k] * grad[k];
        const bool in_up = (y[k] > 0.0) ? (alpha[k] < c) : (alpha[k] > 0.0);
        const bool in_low = (y[k] > 0.0) ? (alpha[k] > 0.0) : (alpha[k] < c);
        if (in_up && v > sel.m) {
            sel.m = v;
            sel.up = k;
            have_up = true;
        }
        if (in_low && v < sel.big_m) {
            sel.big_m = v;
            sel.low = k;
            have_low = true;
        }
    }
    sel.valid = have_up && have_low;
    return sel;
}

void recompute_gradient(const std::vector<double>& kernel, const std::vector<double>& y,
                        const std::vector<double>& alpha, std::vector<double>& grad) {
    const std::size_t n = alpha.size();
    std::fill(grad.begin(), grad.end(), -1.0);
    for (std::size_t j = 0; j < n; ++j) {
        if (alpha[j] == 0.0) continue;
        const double ayj = alpha[j] * y[j];
        const double* row = kernel.data() + j * n;
        for (std::size_t k = 0; k < n; ++k) grad[k] += y[k] * ayj * row[k];
    }
}

struct Certificate {
    double b = 0.0;
    double gap = 0.0;
    double kkt = 0.0;  // max functional-margin violation with this b
    double interval = 0.0;  // m - M
};

// b is the midpoint of the KKT interval [M, m] (minimizes the worst
// violation); the duality gap is evaluated for that exact (alpha, b) pair, so
// the certificate applies to the model as shipped.
Certificate evaluate(const std::vector<double>& alpha, const std::vector<double>& grad,
                     const std::vector<double>& y, double c) {
    const std::size_t n = alpha.size();
    const Selection sel = select_pair(alpha, grad, y, c);
    Certificate cert;
    cert.b = 0.5 * (sel.m + sel.big_m);
    cert.interval = sel.m - sel.big_m;

    double quad = 0.0;   // alpha' Q alpha
    double lin = 0.0;    // sum alpha
    double hinge = 0.0;  // sum of primal slacks at b
    double viol = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        quad += alpha[k] * (grad[k] + 1.0);
        lin += alpha[k];
        const double v = -y[k] * grad[k];
        hinge += std::max(0.0, y[k] * (v - cert.b));
        const bool in_up = (y[k] > 0.0) ? (alpha[k] < c) : (alpha[k] > 0.0);
        const bool in_low = (y[k] > 0.0) ? (alpha[k] > 0.0) : (alpha[k] < c);
        if (in_up) viol = std::max(viol, v - cert.b);
        if (in_low) viol = std::max(viol, cert.b - v);
    }
    cert.gap = quad - lin + c * hinge;
    cert.kkt = viol;
    return cert;
}

SmoState solve_smo(const std::vector<double>& kernel, const std::vector<double>& y, double c,
                   const char* kind) {
    const std::size_t n = y.size();
    SmoState st;
    st.alpha.assign(n, 0.0);
    st.grad.assign(n, -1.0);

    for (std::uint64_t iter = 1; iter <= kMaxIter; ++iter) {
        Selection sel = select_pair(st.alpha, st.grad, y, c);
        if (!sel.valid)
            throw NonConvergenceError(kind, "working-set selection failed (degenerate data)");

        const bool due = (iter % kCheckEvery == 0) || (sel.m - sel.big_m <= 1e-12);
        if (due) {
            // Exact check: rebuild the gradient to drop incremental roundoff.
            recompute_gradient(kernel, y, st.alpha, st.grad);
            const Certificate cert = evaluate(st.alpha, st.grad, y, c);
            st.b = cert.b;
            st.report.iterations = iter - 1;
            st.report.dual_gap = cert.gap;
            st.report.max_kkt_violation = cert.kkt;
            if ((cert.gap <= kGapTol && cert.interval <= kKktTol) || cert.interval <= 1e-12)
                return st;
            sel = select_pair(st.alpha, st.grad, y, c);
            if (!sel.valid)
                throw NonConvergenceError(kind, "working-set selection failed (degenerate data)");
        }

        const std::size_t i = sel.up;
        const std::size_t j = sel.low;
        const double* ki = kernel.data() + i * n;
        const double* kj = kernel.data() + j * n;
        double curv = ki[i] + kj[j] - 2.0 * ki[j];
        if (curv <= 0.0) curv = 1e-12;

        const double limit_i = (y[i] > 0.0) ? c - st.alpha[i] : st.alpha[i];
        const double limit_j = (y[j] > 0.0) ? st.alpha[j] : c - st.alpha[j];
        const double limit = std::min(limit_i, limit_j);
        const double step = std::min((sel.m - sel.big_m) / curv, limit);

        // Move alpha_i by y_i*step and alpha_j by -y_j*step (preserves the
        // equality constraint); land exactly on the box when the step binds.
        if (step == limit_i)
            st.alpha[i] = (y[i] > 0.0) ? c : 0.0;
        else
            st.alpha[i] += (y[i] > 0.0) ? step : -step;
        if (step == limit_j)
            st.alpha[j] = (y[j] > 0.0) ? 0.0 : c;
        else
            st.alpha[j] -= (y[j] > 0.0) ? step : -step;

        for (std::size_t k = 0; k < n; ++k) st.grad[k] += y[k] * step * (ki[k] - kj[k]);
    }
    throw NonConvergenceError(kind, "iteration cap reached (1e5)");
}

std::vector<double> signed_labels(const std::vector<LabeledShot>& shots) {
    std::vector<double> y(shots.size());
    for (std::size_t k = 0; k < shots.size(); ++k)
        y[k] = shots[k].label == StateLabel::Excited ? 1.0 : -1.0;
    return y;
}

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw InvalidHyperparamError(name, "must be a positive finite number, got " +
                                               std::to_string(value));
}

}  // namespace

double PlattScale::apply(double decision) const { return stable_sigmoid(slope * decision); }

PlattScale fit_platt_slope(const std::vector<double>& decisions, const std::vector<int>& labels01) {
    PlattScale scale;
    double a = 1.0;
    for (int step = 0; step < 100; ++step) {
        double g = 0.0;
        double h = 0.0;
        for (std::size_t k = 0; k < decisions.size(); ++k) {
            const double s = decisions[k];
            const double p = stable_sigmoid(a * s);
            g += s * (p - static_cast<double>(labels01[k]));
            h += s * s * p * (1.0 - p);
        }
        if (std::abs(g) <= 1e-12 * static_cast<double>(decisions.size() + 1) || h <= 1e-300) break;
        const double delta = g / h;
        a = std::clamp(a - delta, 1e-6, 1e6);
        if (std::abs(delta) <= 1e-12 * std::max(1.0, std::abs(a))) break;
    }
    scale.slope = a;
    return scale;
}

double RbfSvmModel::decision(IQPoint p) const {
    double acc = b;
    for (std::size_t k = 0; k < support.size(); ++k) {
        const double di = support[k].i - p.i;
        const double dq = support[k].q - p.q;
        acc += coef[k] * std::exp(-gamma * (di * di + dq * dq));
    }
    return acc;
}

LinearSvmModel fit_linear_svm(const Dataset& train, double C, SmoReport* report) {
    require_positive(C, "C");
    train.require_both_classes();
    const auto& shots = train.shots();
    const std::vector<double> y = signed_labels(shots);
    const std::vector<double> kernel = linear_kernel_matrix(shots);
    SmoState st = solve_smo(kernel, y, C, "LinearSVM");

    LinearSvmModel model;
    model.C = C;
    model.b = st.b;
    for (std::size_t k = 0; k < shots.size(); ++k) {
        const double ay = st.alpha[k] * y[k];
        model.w[0] += ay * shots[k].point.i;
        model.w[1] += ay * shots[k].point.q;
    }

    std::vector<double> decisions(shots.size());
    std::vector<int> labels(shots.size());
    for (std::size_t k = 0; k < shots.size(); ++k) {
        decisions[k] = model.decision(shots[k].point);
        labels[k] = to_int(shots[k].label);
    }
    model.platt = fit_platt_slope(decisions, labels);
    if (report) *report = st.report;
    return model;
}

RbfSvmModel fit_rbf_svm(const Dataset& train, double C, double gamma, int degree,
                        SmoReport* report) {
    require_positive(C, "C");
    require_positive(gamma, "gamma");
    train.require_both_classes();
    const auto& shots = train.shots();
    const std::vector<double> y = signed_labels(shots);
    const std::vector<double> kernel = rbf_kernel_matrix(shots, gamma);
    SmoState st = solve_smo(kernel, y, C, "RbfSVM");

    RbfSvmModel model;
    model.C = C;
    model.gamma = gamma;
    model.degree = degree;
    model.b = st.b;
    for (std::size_t k = 0; k < shots.size(); ++k) {
        if (st.alpha[k] == 0.0) continue;
        model.support.push_back(shots[k].point);
        model.coef.push_back(st.alpha[k] * y[k]);
    }

    std::vector<double> decisions(shots.size());
    std::vector<int> labels(shots.size());
    for (std::size_t k = 0; k < shots.size(); ++k) {
        decisions[k] = model.decision(shots[k].point);
        labels[k] = to_int(shots[k].label);
    }
    model.platt = fit_platt_slope(decisions, labels);
    if (report) *report = st.report;
    return model;
}

double default_rbf_gamma(const Dataset& train) {
    const auto& shots = train.shots();
    if (shots.empty()) return 1.0;
    const double n = static_cast<double>(shots.size());
    double mean[2] = {0.0, 0.0};
    for (const auto& s : shots) {
        mean[0] += s.point.i;
        mean[1] += s.point.q;
    }
    mean[0] /= n;
    mean[1] /= n;
    double var = 0.0;
    for (const auto& s : shots) {
        const double di = s.point.i - mean[0];
        const double dq = s.point.q - mean[1];
        var += di * di + dq * dq;
    }
    var /= 2.0 * n;  // mean per-feature variance
    if (!(var > 0.0)) return 1.0;
    return 1.0 / (2.0 * var);
}

}  // namespace iqbench
