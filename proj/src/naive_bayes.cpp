#include "iqbench/classifiers/naive_bayes.hpp"

#include <cmath>

namespace iqbench {

namespace {
constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)
}

double GaussianNbModel::log_joint(IQPoint p, int cls) const {
    const double f[2] = {p.i, p.q};
    double lp = std::log(prior[static_cast<std::size_t>(cls)]);
    for (int j = 0; j < 2; ++j) {
        const double m = mean[static_cast<std::size_t>(cls)][static_cast<std::size_t>(j)];
        const double v = var[static_cast<std::size_t>(cls)][static_cast<std::size_t>(j)];
        const double r = f[j] - m;
        lp += -0.5 * (kLog2Pi + std::log(v) + r * r / v);
    }
    return lp;
}

double GaussianNbModel::posterior_excited(IQPoint p) const {
    const double lg = log_joint(p, 0);
    const double le = log_joint(p, 1);
    // 1 / (1 + exp(lg - le)), computed stably.
    const double d = lg - le;
    if (d > 0)
        return std::exp(-d) / (1.0 + std::exp(-d));
    return 1.0 / (1.0 + std::exp(d));
}

GaussianNbModel fit_naive_bayes(const Dataset& train, double var_floor_rel) {
    train.require_both_classes();
    const auto& shots = train.shots();
    const double n = static_cast<double>(shots.size());

    double count[2] = {0.0, 0.0};
    double sum[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    double global_sum[2] = {0.0, 0.0};
    for (const auto& s : shots) {
        const int c = to_int(s.label);
        count[c] += 1.0;
        sum[c][0] += s.point.i;
        sum[c][1] += s.point.q;
        global_sum[0] += s.point.i;
        global_sum[1] += s.point.q;
    }

    GaussianNbModel model;
    for (int c = 0; c < 2; ++c) {
        model.prior[static_cast<std::size_t>(c)] = count[c] / n;
        for (int j = 0; j < 2; ++j)
            model.mean[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)] = sum[c][j] / count[c];
    }

    double ssq[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    double global_ssq[2] = {0.0, 0.0};
    for (const auto& s : shots) {
        const int c = to_int(s.label);
        const double f[2] = {s.point.i, s.point.q};
        for (int j = 0; j < 2; ++j) {
            const double rc = f[j] - model.mean[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)];
            ssq[c][j] += rc * rc;
            const double rg = f[j] - global_sum[j] / n;
            global_ssq[j] += rg * rg;
        }
    }

    for (int j = 0; j < 2; ++j) {
        const double floor = std::max(var_floor_rel * (global_ssq[j] / n), 1e-300);
        for (int c = 0; c < 2; ++c) {
            const double v = ssq[c][j] / count[c];
            model.var[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)] = std::max(v, floor);
        }
    }
    return model;
}

}  // namespace iqbench
