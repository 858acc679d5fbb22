#include "iqbench/classifiers/gaussian_process.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "iqbench/errors.hpp"

namespace iqbench {

namespace {

constexpr int kMaxNewton = 100;
constexpr double kGradTol = 1e-8;
constexpr double kMaxJitter = 1e-6;
constexpr int kQuadNodes = 257;  // Simpson needs an odd count
constexpr double kQuadSpan = 8.0;

double stable_sigmoid(double x) {
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// log sigma(x) = -log(1 + e^-x), stable on both tails.
double log_sigmoid(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

Eigen::MatrixXd kernel_matrix(const std::vector<IQPoint>& pts, double gamma, double signal_var,
                              double jitter) {
    const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = gp_kernel(pts[static_cast<std::size_t>(i)],
                                       pts[static_cast<std::size_t>(j)], gamma, signal_var);
            k(i, j) = v;
            k(j, i) = v;
        }
        k(i, i) += jitter;
    }
    return k;
}

// Sum_t log sigma(y_t f_t) - 1/2 a'f, the Laplace objective in dual form.
double log_posterior(const Eigen::VectorXd& f, const Eigen::VectorXd& a,
                     const std::vector<int>& targets01) {
    double lp = -0.5 * a.dot(f);
    for (Eigen::Index k = 0; k < f.size(); ++k) {
        const double y = targets01[static_cast<std::size_t>(k)] == 1 ? 1.0 : -1.0;
        lp += log_sigmoid(y * f(k));
    }
    return lp;
}

// Fixed quadrature grid in units of the latent standard deviation:
// node[k] offsets and Simpson-weighted Gaussian masses; the weights are
// normalized so that integrating a constant gives that constant back.
struct QuadTable {
    double offset[kQuadNodes];
    double weight[kQuadNodes];
};

const QuadTable& quad_table() {
    static const QuadTable table = [] {
        QuadTable t;
        const double h = 2.0 * kQuadSpan / (kQuadNodes - 1);
        double total = 0.0;
        for (int k = 0; k < kQuadNodes; ++k) {
            const double u = -kQuadSpan + h * k;
            double coeff;
            if (k == 0 || k == kQuadNodes - 1)
                coeff = 1.0;
            else
                coeff = (k % 2 == 1) ? 4.0 : 2.0;
            t.offset[k] = u;
            t.weight[k] = coeff * std::exp(-0.5 * u * u);
            total += t.weight[k];
        }
        for (double& w : t.weight) w /= total;
        return t;
    }();
    return table;
}

double averaged_sigmoid(double mean, double stddev) {
    const QuadTable& t = quad_table();
    double acc = 0.0;
    for (int k = 0; k < kQuadNodes; ++k)
        acc += t.weight[k] * stable_sigmoid(mean + stddev * t.offset[k]);
    return acc;
}

}  // namespace

double gp_kernel(IQPoint a, IQPoint b, double gamma, double signal_var) {
    const double di = a.i - b.i;
    const double dq = a.q - b.q;
    return signal_var * std::exp(-gamma * (di * di + dq * dq));
}

void refresh_gp_caches(GpModel& model) {
    const Eigen::Index n = static_cast<Eigen::Index>(model.inputs.size());
    const Eigen::MatrixXd k =
        kernel_matrix(model.inputs, model.gamma, model.signal_var, model.jitter);
    const Eigen::VectorXd f = k * model.dual;

    model.resid.resize(n);
    model.sqrt_w.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double pi = stable_sigmoid(f(j));
        model.resid(j) = static_cast<double>(model.targets01[static_cast<std::size_t>(j)]) - pi;
        model.sqrt_w(j) = std::sqrt(pi * (1.0 - pi));
    }
    model.grad_norm = (model.resid - model.dual).norm();

    Eigen::MatrixXd b = model.sqrt_w.asDiagonal() * k * model.sqrt_w.asDiagonal();
    b.diagonal().array() += 1.0;
    const Eigen::LLT<Eigen::MatrixXd> llt(b);
    if (llt.info() != Eigen::Success)
        throw CholeskyFailureError("B matrix not positive definite while refreshing GP caches");
    model.chol_b = llt.matrixL();
}

double GpModel::latent_mean(IQPoint p) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < inputs.size(); ++k)
        acc += gp_kernel(p, inputs[k], gamma, signal_var) * resid(static_cast<Eigen::Index>(k));
    return acc;
}

void GpModel::latent(const std::vector<IQPoint>& points, std::vector<double>& mean,
                     std::vector<double>& variance) const {
    const Eigen::Index n = static_cast<Eigen::Index>(inputs.size());
    const std::size_t m = points.size();
    mean.resize(m);
    variance.resize(m);

    constexpr std::size_t kChunk = 512;
    Eigen::MatrixXd kstar;
    for (std::size_t at = 0; at < m; at += kChunk) {
        const Eigen::Index cols = static_cast<Eigen::Index>(std::min(kChunk, m - at));
        kstar.resize(n, cols);
        for (Eigen::Index c = 0; c < cols; ++c)
            for (Eigen::Index r = 0; r < n; ++r)
                kstar(r, c) = gp_kernel(inputs[static_cast<std::size_t>(r)],
                                        points[at + static_cast<std::size_t>(c)], gamma,
                                        signal_var);
        const Eigen::VectorXd mu = kstar.transpose() * resid;
        Eigen::MatrixXd v = sqrt_w.asDiagonal() * kstar;
        chol_b.triangularView<Eigen::Lower>().solveInPlace(v);
        for (Eigen::Index c = 0; c < cols; ++c) {
            mean[at + static_cast<std::size_t>(c)] = mu(c);
            variance[at + static_cast<std::size_t>(c)] =
                std::max(signal_var - v.col(c).squaredNorm(), 1e-12);
        }
    }
}

std::vector<double> GpModel::proba(const std::vector<IQPoint>& points) const {
    std::vector<double> mean;
    std::vector<double> variance;
    latent(points, mean, variance);
    std::vector<double> out(points.size());
    for (std::size_t k = 0; k < points.size(); ++k)
        out[k] = averaged_sigmoid(mean[k], std::sqrt(variance[k]));
    return out;
}

double GpModel::proba_one(IQPoint p) const { return proba(std::vector<IQPoint>{p})[0]; }

GpModel fit_gp(const Dataset& train, double gamma, double signal_var, double jitter) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw InvalidHyperparamError("gamma", "must be a positive finite number");
    if (!(signal_var > 0.0) || !std::isfinite(signal_var))
        throw InvalidHyperparamError("signal_variance", "must be a positive finite number");
    if (!(jitter > 0.0) || jitter > kMaxJitter)
        throw InvalidHyperparamError("jitter", "must lie in (0, 1e-6]");
    train.require_both_classes();

    GpModel model;
    model.gamma = gamma;
    model.signal_var = signal_var;
    const auto& shots = train.shots();
    const Eigen::Index n = static_cast<Eigen::Index>(shots.size());
    model.inputs.reserve(shots.size());
    model.targets01.reserve(shots.size());
    for (const auto& s : shots) {
        model.inputs.push_back(s.point);
        model.targets01.push_back(to_int(s.label));
    }

    for (double jit = jitter; jit <= kMaxJitter; jit *= 10.0) {
        const Eigen::MatrixXd k = kernel_matrix(model.inputs, gamma, signal_var, jit);
        Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
        double psi = log_posterior(f, a, model.targets01);
        bool chol_ok = true;

        for (int iter = 1; iter <= kMaxNewton; ++iter) {
            Eigen::VectorXd pi(n), w(n), sw(n);
            for (Eigen::Index j = 0; j < n; ++j) {
                pi(j) = stable_sigmoid(f(j));
                w(j) = pi(j) * (1.0 - pi(j));
                sw(j) = std::sqrt(w(j));
            }
            Eigen::MatrixXd b_mat = sw.asDiagonal() * k * sw.asDiagonal();
            b_mat.diagonal().array() += 1.0;
            const Eigen::LLT<Eigen::MatrixXd> llt(b_mat);
            if (llt.info() != Eigen::Success) {
                chol_ok = false;
                break;
            }

            Eigen::VectorXd bvec(n);
            for (Eigen::Index j = 0; j < n; ++j)
                bvec(j) = w(j) * f(j) +
                          (static_cast<double>(model.targets01[static_cast<std::size_t>(j)]) -
                           pi(j));
            const Eigen::VectorXd kb = k * bvec;
            const Eigen::VectorXd solved = llt.solve((sw.array() * kb.array()).matrix());
            const Eigen::VectorXd a_full = bvec - (sw.array() * solved.array()).matrix();

            // Backtrack along the Newton direction on the log posterior.
            double step = 1.0;
            Eigen::VectorXd a_next, f_next;
            double psi_next = psi;
            for (int halving = 0; halving < 30; ++halving) {
                a_next = a + step * (a_full - a);
                f_next = k * a_next;
                psi_next = log_posterior(f_next, a_next, model.targets01);
                if (std::isfinite(psi_next) && psi_next >= psi) break;
                step *= 0.5;
            }
            a = a_next;
            f = f_next;
            psi = psi_next;

            double grad_sq = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                const double g =
                    (static_cast<double>(model.targets01[static_cast<std::size_t>(j)]) -
                     stable_sigmoid(f(j))) -
                    a(j);
                grad_sq += g * g;
            }
            if (!std::isfinite(grad_sq)) {
                chol_ok = false;
                break;
            }
            if (std::sqrt(grad_sq) < kGradTol) {
                model.dual = a;
                model.jitter = jit;
                model.newton_iterations = iter;
                refresh_gp_caches(model);
                return model;
            }
        }

        if (chol_ok)
            throw NonConvergenceError("GaussianProcess",
                                      "Newton cap (100 iterations) reached before gradient norm "
                                      "fell below 1e-8");
        // else: escalate jitter and retry
    }
    throw CholeskyFailureError("kernel matrix not positive definite even with jitter 1e-6");
}

}  // namespace iqbench
