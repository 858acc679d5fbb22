#pragma once

#include <Eigen/Dense>
#include <vector>

#include "iqbench/iqcore.hpp"

namespace iqbench {

// signal_var * exp(-gamma * ||a-b||^2); the training matrix additionally gets
// jitter on its diagonal.
double gp_kernel(IQPoint a, IQPoint b, double gamma, double signal_var);

// Laplace-approximate GP binary classifier with a logistic link. The mode is
// kept in its dual form (f_hat = K * dual), so the log-posterior gradient at
// the mode is (t - pi(f_hat)) - dual.
struct GpModel {
    std::vector<IQPoint> inputs;
    std::vector<int> targets01;
    Eigen::VectorXd dual;
    double gamma = 1.0;
    double signal_var = 1.0;
    double jitter = 1e-10;  // value actually used (escalated on Cholesky failure)
    int newton_iterations = 0;
    double grad_norm = 0.0;

    // Derived caches, rebuilt by refresh_gp_caches (not serialized).
    Eigen::VectorXd resid;    // t - pi(f_hat); predictive mean weights
    Eigen::VectorXd sqrt_w;   // sqrt(pi (1-pi))
    Eigen::MatrixXd chol_b;   // lower Cholesky of B = I + W^1/2 K W^1/2

    // Predictive class probability: the logistic link averaged over the
    // latent Gaussian by normalized Simpson quadrature, 257 nodes spanning
    // mu +- 8 sigma (recorded in model metadata). Symmetric nodes make the
    // far-field probability exactly 0.5.
    static constexpr const char* kQuadrature = "simpson-257-8sigma";

    double latent_mean(IQPoint p) const;
    // Batched latent posterior; chunks the triangular solves internally.
    void latent(const std::vector<IQPoint>& points, std::vector<double>& mean,
                std::vector<double>& variance) const;
    std::vector<double> proba(const std::vector<IQPoint>& points) const;
    double proba_one(IQPoint p) const;
    StateLabel classify(IQPoint p) const {
        return proba_one(p) > 0.5 ? StateLabel::Excited : StateLabel::Ground;
    }
};

// Rebuilds resid / sqrt_w / chol_b from inputs, targets and dual — used after
// deserialization and at the end of fit_gp, so both paths hold identical
// caches.
void refresh_gp_caches(GpModel& model);

// Newton iterations on the dual variables with backtracking on the log
// posterior; stops when the gradient norm drops below 1e-8, throws
// NonConvergenceError after 100 iterations. Cholesky failures escalate the
// jitter tenfold up to 1e-6 before CholeskyFailureError.
GpModel fit_gp(const Dataset& train, double gamma, double signal_var, double jitter = 1e-10);

}  // namespace iqbench
