#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "iqbench/classifiers/gaussian_process.hpp"
#include "iqbench/rng.hpp"
#include "support/fixtures.hpp"

using namespace iqbench;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Root of f = K * (1 - sigmoid(f)) on [0, K] by bisection. With two training
// points far enough apart that their kernel underflows to zero, the Laplace
// mode equation decouples into two copies of this scalar problem.
double scalar_mode(double K) {
    double lo = 0.0, hi = K;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid - K * (1.0 - sigmoid(mid)) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

Dataset random_gp_dataset(Rng& rng) {
    const std::size_t per_class = 2 + rng.below(24);  // n <= 50
    return iqtest::make_blobs(per_class, {0.0, 0.0},
                              {rng.uniform(0.5, 3.0), rng.uniform(-1.0, 1.0)},
                              rng.uniform(0.4, 1.5), rng.next_u64());
}

}  // namespace

TEST_CASE("decoupled two-point mode matches the scalar bisection oracle") {
    std::vector<LabeledShot> shots{{{-1000.0, 0.0}, StateLabel::Ground},
                                   {{1000.0, 0.0}, StateLabel::Excited}};
    const Dataset data(std::move(shots));
    const GpModel model = fit_gp(data, 1.0, 1.0);

    // The cross-kernel exp(-4e6) underflows to zero, so each point's latent
    // value solves f = K * (t - sigmoid(f)) with K = signal_var + jitter.
    const double K = 1.0 + model.jitter;
    const double f_star = scalar_mode(K);
    const double dual_star = f_star / K;  // dual = (t - pi) at the mode

    REQUIRE(model.inputs.size() == 2);
    const std::size_t e = model.targets01[0] == 1 ? 0 : 1;
    const std::size_t g = 1 - e;
    CHECK(model.dual[static_cast<Eigen::Index>(e)] == doctest::Approx(dual_star).epsilon(1e-7));
    CHECK(model.dual[static_cast<Eigen::Index>(g)] == doctest::Approx(-dual_star).epsilon(1e-7));
    CHECK(model.latent_mean({1000.0, 0.0}) == doctest::Approx(f_star).epsilon(1e-7));
    CHECK(model.latent_mean({-1000.0, 0.0}) == doctest::Approx(-f_star).epsilon(1e-7));
    CHECK(model.proba_one({1000.0, 0.0}) > 0.5);
    // Mirror symmetry of the fixture: the two predictive probabilities sum to 1.
    CHECK(model.proba_one({1000.0, 0.0}) + model.proba_one({-1000.0, 0.0}) ==
          doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("log-posterior gradient vanishes at the fitted mode") {
    Rng rng(314);
    for (int iter = 0; iter < 30; ++iter) {
        const Dataset data = random_gp_dataset(rng);
        const double gamma = rng.uniform(0.1, 3.0);
        const double signal_var = rng.uniform(0.5, 2.0);
        const GpModel model = fit_gp(data, gamma, signal_var);
        // grad log p = (t - pi(f_hat)) - dual, recomputed from stored fields.
        CHECK((model.resid - model.dual).norm() < 1e-8);
        CHECK(model.grad_norm < 1e-8);
        CHECK(model.newton_iterations > 0);
        CHECK(model.newton_iterations <= 100);
    }
}

TEST_CASE("far-field probability is one half") {
    const Dataset data = iqtest::make_blobs(40, {0.0, 0.0}, {2.0, 0.0}, 0.8, 5);
    const GpModel model = fit_gp(data, 0.5, 1.0);
    for (const IQPoint p : {IQPoint{500.0, 500.0}, IQPoint{-300.0, 200.0}, IQPoint{0.0, -900.0}}) {
        CHECK(std::abs(model.proba_one(p) - 0.5) <= 1e-6);
    }
}

TEST_CASE("quadrature scheme is recorded") {
    CHECK(std::strcmp(GpModel::kQuadrature, "simpson-257-8sigma") == 0);
}

TEST_CASE("batched latent evaluation matches pointwise calls") {
    const Dataset data = iqtest::make_blobs(60, {0.0, 0.0}, {1.5, 0.5}, 0.9, 77);
    const GpModel model = fit_gp(data, 1.0, 1.0);
    const std::vector<IQPoint> probes = iqtest::probe_grid(9, 3.0);

    std::vector<double> mean, variance;
    model.latent(probes, mean, variance);
    REQUIRE(mean.size() == probes.size());
    REQUIRE(variance.size() == probes.size());
    const std::vector<double> probas = model.proba(probes);
    REQUIRE(probas.size() == probes.size());

    for (std::size_t k = 0; k < probes.size(); ++k) {
        CHECK(mean[k] == doctest::Approx(model.latent_mean(probes[k])).epsilon(1e-10));
        CHECK(variance[k] > 0.0);
        CHECK(variance[k] <= 1.0 + 1e-9);  // posterior never exceeds the prior variance
        CHECK(probas[k] == doctest::Approx(model.proba_one(probes[k])).epsilon(1e-12));
        CHECK((probas[k] > 0.5) == (model.classify(probes[k]) == StateLabel::Excited));
    }
}

TEST_CASE("cache refresh reproduces the fitted caches bit for bit") {
    const Dataset data = iqtest::make_blobs(30, {0.0, 0.0}, {2.2, 0.0}, 1.0, 55);
    const GpModel fitted = fit_gp(data, 1.0, 1.0);
    GpModel stripped = fitted;
    stripped.resid.resize(0);
    stripped.sqrt_w.resize(0);
    stripped.chol_b.resize(0, 0);
    refresh_gp_caches(stripped);
    CHECK((stripped.resid.array() == fitted.resid.array()).all());
    CHECK((stripped.sqrt_w.array() == fitted.sqrt_w.array()).all());
    CHECK((stripped.chol_b.array() == fitted.chol_b.array()).all());
}

TEST_CASE("classifies well-separated clouds accurately") {
    const Dataset data = iqtest::make_blobs(80, {0.0, 0.0}, {4.0, 0.0}, 0.7, 101);
    const GpModel model = fit_gp(data, 0.5, 1.0);
    std::size_t correct = 0;
    for (const auto& shot : data.shots()) correct += model.classify(shot.point) == shot.label;
    CHECK(static_cast<double>(correct) / static_cast<double>(data.size()) > 0.97);
}
