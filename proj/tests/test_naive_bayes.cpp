#include <doctest.h>

#include <cmath>
#include <vector>

#include "iqbench/classifiers/naive_bayes.hpp"
#include "support/fixtures.hpp"

using namespace iqbench;

namespace {

Dataset four_point_fixture() {
    std::vector<LabeledShot> shots{
        {{0.0, 0.0}, StateLabel::Ground},  {{1.0, 1.0}, StateLabel::Ground},
        {{4.0, 4.0}, StateLabel::Excited}, {{5.0, 5.0}, StateLabel::Excited},
    };
    return Dataset(std::move(shots));
}

}  // namespace

TEST_CASE("four-point fixture: moments by hand") {
    const GaussianNbModel model = fit_naive_bayes(four_point_fixture());

    CHECK(model.prior[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(model.prior[1] == doctest::Approx(0.5).epsilon(1e-15));
    for (int f = 0; f < 2; ++f) {
        CHECK(model.mean[0][f] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(model.mean[1][f] == doctest::Approx(4.5).epsilon(1e-15));
        // MLE variance of {0, 1} (and of {4, 5}) is 0.25.
        CHECK(model.var[0][f] == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(model.var[1][f] == doctest::Approx(0.25).epsilon(1e-12));
    }

    // (1, 1) sits on the ground class's doorstep: 1 sigma from the ground
    // mean per feature, 7 sigma from the excited mean.
    const double p = model.posterior_excited({1.0, 1.0});
    CHECK(p < 0.5);
    // Hand evaluation: log-likelihood gap per feature is
    // (3.5^2 - 0.5^2) / (2 * 0.25) = 24, so p = 1 / (1 + e^48).
    CHECK(model.log_joint({1.0, 1.0}, 0) - model.log_joint({1.0, 1.0}, 1) ==
          doctest::Approx(48.0).epsilon(1e-9));
}

TEST_CASE("duplicating every shot leaves the model unchanged") {
    const Dataset base = iqtest::separable_fixture(40, 17);
    std::vector<LabeledShot> doubled(base.shots());
    doubled.insert(doubled.end(), base.shots().begin(), base.shots().end());

    const GaussianNbModel a = fit_naive_bayes(base);
    const GaussianNbModel b = fit_naive_bayes(Dataset(std::move(doubled)));

    for (int c = 0; c < 2; ++c) {
        CHECK(a.prior[c] == b.prior[c]);
        for (int f = 0; f < 2; ++f) {
            // Means are sums divided by N; doubling changes the summation
            // order, so allow rounding noise but nothing more.
            CHECK(a.mean[c][f] == doctest::Approx(b.mean[c][f]).epsilon(1e-12));
            CHECK(a.var[c][f] == doctest::Approx(b.var[c][f]).epsilon(1e-10));
        }
    }
}

TEST_CASE("symmetric fixture: posterior exactly one half at the origin") {
    // Class 1 is class 0 negated, so the origin is equidistant in every
    // feature and the priors match: both log joints are computed from
    // identical numbers and the posterior is exactly 0.5.
    std::vector<LabeledShot> shots{
        {{-3.0, -1.0}, StateLabel::Ground},  {{-1.0, 1.0}, StateLabel::Ground},
        {{3.0, 1.0}, StateLabel::Excited},   {{1.0, -1.0}, StateLabel::Excited},
    };
    const GaussianNbModel model = fit_naive_bayes(Dataset(std::move(shots)));
    CHECK(model.posterior_excited({0.0, 0.0}) == 0.5);
}

TEST_CASE("posterior is a proper probability and increases toward the excited cloud") {
    const Dataset data = iqtest::make_blobs(200, {0.0, 0.0}, {3.0, 0.0}, 0.8, 23);
    const GaussianNbModel model = fit_naive_bayes(data);
    double prev = -1.0;
    for (double x = -2.0; x <= 5.0; x += 0.5) {
        const double p = model.posterior_excited({x, 0.0});
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        CHECK(p >= prev);  // monotone along the class axis for equal variances
        prev = p;
    }
    CHECK(model.posterior_excited({-2.0, 0.0}) < 0.01);
    CHECK(model.posterior_excited({5.0, 0.0}) > 0.99);
}

TEST_CASE("variance floor keeps duplicate-point classes usable") {
    // Ground shots are all identical: raw MLE variance 0, floored to
    // var_floor_rel times the pooled feature variance.
    std::vector<LabeledShot> shots{
        {{0.0, 0.0}, StateLabel::Ground},  {{0.0, 0.0}, StateLabel::Ground},
        {{4.0, 1.0}, StateLabel::Excited}, {{6.0, -1.0}, StateLabel::Excited},
    };
    const GaussianNbModel model = fit_naive_bayes(Dataset(std::move(shots)));
    CHECK(model.var[0][0] > 0.0);
    CHECK(model.var[0][1] > 0.0);
    const double p0 = model.posterior_excited({0.0, 0.0});
    CHECK(std::isfinite(p0));
    CHECK(p0 < 0.5);
    CHECK(model.posterior_excited({5.0, 0.0}) > 0.5);
}
