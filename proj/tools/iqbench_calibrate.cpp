// Produces the frozen default generator constants: finds the centroid
// distance d such that the Bayes-optimal accuracy of the two-cloud model
// equals the target, with sigma = 1 and decay_prob = 0.08, then places the
// centroids at +-(d/2) along the unit direction (2,1)/sqrt(5).
//
// Closed form being inverted (see synthgen):
//     accuracy(d) = (1 - p) * Phi(d / (2 sigma)) + p / 2
// which is strictly increasing in d, so bisection converges to machine
// precision. The defaults baked into default_cloud_params() are this
// program's output.

#include <cmath>
#include <cstdio>

#include "iqbench/synthgen.hpp"
#include "iqbench/util.hpp"

int main() {
    const double target = 0.91;
    const double sigma = 1.0;
    const double decay_prob = 0.08;

    const auto accuracy_at = [&](double d) {
        return (1.0 - decay_prob) * iqbench::standard_normal_cdf(d / (2.0 * sigma)) +
               decay_prob / 2.0;
    };

    double lo = 0.0, hi = 20.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;  // interval narrowed to adjacent doubles
        (accuracy_at(mid) < target ? lo : hi) = mid;
    }
    const double d = 0.5 * (lo + hi);
    const double half = d / 2.0;

    const double dir_i = 2.0 / std::sqrt(5.0);
    const double dir_q = 1.0 / std::sqrt(5.0);

    std::printf("target accuracy   : %s\n", iqbench::format_double(target).c_str());
    std::printf("sigma             : %s\n", iqbench::format_double(sigma).c_str());
    std::printf("decay_prob        : %s\n", iqbench::format_double(decay_prob).c_str());
    std::printf("centroid distance : %s\n", iqbench::format_double(d).c_str());
    std::printf("half distance     : %s\n", iqbench::format_double(half).c_str());
    std::printf("mean0             : (%s, %s)\n",
                iqbench::format_double(-half * dir_i).c_str(),
                iqbench::format_double(-half * dir_q).c_str());
    std::printf("mean1             : (%s, %s)\n", iqbench::format_double(half * dir_i).c_str(),
                iqbench::format_double(half * dir_q).c_str());

    const iqbench::CloudParams frozen = iqbench::default_cloud_params();
    const double check = iqbench::bayes_optimal_accuracy(frozen);
    std::printf("frozen mean0      : (%s, %s)\n", iqbench::format_double(frozen.mean0.i).c_str(),
                iqbench::format_double(frozen.mean0.q).c_str());
    std::printf("frozen mean1      : (%s, %s)\n", iqbench::format_double(frozen.mean1.i).c_str(),
                iqbench::format_double(frozen.mean1.q).c_str());
    std::printf("frozen accuracy   : %s\n", iqbench::format_double(check).c_str());

    const bool ok = std::abs(frozen.mean0.i - (-half * dir_i)) < 1e-12 &&
                    std::abs(frozen.mean0.q - (-half * dir_q)) < 1e-12 &&
                    std::abs(check - target) < 1e-12;
    std::printf("frozen constants %s the calibration\n", ok ? "match" : "DO NOT match");
    return ok ? 0 : 1;
}
