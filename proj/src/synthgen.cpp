#include "iqbench/synthgen.hpp"

#include <cmath>
#include <limits>

#include "iqbench/rng.hpp"

namespace iqbench {

double DispersiveParams::dispersive_ratio() const {
    if (g == 0.0) return std::numeric_limits<double>::infinity();
    return std::abs(delta()) / std::abs(g);
}

double dispersive_shift(const DispersiveParams& p, StateLabel state) {
    const double delta = p.delta();
    if (delta == 0.0) throw ZeroDetuningError("qubit-resonator detuning is zero");
    const double pull = p.g * p.g / delta;
    return state == StateLabel::Ground ? p.omega_r + pull : p.omega_r - pull;
}

void CloudParams::validate() const {
    if (!mean0.finite() || !mean1.finite()) throw NonFiniteValueError("cloud means must be finite");
    if (!(sigma > 0.0)) throw Error("sigma must be positive");
    if (!(decay_prob >= 0.0 && decay_prob < 1.0)) throw Error("decay_prob must lie in [0,1)");
    if (mean0 == mean1) throw Error("cloud means must differ");
    if (shots_per_class == 0) throw Error("shots_per_class must be positive");
}

CloudParams default_cloud_params() {
    CloudParams p;
    p.mean0 = {-1.4347358836210995, -0.71736794181054975};
    p.mean1 = {1.4347358836210995, 0.71736794181054975};
    p.sigma = 1.0;
    p.decay_prob = 0.08;
    p.shots_per_class = 1300;
    p.seed = 0;
    return p;
}

Dataset generate(const CloudParams& params) {
    params.validate();
    Rng rng(params.seed);
    std::vector<LabeledShot> shots;
    shots.reserve(2 * params.shots_per_class);

    for (std::uint64_t k = 0; k < params.shots_per_class; ++k) {
        IQPoint pt{rng.normal(params.mean0.i, params.sigma), rng.normal(params.mean0.q, params.sigma)};
        shots.push_back({pt, StateLabel::Ground});
    }
    for (std::uint64_t k = 0; k < params.shots_per_class; ++k) {
        const bool decayed = rng.uniform() < params.decay_prob;
        const IQPoint& mean = decayed ? params.mean0 : params.mean1;
        IQPoint pt{rng.normal(mean.i, params.sigma), rng.normal(mean.q, params.sigma)};
        shots.push_back({pt, StateLabel::Excited});
    }
    return Dataset(std::move(shots), params.seed);
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double bayes_optimal_accuracy(const CloudParams& params) {
    params.validate();
    const double dx = params.mean1.i - params.mean0.i;
    const double dy = params.mean1.q - params.mean0.q;
    const double d = std::hypot(dx, dy);
    const double phi = standard_normal_cdf(d / (2.0 * params.sigma));
    return (1.0 - params.decay_prob) * phi + params.decay_prob / 2.0;
}

}  // namespace iqbench
