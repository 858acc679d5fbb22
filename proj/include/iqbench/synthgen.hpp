#pragma once

#include <cstdint>

#include "iqbench/iqcore.hpp"

namespace iqbench {

// Qubit-resonator frequencies and coupling, unit-agnostic but consistent.
struct DispersiveParams {
    double omega_r = 0.0;  // resonator frequency
    double omega_a = 0.0;  // qubit frequency
    double g = 0.0;        // coupling

    double delta() const { return omega_a - omega_r; }

    // |delta| / g; the dispersive approximation needs this to be large.
    // Returns +inf when g == 0. The caller decides the threshold.
    double dispersive_ratio() const;
};

// State-dependent resonator frequency: omega_r + g^2/delta when the qubit is
// in the ground state, omega_r - g^2/delta when excited.
double dispersive_shift(const DispersiveParams& p, StateLabel state);

// Generative model behind the two IQ clouds: isotropic Gaussians around
// mean0/mean1 plus a Bernoulli relaxation channel that records a fraction of
// excited-state shots inside the ground cloud without relabeling them.
struct CloudParams {
    IQPoint mean0;
    IQPoint mean1;
    double sigma = 1.0;
    double decay_prob = 0.0;
    std::uint64_t shots_per_class = 0;
    std::uint64_t seed = 0;

    void validate() const;  // throws Error on invariant violations
};

// Calibrated so the Bayes-optimal accuracy is 0.91; constants produced by
// tools/iqbench-calibrate (root-find on the centroid distance at
// decay_prob = 0.08, direction (2,1)/sqrt(5), sigma = 1).
CloudParams default_cloud_params();

// shots_per_class ground shots followed by shots_per_class excited shots;
// deterministic for a fixed seed.
Dataset generate(const CloudParams& params);

// Accuracy of the Bayes-optimal decision rule under the generative model.
//
// With balanced classes the likelihood ratio between the excited mixture
// p*N(mean0) + (1-p)*N(mean1) and the ground density N(mean0) exceeds 1
// exactly where N(mean1) > N(mean0), i.e. on the mean1 side of the
// perpendicular bisector of the segment mean0-mean1. Integrating the equal
// isotropic Gaussians against that half-plane gives the closed form
//     accuracy = (1 - p) * Phi(d / (2*sigma)) + p / 2,
// where d is the distance between the means and Phi the standard normal CDF.
// This is exact; no numerical integration is involved.
double bayes_optimal_accuracy(const CloudParams& params);

// Standard normal CDF, shared by the closed form above and by tests.
double standard_normal_cdf(double z);

}  // namespace iqbench
