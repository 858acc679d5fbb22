#pragma once

// Shared dataset builders for the test suite. Everything is seeded through
// iqbench::Rng so fixtures are identical across runs and platforms.

#include <cmath>
#include <cstdint>
#include <vector>

#include "iqbench/iqcore.hpp"
#include "iqbench/rng.hpp"

namespace iqtest {

using iqbench::Dataset;
using iqbench::IQPoint;
using iqbench::LabeledShot;
using iqbench::Rng;
using iqbench::StateLabel;

// Two isotropic Gaussian clouds, ground first.
inline Dataset make_blobs(std::size_t per_class, IQPoint center0, IQPoint center1, double sigma,
                          std::uint64_t seed) {
    Rng rng(seed);
    std::vector<LabeledShot> shots;
    shots.reserve(2 * per_class);
    for (std::size_t k = 0; k < per_class; ++k)
        shots.push_back({{rng.normal(center0.i, sigma), rng.normal(center0.q, sigma)},
                         StateLabel::Ground});
    for (std::size_t k = 0; k < per_class; ++k)
        shots.push_back({{rng.normal(center1.i, sigma), rng.normal(center1.q, sigma)},
                         StateLabel::Excited});
    return Dataset(std::move(shots), seed);
}

// Cleanly separable clouds: centroid distance 8 sigma.
inline Dataset separable_fixture(std::size_t per_class = 100, std::uint64_t seed = 11) {
    return make_blobs(per_class, {0.0, 0.0}, {4.0, 0.0}, 0.5, seed);
}

// Concentric rings: inner ring ground, outer ring excited. The radial gap is
// several times the ring thickness, so an RBF machine can reach training
// accuracy 1.0 while no line separates the classes.
inline Dataset make_rings(std::size_t per_class, double r_inner, double r_outer, double thickness,
                          std::uint64_t seed) {
    Rng rng(seed);
    std::vector<LabeledShot> shots;
    shots.reserve(2 * per_class);
    const auto emit = [&](double radius, StateLabel label) {
        const double angle = rng.uniform(0.0, 2.0 * M_PI);
        const double r = radius + rng.normal(0.0, thickness);
        shots.push_back({{r * std::cos(angle), r * std::sin(angle)}, label});
    };
    for (std::size_t k = 0; k < per_class; ++k) emit(r_inner, StateLabel::Ground);
    for (std::size_t k = 0; k < per_class; ++k) emit(r_outer, StateLabel::Excited);
    return Dataset(std::move(shots), seed);
}

// Four blobs at (+-1, +-1), XOR-labeled: equal-sign corners ground. Linearly
// inseparable by construction.
inline Dataset make_xor(std::size_t per_cluster, double sigma, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<LabeledShot> shots;
    shots.reserve(4 * per_cluster);
    const double cx[4] = {1.0, -1.0, 1.0, -1.0};
    const double cy[4] = {1.0, -1.0, -1.0, 1.0};
    for (int corner = 0; corner < 4; ++corner) {
        const StateLabel label = corner < 2 ? StateLabel::Ground : StateLabel::Excited;
        for (std::size_t k = 0; k < per_cluster; ++k)
            shots.push_back({{rng.normal(cx[corner], sigma), rng.normal(cy[corner], sigma)},
                             label});
    }
    return Dataset(std::move(shots), seed);
}

inline std::vector<IQPoint> points_of(const Dataset& data) {
    std::vector<IQPoint> out;
    out.reserve(data.size());
    for (const auto& shot : data.shots()) out.push_back(shot.point);
    return out;
}

inline std::vector<StateLabel> labels_of(const Dataset& data) {
    std::vector<StateLabel> out;
    out.reserve(data.size());
    for (const auto& shot : data.shots()) out.push_back(shot.label);
    return out;
}

// Deterministic lattice covering [-5,5]^2; handy as a prediction probe.
inline std::vector<IQPoint> probe_grid(int per_axis = 7, double half_extent = 5.0) {
    std::vector<IQPoint> out;
    out.reserve(static_cast<std::size_t>(per_axis) * static_cast<std::size_t>(per_axis));
    for (int r = 0; r < per_axis; ++r)
        for (int c = 0; c < per_axis; ++c) {
            const double t_r = static_cast<double>(r) / (per_axis - 1);
            const double t_c = static_cast<double>(c) / (per_axis - 1);
            out.push_back({-half_extent + 2.0 * half_extent * t_c,
                           -half_extent + 2.0 * half_extent * t_r});
        }
    return out;
}

inline std::size_t agreement(const std::vector<StateLabel>& a, const std::vector<StateLabel>& b) {
    std::size_t hits = 0;
    for (std::size_t k = 0; k < a.size(); ++k) hits += a[k] == b[k];
    return hits;
}

}  // namespace iqtest
