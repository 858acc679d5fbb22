#include "iqbench/classifiers/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace iqbench {

FidelityFitParams fit_fidelity(const Dataset& train) {
    train.require_both_classes();
    const auto& shots = train.shots();

    double cg_i = 0.0, cg_q = 0.0, ce_i = 0.0, ce_q = 0.0;
    const double n_g = static_cast<double>(train.count(StateLabel::Ground));
    const double n_e = static_cast<double>(train.count(StateLabel::Excited));
    for (const auto& s : shots) {
        if (s.label == StateLabel::Ground) {
            cg_i += s.point.i;
            cg_q += s.point.q;
        } else {
            ce_i += s.point.i;
            ce_q += s.point.q;
        }
    }
    cg_i /= n_g;
    cg_q /= n_g;
    ce_i /= n_e;
    ce_q /= n_e;

    const double dx = ce_i - cg_i;
    const double dy = ce_q - cg_q;
    const double norm = std::hypot(dx, dy);
    if (norm == 0.0) throw DegenerateCentroidsError("class centroids coincide");

    FidelityFitParams params;
    params.axis_i = dx / norm;
    params.axis_q = dy / norm;

    // Projections sorted with their labels; counts below a candidate give the
    // empirical CDFs directly.
    struct Proj {
        double value;
        bool excited;
    };
    std::vector<Proj> proj;
    proj.reserve(shots.size());
    for (const auto& s : shots)
        proj.push_back({params.projection(s.point), s.label == StateLabel::Excited});
    std::sort(proj.begin(), proj.end(), [](const Proj& a, const Proj& b) { return a.value < b.value; });

    // The axis points ground -> excited, so the excited mean projection is
    // the larger one by construction.
    params.orientation = 1;

    // Scan candidates in ascending order. Exact integer counts avoid
    // float-comparison ties: |cg/n_g - ce/n_e| is compared via
    // |cg*n_e_i - ce*n_g_i| with integer arithmetic.
    const long long ng_i = static_cast<long long>(n_g);
    const long long ne_i = static_cast<long long>(n_e);
    long long below_g = 0, below_e = 0;
    long long best_num = 0;  // |cg*ne - ce*ng| at the best candidate
    double best_threshold = -std::numeric_limits<double>::infinity();
    long long best_cg = 0, best_ce = 0;

    std::size_t k = 0;
    const std::size_t n = proj.size();
    // Candidate before all points: the -inf sentinel (diff 0), prefilled above.
    while (k < n) {
        // Consume the run of equal projections.
        const double v = proj[k].value;
        while (k < n && proj[k].value == v) {
            if (proj[k].excited)
                ++below_e;
            else
                ++below_g;
            ++k;
        }
        double candidate;
        if (k < n)
            candidate = 0.5 * (v + proj[k].value);
        else
            candidate = std::numeric_limits<double>::infinity();  // +inf sentinel, diff 0
        const long long num = std::llabs(below_g * ne_i - below_e * ng_i);
        if (num > best_num) {
            best_num = num;
            best_threshold = candidate;
            best_cg = below_g;
            best_ce = below_e;
        }
    }

    params.threshold = best_threshold;
    params.max_cdf_diff = std::abs(static_cast<double>(best_cg) / n_g - static_cast<double>(best_ce) / n_e);
    return params;
}

}  // namespace iqbench
