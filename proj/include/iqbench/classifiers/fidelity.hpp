#pragma once

#include "iqbench/iqcore.hpp"

namespace iqbench {

// Discriminator along the axis through the class centroids; the threshold is
// placed where the empirical CDFs of the two projected classes differ most.
struct FidelityFitParams {
    double axis_i = 1.0;   // unit vector through the centroids, ground -> excited
    double axis_q = 0.0;
    double threshold = 0.0;
    int orientation = 1;   // +1 when excited shots project above the threshold
    double max_cdf_diff = 0.0;  // attained |CDF_G - CDF_E| at the threshold

    double projection(IQPoint p) const { return axis_i * p.i + axis_q * p.q; }

    StateLabel classify(IQPoint p) const {
        const double side = (projection(p) - threshold) * orientation;
        return side > 0.0 ? StateLabel::Excited : StateLabel::Ground;
    }

    // Signed margin; used as the ROC score since this model has no
    // probability output.
    double margin(IQPoint p) const { return (projection(p) - threshold) * orientation; }
};

// Threshold candidates are the midpoints between consecutive distinct sorted
// projections of the pooled training set, plus -inf/+inf sentinels; among
// ties the lowest candidate wins.
FidelityFitParams fit_fidelity(const Dataset& train);

}  // namespace iqbench
