#pragma once

#include <cstdint>

#include "ppct/grid.hpp"

namespace ppct {

/// One wedge split at a hard threshold. Positions above the threshold keep
/// their coefficient; the rest form the noise subspace.
struct WedgePartition {
    double lambda = 0.0;
    ComplexGrid noisy;
    Grid<std::uint8_t> keep_mask;  // 1 where |Y| > lambda
    RealGrid thresholded;          // |Y| where kept, 0 elsewhere
    RealGrid noisy_mag;
    RealGrid noisy_phase;          // (-pi, pi], 0 where |Y| == 0
};

WedgePartition partition_wedge(const ComplexGrid& wedge, double lambda);

/// Gaussian spatial and range falloffs over a (2*half_width+1)^2 window.
/// sigma_r == 0 means "do not filter": the data passes through unchanged.
struct KernelParams {
    double sigma_d = 1.0;
    double sigma_r = 1.0;
    int half_width = 3;

    /// half_width = ceil(3 * sigma_d).
    static KernelParams from_falloffs(double sigma_d, double sigma_r);
    void validate() const;
};

enum class RangeGuide {
    magnitude,      // range distance between noisy magnitudes
    complex_value,  // modulus of the difference of noisy complex values
};

/// Joint bilateral estimate of the thresholded magnitudes, weighted by
/// similarity of the noisy coefficients. Windows are truncated at the borders
/// and renormalized over in-bounds samples.
RealGrid jbf_magnitude(const WedgePartition& part, const KernelParams& params,
                       RangeGuide guide = RangeGuide::magnitude);

/// Kept positions return the original coefficient. Elsewhere the estimate
/// (clamped at 0) is attached to the noisy phase.
ComplexGrid recombine(const WedgePartition& part, const RealGrid& estimated_mag);

/// Bilateral filter on complex values with modulus range distance.
ComplexGrid bf_finest(const ComplexGrid& wedge, const KernelParams& params);

/// Classical hard thresholding: zero every coefficient with |Y| <= lambda.
ComplexGrid hard_threshold(const ComplexGrid& wedge, double lambda);

}  // namespace ppct
