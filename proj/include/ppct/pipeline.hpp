#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ppct/calibration.hpp"
#include "ppct/coeff_filters.hpp"
#include "ppct/curvelet.hpp"
#include "ppct/image.hpp"

namespace ppct {

struct DenoiseParams {
    double k = 2.0;
    std::vector<double> k_per_scale;  // overrides k when non-empty
    double alpha = 0.04;
    double sigma_d_coarse = 1.9;
    std::optional<double> k_r;  // unset: 3.5 for sigma <= 40, else 11
    double sigma_d_fine = 1.27;
    double k1 = 1.3;
    int gif_radius = 2;
    bool gif_eps_squared = false;
    bool jbf_enabled = true;  // false: below-threshold magnitudes stay hard-thresholded
    RangeGuide jbf_guide = RangeGuide::magnitude;
    FdctConfig fdct;

    double range_multiple(double sigma) const;
    void validate() const;
};

/// Defaults with the transform layout chosen for the image size.
DenoiseParams default_params(int width, int height);

struct DenoiseResult {
    Image before_gif;
    Image output;
    CurveletCoeffs filtered;     // coefficients fed to the inverse transform
    double imaginary_residue = 0.0;  // max |imag| of the reconstruction
};

/// Coefficient-domain part of the denoiser: lowpass untouched, threshold and
/// joint bilateral magnitude estimate on the band scales, bilateral filter on
/// the finest scale, then conjugate pairs re-symmetrized.
CurveletCoeffs filter_coefficients(const CurveletCoeffs& noisy, double sigma, const DenoiseParams& params,
                                   const NoiseProfile& profile);

DenoiseResult denoise_detailed(const Image& noisy, double sigma, const DenoiseParams& params,
                               const NoiseProfile& profile);

Image denoise(const Image& noisy, double sigma, const DenoiseParams& params, const NoiseProfile& profile);

/// Hard threshold every non-lowpass coefficient, finest scale included.
CurveletCoeffs hard_threshold_coefficients(const CurveletCoeffs& noisy, const Thresholds& lambda);

Image ct_baseline(const Image& noisy, double sigma, double k, const NoiseProfile& profile);

/// (before GIF, after GIF).
std::pair<Image, Image> gif_ablation(const Image& noisy, double sigma, const DenoiseParams& params,
                                     const NoiseProfile& profile);

/// Averages each wedge with the conjugate of its partner; self-paired
/// wedges keep their real part.
void impose_conjugate_symmetry(CurveletCoeffs& coeffs);

}  // namespace ppct
