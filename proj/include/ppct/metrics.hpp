#pragma once

#include <span>

#include "ppct/calibration.hpp"
#include "ppct/curvelet.hpp"
#include "ppct/image.hpp"

namespace ppct {

/// +infinity when the images are identical.
double psnr(const Image& reference, const Image& test, double peak = 255.0);

/// Mean SSIM over valid positions of an 11x11 Gaussian window (sigma 1.5),
/// K1 = 0.01, K2 = 0.03, L = 255.
double ssim(const Image& reference, const Image& test);

/// Pearson correlation of the 4-neighbour Laplacians (replicate border).
double eki(const Image& reference, const Image& test);

double pearson(std::span<const double> a, std::span<const double> b);

/// 4-neighbour Laplacian with replicated border samples.
Image laplacian(const Image& image);

/// Copy with every pixel clamped to [0, 255].
Image clamp_to_range(const Image& image);

struct MetricsReport {
    double psnr = 0.0;
    double ssim = 0.0;
    double eki = 0.0;
};

MetricsReport evaluate(const Image& reference, const Image& test);

/// Correlation between clean and estimated magnitudes over the noise
/// subspace of one scale: every position of every orientation of `scale`
/// where |noisy| < lambda.
double noise_subspace_correlation(const CurveletCoeffs& clean, const CurveletCoeffs& estimated,
                                  const CurveletCoeffs& noisy, const Thresholds& lambda, int scale);

}  // namespace ppct
