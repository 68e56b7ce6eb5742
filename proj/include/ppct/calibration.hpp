#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "ppct/curvelet.hpp"
#include "ppct/image.hpp"

namespace ppct {

/// Per-wedge standard deviation of the curvelet coefficients of unit-variance
/// white noise, estimated by Monte Carlo.
struct NoiseProfile {
    int width = 0;
    int height = 0;
    FdctConfig config;
    int trials = 0;
    RngSeed seed;
    std::vector<std::vector<double>> sigma;  // sigma[scale - 1][orientation - 1]

    double at(int scale, int orientation) const { return sigma.at(scale - 1).at(orientation - 1); }

    bool matches(const FdctConfig& cfg, int w, int h) const noexcept
    {
        return cfg == config && w == width && h == height;
    }
};

/// Pools the real and imaginary parts of every coefficient of a wedge over all
/// trials: sigma^2 = mean(re^2 + im^2), the expected per-coefficient energy of
/// zero-mean noise. Trials use independent streams derived from `seed`.
NoiseProfile monte_carlo_profile(int width, int height, const FdctConfig& config, int trials, RngSeed seed);

/// Closed-form counterpart of monte_carlo_profile: for white noise the expected
/// energy of a wedge is its squared window mass spread over its coefficients.
NoiseProfile analytic_profile(const WindowSet& windows);

void save_profile(const NoiseProfile& profile, const std::filesystem::path& path);
NoiseProfile load_profile(const std::filesystem::path& path);

/// lambda[scale - 1][orientation - 1] = k * sigma * sigma_go.
using Thresholds = std::vector<std::vector<double>>;

Thresholds thresholds(const NoiseProfile& profile, double sigma, double k);

/// Per-scale k (k_per_scale[scale - 1]).
Thresholds thresholds(const NoiseProfile& profile, double sigma, std::span<const double> k_per_scale);

struct SensitivityInputs {
    double mag_z = 0.0;
    double mag_n = 0.0;
    double phase_z = 0.0;
    double phase_n = 0.0;
};

/// d|Y|/d|N| for Y = Z + N.
double magnitude_sensitivity(const SensitivityInputs& s);

/// d(arg Y)/d|N| for Y = Z + N.
double phase_sensitivity(const SensitivityInputs& s);

struct SensitivityCurves {
    std::vector<double> sigma;      // upper noise level of each consecutive pair
    std::vector<double> magnitude;  // min-max normalized
    std::vector<double> phase;      // min-max normalized
    std::vector<double> raw_magnitude;
    std::vector<double> raw_phase;
};

/// Empirical noise sensitivity over a grid of noise levels. A single unit
/// noise field n is drawn from `seed` and scaled to each level. For each pair
/// of consecutive levels, the mean absolute change of |Y| (resp. wrapped
/// arg Y) across all coefficients is divided by the mean absolute change of
/// |N|. Both sequences are then min-max normalized to [0, 1].
SensitivityCurves empirical_sensitivity_curves(const Image& image, std::span<const double> sigma_grid,
                                               const FdctConfig& config, RngSeed seed);

/// Min-max normalization; a constant sequence maps to all zeros.
std::vector<double> min_max_normalize(std::span<const double> values);

double least_squares_slope(std::span<const double> x, std::span<const double> y);

enum class PdfQuantity { real_part, magnitude };

struct Histogram {
    double lo = 0.0;
    double bin_width = 0.0;
    std::vector<double> density;  // integrates to 1: sum(density) * bin_width == 1

    double center(std::size_t bin) const { return lo + (static_cast<double>(bin) + 0.5) * bin_width; }
};

Histogram coefficient_pdf(const CurveletCoeffs& coeffs, int scale, int orientation, int bins,
                          PdfQuantity quantity = PdfQuantity::real_part);

/// Sample excess kurtosis m4 / m2^2 - 3 of the chosen quantity of one wedge.
double wedge_excess_kurtosis(const CurveletCoeffs& coeffs, int scale, int orientation,
                             PdfQuantity quantity = PdfQuantity::real_part);

}  // namespace ppct
