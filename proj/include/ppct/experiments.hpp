#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ppct/calibration.hpp"
#include "ppct/image.hpp"
#include "ppct/metrics.hpp"
#include "ppct/pipeline.hpp"

namespace ppct {

struct CorpusImage {
    std::string name;  // file stem
    Image image;
};

/// PNG/PGM files of `directory` in lexicographic order, at most `max_images`
/// of them, resized to size x size when size > 0.
std::vector<CorpusImage> load_corpus(const std::filesystem::path& directory, int max_images, int size);

/// $CURVELET_CACHE_DIR, else $XDG_CACHE_HOME/ppct, else ~/.cache/ppct.
std::filesystem::path profile_cache_dir();
std::filesystem::path profile_cache_path(int width, int height, const FdctConfig& config, int trials, RngSeed seed);

/// Loads the cached Monte Carlo profile or computes and stores it.
NoiseProfile cached_profile(int width, int height, const FdctConfig& config, int trials, RngSeed seed,
                            bool recalibrate = false);

/// Noise stream for image `index` of a batch at noise level `sigma`.
RngSeed noise_seed(RngSeed base, std::size_t index, double sigma);

enum class SubspaceProtocol {
    retransform,  // coefficients of the denoised images
    direct,       // filtered coefficients before the inverse transform
};

struct Table1Row {
    double sigma = 0.0;
    int gamma = 0;
    double ct_corr = 0.0;        // NaN when undefined for every image
    double proposed_corr = 0.0;
    int ct_undefined = 0;        // images whose correlation was undefined
    int proposed_undefined = 0;
};

/// Noise-subspace correlations at every band scale (2 <= gamma < nscales),
/// averaged over the images.
std::vector<Table1Row> noise_subspace_table(const std::vector<CorpusImage>& corpus, const std::vector<double>& sigmas,
                                            const DenoiseParams& params, int trials, RngSeed seed,
                                            SubspaceProtocol protocol = SubspaceProtocol::retransform);

struct CorpusSensitivity {
    std::vector<SensitivityCurves> per_image;
    SensitivityCurves mean_of_normalized;  // per-image curves normalized, then averaged
    SensitivityCurves pooled;              // raw ratios averaged, then normalized
};

CorpusSensitivity corpus_sensitivity(const std::vector<CorpusImage>& corpus, const std::vector<double>& sigma_grid,
                                     const FdctConfig& config, RngSeed seed);

enum class SweepTarget {
    fine,    // p1 = sigma_d_fine, p2 = k_r
    coarse,  // p1 = sigma_d_coarse, p2 = alpha
};

struct SweepCell {
    double p1 = 0.0;
    double p2 = 0.0;
    double psnr = 0.0;
    double ssim = 0.0;
};

/// Mean PSNR/SSIM of the denoiser over the images for every (p1, p2) pair.
/// Rows are ordered by p1, then p2.
std::vector<SweepCell> parameter_sweep(const std::vector<CorpusImage>& corpus, double sigma, SweepTarget target,
                                       const std::vector<double>& p1, const std::vector<double>& p2,
                                       const DenoiseParams& base, int trials, RngSeed seed);

/// Index of the highest-PSNR cell (first one on ties).
std::size_t best_cell(const std::vector<SweepCell>& cells);

/// "a:b:step" (inclusive) or a comma-separated list.
std::vector<double> parse_grid(const std::string& spec);

}  // namespace ppct
