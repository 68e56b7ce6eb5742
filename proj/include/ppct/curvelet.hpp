#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "ppct/grid.hpp"
#include "ppct/image.hpp"

namespace ppct {

enum class FinestMode { wavelet, curvelet };

std::string to_string(FinestMode mode);
FinestMode finest_mode_from_string(const std::string& name);

/// Layout of the wrapping curvelet transform.
///
/// Scales are numbered 1..nscales from the coarsest (a single lowpass wedge)
/// to the finest. The second-coarsest scale carries `nangles_coarse`
/// orientations and the count doubles every other scale towards the finest.
/// In wavelet mode the finest scale is one isotropic wedge.
struct FdctConfig {
    int nscales = 0;
    int nangles_coarse = 16;
    FinestMode finest = FinestMode::wavelet;

    friend bool operator==(const FdctConfig&, const FdctConfig&) = default;
};

/// nscales = ceil(log2(min(width, height))) - 3, 16 coarse angles, wavelet finest.
FdctConfig default_config(int width, int height);

/// Throws std::invalid_argument when `config` cannot be used at this size.
void validate_config(const FdctConfig& config, int width, int height);

/// Number of wedges at `scale` (1-based).
int wedges_at_scale(const FdctConfig& config, int scale);

struct Wedge {
    int scale = 0;        // 1-based
    int orientation = 0;  // 1-based
    ComplexGrid coeffs;

    int rows() const noexcept { return coeffs.rows(); }
    int cols() const noexcept { return coeffs.cols(); }
};

struct CurveletCoeffs {
    int width = 0;
    int height = 0;
    FdctConfig config;
    std::vector<std::vector<Wedge>> scales;  // scales[s - 1][o - 1]

    Wedge& wedge(int scale, int orientation) { return scales.at(scale - 1).at(orientation - 1); }
    const Wedge& wedge(int scale, int orientation) const { return scales.at(scale - 1).at(orientation - 1); }
    int nscales() const noexcept { return static_cast<int>(scales.size()); }
    std::size_t total_size() const noexcept;

    /// Zero-filled coefficients with the layout of `like`.
    static CurveletCoeffs zeros_like(const CurveletCoeffs& like);
};

/// Orientation whose coefficients are the complex conjugates of those of
/// (scale, orientation) for real images. Single-wedge scales pair with
/// themselves.
int conjugate_orientation(const FdctConfig& config, int scale, int orientation);

/// Frequency windows of one wedge, restricted to their support.
struct WedgeWindow {
    int scale = 0;
    int orientation = 0;
    int rows = 0;  // wrapped rectangle
    int cols = 0;
    std::vector<std::uint32_t> spectrum_index;  // flat index into the natural-order N1 x N2 spectrum
    std::vector<std::uint32_t> wrapped_index;   // flat index into the rows x cols rectangle
    std::vector<double> weight;
};

/// Precomputed window set for one (config, width, height). The squared
/// windows form a partition of unity over the whole DFT grid.
class WindowSet {
public:
    WindowSet(const FdctConfig& config, int width, int height);

    const FdctConfig& config() const noexcept { return config_; }
    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    const WedgeWindow& window(int scale, int orientation) const;
    const std::vector<std::vector<WedgeWindow>>& windows() const noexcept { return windows_; }

    /// Dense (height x width) window in natural FFT order.
    RealGrid dense_window(int scale, int orientation) const;

    /// max over frequencies of |sum of squared windows - 1|.
    double partition_of_unity_error() const;

private:
    FdctConfig config_;
    int width_;
    int height_;
    std::vector<std::vector<WedgeWindow>> windows_;
};

std::shared_ptr<const WindowSet> build_windows(const FdctConfig& config, int width, int height);

/// Wrapping fast discrete curvelet transform. Unitary normalization: the
/// transform is a Parseval tight frame and `inverse` is its adjoint.
class CurveletTransform {
public:
    CurveletTransform(const FdctConfig& config, int width, int height);
    explicit CurveletTransform(std::shared_ptr<const WindowSet> windows);

    const FdctConfig& config() const noexcept { return windows_->config(); }
    int width() const noexcept { return windows_->width(); }
    int height() const noexcept { return windows_->height(); }
    const WindowSet& windows() const noexcept { return *windows_; }

    CurveletCoeffs forward(const Image& image) const;
    CurveletCoeffs forward(const ComplexGrid& image) const;

    /// Complex reconstruction, before discarding the imaginary part.
    ComplexGrid inverse_complex(const CurveletCoeffs& coeffs) const;
    Image inverse(const CurveletCoeffs& coeffs) const;

private:
    std::shared_ptr<const WindowSet> windows_;

    void check_layout(const CurveletCoeffs& coeffs) const;
};

CurveletCoeffs forward(const Image& image, const FdctConfig& config);
Image inverse(const CurveletCoeffs& coeffs, const FdctConfig& config);

double coeff_energy(const CurveletCoeffs& coeffs);

/// One file per wedge named `wedge_<scale>_<orientation>.bin`: little-endian
/// uint32 {scale, orientation, rows, cols} followed by rows*cols interleaved
/// (re, im) float64 values.
void dump_coefficients(const CurveletCoeffs& coeffs, const std::filesystem::path& directory);
Wedge read_wedge_dump(const std::filesystem::path& file);

}  // namespace ppct
