#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

#include "ppct/grid.hpp"

namespace ppct {

/// Grayscale image with double-precision pixels. Nominal range is [0, 255]
/// but values are never clamped until written to disk.
class Image {
public:
    Image() = default;
    Image(int width, int height, double fill = 0.0);
    Image(int width, int height, std::vector<double> pixels);
    explicit Image(RealGrid grid);

    int width() const noexcept { return grid_.cols(); }
    int height() const noexcept { return grid_.rows(); }
    std::size_t size() const noexcept { return grid_.size(); }

    double operator()(int row, int col) const noexcept { return grid_(row, col); }
    double& operator()(int row, int col) noexcept { return grid_(row, col); }

    std::span<const double> pixels() const noexcept { return grid_.values(); }
    std::span<double> pixels() noexcept { return grid_.values(); }

    const RealGrid& grid() const noexcept { return grid_; }

    bool same_shape(const Image& other) const noexcept { return grid_.same_shape(other.grid_); }

    friend bool operator==(const Image&, const Image&) = default;

private:
    RealGrid grid_;
};

/// Seed for every stochastic operation; equal seeds give bit-identical draws.
struct RngSeed {
    std::uint64_t value = 0;
    friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

/// Deterministic standard-normal generator: mt19937_64 feeding the Marsaglia
/// polar method. Unlike std::normal_distribution its output is fixed across
/// standard library implementations.
class GaussianSource {
public:
    explicit GaussianSource(RngSeed seed);
    double next();

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;

    double next_unit();  // uniform in (-1, 1)
};

/// Mixes a base seed with a stream index (splitmix64 finalizer).
RngSeed derive_seed(RngSeed base, std::uint64_t stream);

double bt601_luma(double r, double g, double b);

Image add_awgn(const Image& image, double sigma, RngSeed seed);

/// Unit-variance white Gaussian field.
Image white_noise(int width, int height, RngSeed seed);

/// Bilinear resampling with pixel-centre alignment and edge-clamped taps.
Image resize_bilinear(const Image& image, int new_width, int new_height);

/// Loads PGM (P2/P5, maxval 255) or 8-bit gray/RGB(A)/palette PNG; color is
/// reduced to BT.601 luma.
Image load_image(const std::filesystem::path& path);

/// Writes PGM P5 or PNG depending on the extension. Pixels are clamped to
/// [0, 255] and rounded half-up.
void save_image(const Image& image, const std::filesystem::path& path);

std::uint8_t quantize_pixel(double value);

}  // namespace ppct
