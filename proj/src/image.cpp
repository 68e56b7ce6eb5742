#include "ppct/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ppct {

namespace {

void check_finite(std::span<const double> values)
{
    for (double v : values)
        if (!std::isfinite(v))
            throw std::invalid_argument("image pixels must be finite");
}

}  // namespace

Image::Image(int width, int height, double fill) : grid_(height, width, fill)
{
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("image dimensions must be positive");
    if (!std::isfinite(fill))
        throw std::invalid_argument("image pixels must be finite");
}

Image::Image(int width, int height, std::vector<double> pixels)
{
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("image dimensions must be positive");
    grid_ = RealGrid(height, width, std::move(pixels));
    check_finite(grid_.values());
}

Image::Image(RealGrid grid) : grid_(std::move(grid))
{
    if (grid_.rows() <= 0 || grid_.cols() <= 0)
        throw std::invalid_argument("image dimensions must be positive");
    check_finite(grid_.values());
}

GaussianSource::GaussianSource(RngSeed seed) : engine_(seed.value) {}

double GaussianSource::next_unit()
{
    // 53 random bits mapped onto (-1, 1).
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-52 - 1.0;
}

double GaussianSource::next()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = next_unit();
        v = next_unit();
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
}

RngSeed derive_seed(RngSeed base, std::uint64_t stream)
{
    std::uint64_t z = base.value + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return RngSeed{z ^ (z >> 31)};
}

double bt601_luma(double r, double g, double b)
{
    return 0.299 * r + 0.587 * g + 0.114 * b;
}

Image add_awgn(const Image& image, double sigma, RngSeed seed)
{
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("noise sigma must be a finite non-negative number");
    Image out = image;
    if (sigma == 0.0)
        return out;
    GaussianSource gauss(seed);
    for (double& p : out.pixels())
        p += sigma * gauss.next();
    return out;
}

Image white_noise(int width, int height, RngSeed seed)
{
    Image out(width, height);
    GaussianSource gauss(seed);
    for (double& p : out.pixels())
        p = gauss.next();
    return out;
}

Image resize_bilinear(const Image& image, int new_width, int new_height)
{
    if (new_width < 1 || new_height < 1)
        throw std::invalid_argument("resize target dimensions must be at least 1");
    const int w = image.width();
    const int h = image.height();
    if (w == new_width && h == new_height)
        return image;

    struct Tap {
        int i0, i1;
        double f;
    };
    auto taps = [](int src, int dst) {
        std::vector<Tap> t(dst);
        const double scale = static_cast<double>(src) / dst;
        for (int i = 0; i < dst; ++i) {
            double x = (i + 0.5) * scale - 0.5;
            x = std::clamp(x, 0.0, static_cast<double>(src - 1));
            const int i0 = static_cast<int>(std::floor(x));
            const int i1 = std::min(i0 + 1, src - 1);
            t[i] = {i0, i1, x - i0};
        }
        return t;
    };
    const auto tx = taps(w, new_width);
    const auto ty = taps(h, new_height);

    Image out(new_width, new_height);
    for (int r = 0; r < new_height; ++r) {
        const Tap& y = ty[r];
        for (int c = 0; c < new_width; ++c) {
            const Tap& x = tx[c];
            const double top = image(y.i0, x.i0) * (1.0 - x.f) + image(y.i0, x.i1) * x.f;
            const double bottom = image(y.i1, x.i0) * (1.0 - x.f) + image(y.i1, x.i1) * x.f;
            out(r, c) = top * (1.0 - y.f) + bottom * y.f;
        }
    }
    return out;
}

std::uint8_t quantize_pixel(double value)
{
    if (!(value > 0.0))
        return 0;
    if (value >= 255.0)
        return 255;
    return static_cast<std::uint8_t>(std::floor(value + 0.5));
}

}  // namespace ppct
