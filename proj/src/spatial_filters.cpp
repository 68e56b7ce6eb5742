#include "ppct/spatial_filters.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ppct {

void GifParams::validate() const
{
    if (radius < 1)
        throw std::invalid_argument("guided filter radius must be at least 1");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
        throw std::invalid_argument("guided filter epsilon must be non-negative");
}

namespace {

// Clipped-window mean along one axis of a strided line.
void line_mean(const double* in, double* out, int n, std::ptrdiff_t stride, int radius, std::vector<double>& prefix)
{
    prefix.assign(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = 0; i < n; ++i)
        prefix[i + 1] = prefix[i] + in[i * stride];
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - radius);
        const int hi = std::min(n - 1, i + radius);
        out[i * stride] = (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1);
    }
}

}  // namespace

Image box_mean(const Image& image, int radius)
{
    if (radius < 1)
        throw std::invalid_argument("box radius must be at least 1");
    const int w = image.width(), h = image.height();
    std::vector<double> tmp(image.size()), out(image.size()), prefix;
    const double* src = image.pixels().data();
    for (int r = 0; r < h; ++r)
        line_mean(src + static_cast<std::ptrdiff_t>(r) * w, tmp.data() + static_cast<std::ptrdiff_t>(r) * w, w, 1,
                  radius, prefix);
    for (int c = 0; c < w; ++c)
        line_mean(tmp.data() + c, out.data() + c, h, w, radius, prefix);
    return Image(w, h, std::move(out));
}

Image guided_filter_self(const Image& image, const GifParams& params)
{
    params.validate();
    const std::size_t n = image.size();
    const auto x = image.pixels();

    Image sq(image.width(), image.height());
    for (std::size_t i = 0; i < n; ++i)
        sq.pixels()[i] = x[i] * x[i];
    const Image mean = box_mean(image, params.radius);
    const Image mean_sq = box_mean(sq, params.radius);

    Image a(image.width(), image.height()), b(image.width(), image.height());
    for (std::size_t i = 0; i < n; ++i) {
        const double mu = mean.pixels()[i];
        const double var = std::max(mean_sq.pixels()[i] - mu * mu, 0.0);
        const double denom = var + params.epsilon;
        const double ai = denom > 0.0 ? var / denom : 0.0;
        a.pixels()[i] = ai;
        b.pixels()[i] = (1.0 - ai) * mu;
    }
    const Image a_bar = box_mean(a, params.radius);
    const Image b_bar = box_mean(b, params.radius);

    Image out(image.width(), image.height());
    for (std::size_t i = 0; i < n; ++i)
        out.pixels()[i] = a_bar.pixels()[i] * x[i] + b_bar.pixels()[i];
    return out;
}

double gif_epsilon(double k1, double sigma, bool squared)
{
    if (!(k1 >= 0.0) || !(sigma >= 0.0))
        throw std::invalid_argument("guided filter k1 and sigma must be non-negative");
    const double e = k1 * sigma;
    return squared ? e * e : e;
}

}  // namespace ppct
