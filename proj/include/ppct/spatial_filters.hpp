#pragma once

#include "ppct/image.hpp"

namespace ppct {

struct GifParams {
    int radius = 2;
    double epsilon = 0.0;  // intensity^2 units

    void validate() const;
};

/// Mean over the (2r+1)^2 window clipped to the image. Running sums keep the
/// cost independent of the radius.
Image box_mean(const Image& image, int radius);

/// Self-guided filter: per window a = var / (var + eps), b = (1 - a) * mean;
/// the output is box_mean(a) * input + box_mean(b).
Image guided_filter_self(const Image& image, const GifParams& params);

/// eps = k1 * sigma, or (k1 * sigma)^2 when `squared` is set.
double gif_epsilon(double k1, double sigma, bool squared);

}  // namespace ppct
