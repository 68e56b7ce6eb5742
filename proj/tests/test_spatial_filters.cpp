#include <cmath>

#include "doctest.h"
#include "ppct/spatial_filters.hpp"
#include "test_support.hpp"

using namespace ppct;

namespace {

double window_mean(const Image& img, int r, int c, int radius)
{
    double sum = 0.0;
    int n = 0;
    for (int i = std::max(0, r - radius); i <= std::min(img.height() - 1, r + radius); ++i)
        for (int j = std::max(0, c - radius); j <= std::min(img.width() - 1, c + radius); ++j) {
            sum += img(i, j);
            ++n;
        }
    return sum / n;
}

Image box_oracle(const Image& img, int radius)
{
    Image out(img.width(), img.height());
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c)
            out(r, c) = window_mean(img, r, c, radius);
    return out;
}

Image gif_oracle(const Image& img, int radius, double eps)
{
    Image sq(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i)
        sq.pixels()[i] = img.pixels()[i] * img.pixels()[i];
    const Image mean = box_oracle(img, radius), mean_sq = box_oracle(sq, radius);
    Image a(img.width(), img.height()), b(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double var = std::max(0.0, mean_sq.pixels()[i] - mean.pixels()[i] * mean.pixels()[i]);
        const double ai = var + eps > 0.0 ? var / (var + eps) : 0.0;
        a.pixels()[i] = ai;
        b.pixels()[i] = (1.0 - ai) * mean.pixels()[i];
    }
    const Image ma = box_oracle(a, radius), mb = box_oracle(b, radius);
    Image out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i)
        out.pixels()[i] = ma.pixels()[i] * img.pixels()[i] + mb.pixels()[i];
    return out;
}

}  // namespace

TEST_CASE("box mean matches direct window averages")
{
    for (int radius : {1, 2, 4}) {
        const Image img = testing::random_image(16, 16, 40 + radius);
        CHECK(testing::max_abs_diff(box_mean(img, radius), box_oracle(img, radius)) < 1e-10);
    }
    const Image tall = testing::random_image(5, 13, 3);
    CHECK(testing::max_abs_diff(box_mean(tall, 3), box_oracle(tall, 3)) < 1e-10);
    // Radius larger than the image: every output is the global mean.
    const Image all = box_mean(tall, 40);
    for (double v : all.pixels())
        CHECK(v == doctest::Approx(window_mean(tall, 0, 0, 40)));
}

TEST_CASE("box mean of an impulse and a constant")
{
    Image impulse(9, 9, 0.0);
    impulse(4, 4) = 1.0;
    const Image m = box_mean(impulse, 1);
    CHECK(m(4, 4) == doctest::Approx(1.0 / 9.0));
    CHECK(m(3, 5) == doctest::Approx(1.0 / 9.0));
    CHECK(m(2, 4) == 0.0);
    const Image flat = box_mean(Image(7, 6, 42.0), 2);
    for (double v : flat.pixels())
        CHECK(v == doctest::Approx(42.0));
    CHECK_THROWS_AS(box_mean(impulse, -1), std::invalid_argument);
}

TEST_CASE("guided filter matches the direct formulation")
{
    Image ramp(5, 5);
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c)
            ramp(r, c) = 10.0 * c + 3.0 * r;
    CHECK(testing::max_abs_diff(guided_filter_self(ramp, {1, 4.0}), gif_oracle(ramp, 1, 4.0)) < 1e-10);

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Image img = testing::random_image(12 + static_cast<int>(seed), 9, seed);
        const int radius = 1 + static_cast<int>(seed % 3);
        const double eps = 10.0 * static_cast<double>(seed);
        CHECK(testing::max_abs_diff(guided_filter_self(img, {radius, eps}), gif_oracle(img, radius, eps)) < 1e-8);
    }
}

TEST_CASE("guided filter limits")
{
    const Image img = testing::random_image(20, 14, 8);
    // eps == 0: a == 1 wherever the window has variance, the filter is the identity.
    CHECK(testing::max_abs_diff(guided_filter_self(img, {2, 0.0}), img) < 1e-8);
    const Image flat = guided_filter_self(Image(6, 6, 17.0), {2, 5.0});
    for (double v : flat.pixels())
        CHECK(v == doctest::Approx(17.0));
    const Image flat0 = guided_filter_self(Image(6, 6, 17.0), {2, 0.0});
    for (double v : flat0.pixels())
        CHECK(v == doctest::Approx(17.0));

    const Image out = guided_filter_self(img, {2, 50.0});
    const auto [lo, hi] = std::minmax_element(img.pixels().begin(), img.pixels().end());
    for (double v : out.pixels()) {
        CHECK(v >= *lo - 1e-9);
        CHECK(v <= *hi + 1e-9);
    }
}

TEST_CASE("guided filter smooths more as eps grows")
{
    const Image img = testing::random_image(24, 24, 19);
    const auto roughness = [](const Image& x) {
        double s = 0.0;
        for (int r = 0; r < x.height(); ++r)
            for (int c = 1; c < x.width(); ++c)
                s += std::abs(x(r, c) - x(r, c - 1));
        return s;
    };
    double prev = roughness(img);
    for (double eps : {10.0, 100.0, 1000.0, 10000.0}) {
        const double cur = roughness(guided_filter_self(img, {2, eps}));
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("guided filter parameters")
{
    CHECK(gif_epsilon(1.3, 40.0, false) == doctest::Approx(52.0));
    CHECK(gif_epsilon(1.3, 40.0, true) == doctest::Approx(2704.0));
    CHECK_THROWS_AS((GifParams{0, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((GifParams{2, -1.0}.validate()), std::invalid_argument);
    CHECK_NOTHROW((GifParams{1, 0.0}.validate()));
}
