#include "ppct/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace ppct {

namespace {

void require_same_shape(const Image& a, const Image& b)
{
    if (!a.same_shape(b))
        throw std::invalid_argument("images differ in size: " + std::to_string(a.width()) + "x" +
                                    std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                                    std::to_string(b.height()));
}

}  // namespace

double psnr(const Image& reference, const Image& test, double peak)
{
    require_same_shape(reference, test);
    if (reference.size() == 0)
        throw std::invalid_argument("PSNR of empty images");
    double sse = 0.0;
    const auto a = reference.pixels(), b = test.pixels();
    for (std::size_t i = 0; i < a.size(); ++i)
        sse += (a[i] - b[i]) * (a[i] - b[i]);
    if (sse == 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / (sse / static_cast<double>(a.size())));
}

namespace {

constexpr int kSsimWindow = 11;

std::array<double, kSsimWindow> ssim_kernel()
{
    std::array<double, kSsimWindow> k{};
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
        const double d = i - kSsimWindow / 2;
        k[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
        sum += k[i];
    }
    for (double& v : k)
        v /= sum;
    return k;
}

// 'valid' separable correlation with the SSIM window.
std::vector<double> filter_valid(const std::vector<double>& in, int w, int h)
{
    static const auto k = ssim_kernel();
    const int ow = w - kSsimWindow + 1, oh = h - kSsimWindow + 1;
    std::vector<double> tmp(static_cast<std::size_t>(h) * ow), out(static_cast<std::size_t>(oh) * ow);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < ow; ++c) {
            double s = 0.0;
            for (int i = 0; i < kSsimWindow; ++i)
                s += k[i] * in[static_cast<std::size_t>(r) * w + c + i];
            tmp[static_cast<std::size_t>(r) * ow + c] = s;
        }
    for (int r = 0; r < oh; ++r)
        for (int c = 0; c < ow; ++c) {
            double s = 0.0;
            for (int i = 0; i < kSsimWindow; ++i)
                s += k[i] * tmp[static_cast<std::size_t>(r + i) * ow + c];
            out[static_cast<std::size_t>(r) * ow + c] = s;
        }
    return out;
}

}  // namespace

double ssim(const Image& reference, const Image& test)
{
    require_same_shape(reference, test);
    const int w = reference.width(), h = reference.height();
    if (w < kSsimWindow || h < kSsimWindow)
        throw std::invalid_argument("SSIM needs images of at least 11x11");
    const auto a = reference.pixels(), b = test.pixels();
    const std::size_t n = a.size();
    std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end()), xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    const auto mx = filter_valid(x, w, h), my = filter_valid(y, w, h);
    const auto sxx = filter_valid(xx, w, h), syy = filter_valid(yy, w, h), sxy = filter_valid(xy, w, h);

    const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double c2 = (0.03 * 255.0) * (0.03 * 255.0);
    double total = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
        const double vx = sxx[i] - mx[i] * mx[i];
        const double vy = syy[i] - my[i] * my[i];
        const double cov = sxy[i] - mx[i] * my[i];
        total += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2)) /
                 ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    return total / static_cast<double>(mx.size());
}

Image laplacian(const Image& image)
{
    const int w = image.width(), h = image.height();
    Image out(w, h);
    for (int r = 0; r < h; ++r) {
        const int up = std::max(r - 1, 0), down = std::min(r + 1, h - 1);
        for (int c = 0; c < w; ++c) {
            const int left = std::max(c - 1, 0), right = std::min(c + 1, w - 1);
            out(r, c) = image(up, c) + image(down, c) + image(r, left) + image(r, right) - 4.0 * image(r, c);
        }
    }
    return out;
}

double pearson(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("correlation inputs differ in length");
    if (a.size() < 2)
        throw UndefinedResult("correlation needs at least two samples");
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0)
        throw UndefinedResult("correlation undefined for a constant input");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double eki(const Image& reference, const Image& test)
{
    require_same_shape(reference, test);
    if (reference.width() < 3 || reference.height() < 3)
        throw std::invalid_argument("EKI needs images of at least 3x3");
    const Image la = laplacian(reference), lb = laplacian(test);
    try {
        return pearson(la.pixels(), lb.pixels());
    } catch (const UndefinedResult&) {
        throw UndefinedResult("EKI undefined: Laplacian of an input is constant");
    }
}

Image clamp_to_range(const Image& image)
{
    Image out = image;
    for (double& v : out.pixels())
        v = std::clamp(v, 0.0, 255.0);
    return out;
}

MetricsReport evaluate(const Image& reference, const Image& test)
{
    return MetricsReport{psnr(reference, test), ssim(reference, test), eki(reference, test)};
}

double noise_subspace_correlation(const CurveletCoeffs& clean, const CurveletCoeffs& estimated,
                                  const CurveletCoeffs& noisy, const Thresholds& lambda, int scale)
{
    if (clean.config != noisy.config || estimated.config != noisy.config || clean.width != noisy.width ||
        clean.height != noisy.height || estimated.width != noisy.width || estimated.height != noisy.height)
        throw std::invalid_argument("coefficient sets differ in layout");
    if (scale < 1 || scale > noisy.nscales())
        throw std::invalid_argument("scale " + std::to_string(scale) + " is out of range");
    if (lambda.size() != static_cast<std::size_t>(noisy.nscales()) ||
        lambda[scale - 1].size() != noisy.scales[scale - 1].size())
        throw std::invalid_argument("thresholds do not match the coefficient layout");

    std::vector<double> a, b;
    for (std::size_t o = 0; o < noisy.scales[scale - 1].size(); ++o) {
        const auto y = noisy.scales[scale - 1][o].coeffs.values();
        const auto z = clean.scales[scale - 1][o].coeffs.values();
        const auto e = estimated.scales[scale - 1][o].coeffs.values();
        if (z.size() != y.size() || e.size() != y.size())
            throw std::invalid_argument("wedge sizes differ between coefficient sets");
        const double lam = lambda[scale - 1][o];
        for (std::size_t i = 0; i < y.size(); ++i)
            if (std::abs(y[i]) < lam) {
                a.push_back(std::abs(z[i]));
                b.push_back(std::abs(e[i]));
            }
    }
    if (a.empty())
        throw UndefinedResult("noise subspace at scale " + std::to_string(scale) + " is empty");
    return pearson(a, b);
}

}  // namespace ppct
