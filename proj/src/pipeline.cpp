#include "ppct/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ppct/spatial_filters.hpp"

namespace ppct {

double DenoiseParams::range_multiple(double sigma) const
{
    if (k_r)
        return *k_r;
    return sigma <= 40.0 ? 3.5 : 11.0;
}

void DenoiseParams::validate() const
{
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string(name) + " must be positive");
    };
    positive(k, "k");
    for (double v : k_per_scale)
        positive(v, "per-scale k");
    if (!k_per_scale.empty() && k_per_scale.size() != static_cast<std::size_t>(fdct.nscales))
        throw std::invalid_argument("per-scale k needs one value per scale");
    positive(alpha, "alpha");
    positive(sigma_d_coarse, "sigma_d_coarse");
    if (k_r)
        positive(*k_r, "k_r");
    positive(sigma_d_fine, "sigma_d_fine");
    positive(k1, "k1");
    if (gif_radius < 1)
        throw std::invalid_argument("gif_radius must be at least 1");
}

DenoiseParams default_params(int width, int height)
{
    DenoiseParams p;
    p.fdct = default_config(width, height);
    return p;
}

namespace {

void check_inputs(const Image& noisy, double sigma, const FdctConfig& config, const NoiseProfile& profile)
{
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("noise sigma must be non-negative");
    if (!profile.matches(config, noisy.width(), noisy.height()))
        throw std::invalid_argument("noise profile was calibrated for a different image size or transform layout");
}

Thresholds pipeline_thresholds(const NoiseProfile& profile, double sigma, const DenoiseParams& params)
{
    if (params.k_per_scale.empty())
        return thresholds(profile, sigma, params.k);
    return thresholds(profile, sigma, params.k_per_scale);
}

}  // namespace

void impose_conjugate_symmetry(CurveletCoeffs& coeffs)
{
    for (int s = 1; s <= coeffs.nscales(); ++s) {
        auto& scale = coeffs.scales[s - 1];
        for (int o = 1; o <= static_cast<int>(scale.size()); ++o) {
            const int p = conjugate_orientation(coeffs.config, s, o);
            auto& a = scale[o - 1].coeffs;
            if (p == o) {
                for (Complex& c : a.values())
                    c = Complex(c.real(), 0.0);
                continue;
            }
            if (p < o)
                continue;
            auto& b = scale[p - 1].coeffs;
            if (!a.same_shape(b))
                throw std::logic_error("conjugate wedges differ in shape");
            for (std::size_t i = 0; i < a.size(); ++i) {
                const Complex avg = 0.5 * (a[i] + std::conj(b[i]));
                a[i] = avg;
                b[i] = std::conj(avg);
            }
        }
    }
}

CurveletCoeffs filter_coefficients(const CurveletCoeffs& noisy, double sigma, const DenoiseParams& params,
                                   const NoiseProfile& profile)
{
    params.validate();
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("noise sigma must be non-negative");
    if (!profile.matches(noisy.config, noisy.width, noisy.height))
        throw std::invalid_argument("noise profile was calibrated for a different image size or transform layout");
    const Thresholds lambda = pipeline_thresholds(profile, sigma, params);
    const int finest = noisy.nscales();

    CurveletCoeffs out = noisy;
    for (int s = 2; s < finest; ++s) {
        for (Wedge& w : out.scales[s - 1]) {
            const WedgePartition part = partition_wedge(w.coeffs, lambda[s - 1][w.orientation - 1]);
            if (!params.jbf_enabled) {
                w.coeffs = recombine(part, part.thresholded);
                continue;
            }
            const auto [lo, hi] = std::minmax_element(part.noisy_mag.values().begin(), part.noisy_mag.values().end());
            const double range = part.noisy_mag.empty() ? 0.0 : *hi - *lo;
            const auto kernel = KernelParams::from_falloffs(params.sigma_d_coarse, params.alpha * range);
            w.coeffs = recombine(part, jbf_magnitude(part, kernel, params.jbf_guide));
        }
    }

    // Finest scale: no thresholding, only the bilateral filter whose range
    // falloff is tied to the finest-scale threshold.
    const double kr = params.range_multiple(sigma);
    for (Wedge& w : out.scales[finest - 1]) {
        const auto kernel = KernelParams::from_falloffs(params.sigma_d_fine, kr * lambda[finest - 1][w.orientation - 1]);
        w.coeffs = bf_finest(w.coeffs, kernel);
    }

    impose_conjugate_symmetry(out);
    return out;
}

namespace {

Image real_part(const ComplexGrid& z, double& residue)
{
    std::vector<double> re(z.size());
    residue = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        re[i] = z[i].real();
        residue = std::max(residue, std::abs(z[i].imag()));
    }
    return Image(z.cols(), z.rows(), std::move(re));
}

}  // namespace

DenoiseResult denoise_detailed(const Image& noisy, double sigma, const DenoiseParams& params,
                               const NoiseProfile& profile)
{
    params.validate();
    check_inputs(noisy, sigma, params.fdct, profile);
    const CurveletTransform transform(params.fdct, noisy.width(), noisy.height());

    DenoiseResult result;
    result.filtered = filter_coefficients(transform.forward(noisy), sigma, params, profile);
    result.before_gif = real_part(transform.inverse_complex(result.filtered), result.imaginary_residue);
    const GifParams gif{params.gif_radius, gif_epsilon(params.k1, sigma, params.gif_eps_squared)};
    result.output = guided_filter_self(result.before_gif, gif);
    return result;
}

Image denoise(const Image& noisy, double sigma, const DenoiseParams& params, const NoiseProfile& profile)
{
    return denoise_detailed(noisy, sigma, params, profile).output;
}

CurveletCoeffs hard_threshold_coefficients(const CurveletCoeffs& noisy, const Thresholds& lambda)
{
    if (lambda.size() != static_cast<std::size_t>(noisy.nscales()))
        throw std::invalid_argument("thresholds do not match the coefficient layout");
    CurveletCoeffs out = noisy;
    for (int s = 2; s <= out.nscales(); ++s)
        for (Wedge& w : out.scales[s - 1])
            w.coeffs = hard_threshold(w.coeffs, lambda[s - 1].at(w.orientation - 1));
    return out;
}

Image ct_baseline(const Image& noisy, double sigma, double k, const NoiseProfile& profile)
{
    check_inputs(noisy, sigma, profile.config, profile);
    const CurveletTransform transform(profile.config, noisy.width(), noisy.height());
    const CurveletCoeffs filtered = hard_threshold_coefficients(transform.forward(noisy), thresholds(profile, sigma, k));
    return transform.inverse(filtered);
}

std::pair<Image, Image> gif_ablation(const Image& noisy, double sigma, const DenoiseParams& params,
                                     const NoiseProfile& profile)
{
    DenoiseResult r = denoise_detailed(noisy, sigma, params, profile);
    return {std::move(r.before_gif), std::move(r.output)};
}

}  // namespace ppct
