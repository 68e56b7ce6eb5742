#include "ppct/coeff_filters.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ppct {

WedgePartition partition_wedge(const ComplexGrid& wedge, double lambda)
{
    if (!(lambda >= 0.0))
        throw std::invalid_argument("threshold must be non-negative");
    const int rows = wedge.rows(), cols = wedge.cols();
    WedgePartition part{lambda,
                        wedge,
                        Grid<std::uint8_t>(rows, cols, 0),
                        RealGrid(rows, cols),
                        RealGrid(rows, cols),
                        RealGrid(rows, cols)};
    for (std::size_t i = 0; i < wedge.size(); ++i) {
        const double mag = std::abs(wedge[i]);
        part.noisy_mag[i] = mag;
        part.noisy_phase[i] = mag > 0.0 ? std::arg(wedge[i]) : 0.0;
        if (mag > lambda) {
            part.keep_mask[i] = 1;
            part.thresholded[i] = mag;
        }
    }
    return part;
}

KernelParams KernelParams::from_falloffs(double sigma_d, double sigma_r)
{
    KernelParams p{sigma_d, sigma_r, static_cast<int>(std::ceil(3.0 * sigma_d))};
    p.half_width = std::max(p.half_width, 1);
    p.validate();
    return p;
}

void KernelParams::validate() const
{
    if (!(sigma_d > 0.0) || !std::isfinite(sigma_d))
        throw std::invalid_argument("spatial falloff sigma_d must be positive");
    if (!(sigma_r >= 0.0))
        throw std::invalid_argument("range falloff sigma_r must be non-negative");
    if (half_width < 1)
        throw std::invalid_argument("kernel half_width must be at least 1");
}

namespace {

std::vector<double> spatial_table(const KernelParams& p)
{
    const int n = 2 * p.half_width + 1;
    std::vector<double> table(static_cast<std::size_t>(n) * n);
    const double inv = 1.0 / (2.0 * p.sigma_d * p.sigma_d);
    for (int dr = -p.half_width; dr <= p.half_width; ++dr)
        for (int dc = -p.half_width; dc <= p.half_width; ++dc)
            table[static_cast<std::size_t>(dr + p.half_width) * n + (dc + p.half_width)] =
                std::exp(-(dr * dr + dc * dc) * inv);
    return table;
}

// out(U) = sum_r ws(r-U) * exp(-dist(r,U)^2 / 2 sr^2) * data(r) / sum of weights.
template <typename T, typename Dist2>
Grid<T> bilateral(const Grid<T>& data, const KernelParams& p, Dist2 dist2)
{
    const int rows = data.rows(), cols = data.cols();
    const int hw = p.half_width, n = 2 * hw + 1;
    const std::vector<double> ws = spatial_table(p);
    const double inv_r = 1.0 / (2.0 * p.sigma_r * p.sigma_r);
    Grid<T> out(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const int r0 = std::max(0, r - hw), r1 = std::min(rows - 1, r + hw);
        for (int c = 0; c < cols; ++c) {
            const int c0 = std::max(0, c - hw), c1 = std::min(cols - 1, c + hw);
            T acc{};
            double norm = 0.0;
            for (int rr = r0; rr <= r1; ++rr) {
                const double* wrow = &ws[static_cast<std::size_t>(rr - r + hw) * n];
                for (int cc = c0; cc <= c1; ++cc) {
                    const double w = wrow[cc - c + hw] * std::exp(-dist2(rr, cc, r, c) * inv_r);
                    acc += w * data(rr, cc);
                    norm += w;
                }
            }
            // The centre sample has weight 1, so norm >= 1.
            out(r, c) = acc / norm;
        }
    }
    return out;
}

template <typename T>
bool is_constant(const Grid<T>& g)
{
    const auto v = g.values();
    return std::all_of(v.begin(), v.end(), [&](const T& x) { return x == v.front(); });
}

}  // namespace

RealGrid jbf_magnitude(const WedgePartition& part, const KernelParams& params, RangeGuide guide)
{
    params.validate();
    const RealGrid& data = part.thresholded;
    if (!data.same_shape(part.noisy_mag) || !data.same_shape(part.noisy))
        throw std::invalid_argument("wedge partition arrays differ in shape");
    if (params.sigma_r == 0.0 || data.empty() || is_constant(data))
        return data;
    if (guide == RangeGuide::complex_value) {
        const ComplexGrid& y = part.noisy;
        return bilateral(data, params, [&](int r1, int c1, int r2, int c2) { return std::norm(y(r1, c1) - y(r2, c2)); });
    }
    const RealGrid& m = part.noisy_mag;
    return bilateral(data, params, [&](int r1, int c1, int r2, int c2) {
        const double d = m(r1, c1) - m(r2, c2);
        return d * d;
    });
}

ComplexGrid recombine(const WedgePartition& part, const RealGrid& estimated_mag)
{
    if (!estimated_mag.same_shape(part.noisy))
        throw std::invalid_argument("estimated magnitudes do not match the wedge shape");
    ComplexGrid out(part.noisy.rows(), part.noisy.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (part.keep_mask[i])
            out[i] = part.noisy[i];
        else
            out[i] = std::polar(std::max(estimated_mag[i], 0.0), part.noisy_phase[i]);
    }
    return out;
}

ComplexGrid bf_finest(const ComplexGrid& wedge, const KernelParams& params)
{
    params.validate();
    if (params.sigma_r == 0.0 || wedge.empty() || is_constant(wedge))
        return wedge;
    return bilateral(wedge, params,
                     [&](int r1, int c1, int r2, int c2) { return std::norm(wedge(r1, c1) - wedge(r2, c2)); });
}

ComplexGrid hard_threshold(const ComplexGrid& wedge, double lambda)
{
    if (!(lambda >= 0.0))
        throw std::invalid_argument("threshold must be non-negative");
    ComplexGrid out = wedge;
    for (Complex& c : out.values())
        if (!(std::abs(c) > lambda))
            c = Complex{};
    return out;
}

}  // namespace ppct
