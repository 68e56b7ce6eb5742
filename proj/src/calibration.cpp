#include "ppct/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ppct {

namespace {

std::vector<std::vector<double>> zero_table(const FdctConfig& config)
{
    std::vector<std::vector<double>> table(config.nscales);
    for (int s = 1; s <= config.nscales; ++s)
        table[s - 1].assign(wedges_at_scale(config, s), 0.0);
    return table;
}

}  // namespace

NoiseProfile monte_carlo_profile(int width, int height, const FdctConfig& config, int trials, RngSeed seed)
{
    if (trials < 1)
        throw std::invalid_argument("Monte Carlo calibration needs at least one trial");
    const CurveletTransform transform(config, width, height);

    // Per-trial sums, merged in trial order.
    auto energy = zero_table(config);
    auto count = zero_table(config);
    for (int trial = 0; trial < trials; ++trial) {
        const Image noise = white_noise(width, height, derive_seed(seed, static_cast<std::uint64_t>(trial)));
        const CurveletCoeffs coeffs = transform.forward(noise);
        for (const auto& scale : coeffs.scales) {
            for (const Wedge& w : scale) {
                double e = 0.0;
                for (const Complex& c : w.coeffs.values())
                    e += c.real() * c.real() + c.imag() * c.imag();
                energy[w.scale - 1][w.orientation - 1] += e;
                count[w.scale - 1][w.orientation - 1] += static_cast<double>(w.coeffs.size());
            }
        }
    }

    NoiseProfile profile{width, height, config, trials, seed, zero_table(config)};
    for (std::size_t s = 0; s < energy.size(); ++s)
        for (std::size_t o = 0; o < energy[s].size(); ++o)
            profile.sigma[s][o] = std::sqrt(energy[s][o] / count[s][o]);
    return profile;
}

NoiseProfile analytic_profile(const WindowSet& windows)
{
    NoiseProfile profile{windows.width(), windows.height(), windows.config(), 0, RngSeed{}, {}};
    profile.sigma = zero_table(windows.config());
    for (const auto& scale : windows.windows()) {
        for (const WedgeWindow& win : scale) {
            double mass = 0.0;
            for (double w : win.weight)
                mass += w * w;
            profile.sigma[win.scale - 1][win.orientation - 1] =
                std::sqrt(mass / (static_cast<double>(win.rows) * win.cols));
        }
    }
    return profile;
}

void save_profile(const NoiseProfile& profile, const std::filesystem::path& path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error(path.string() + ": cannot open for writing");
    out.precision(17);
    out << "width,height,nscales,nangles,finest,trials,seed\n";
    out << profile.width << ',' << profile.height << ',' << profile.config.nscales << ','
        << profile.config.nangles_coarse << ',' << to_string(profile.config.finest) << ',' << profile.trials << ','
        << profile.seed.value << '\n';
    out << "gamma,o,sigma_go\n";
    for (std::size_t s = 0; s < profile.sigma.size(); ++s)
        for (std::size_t o = 0; o < profile.sigma[s].size(); ++o)
            out << s + 1 << ',' << o + 1 << ',' << profile.sigma[s][o] << '\n';
    if (!out)
        throw std::runtime_error(path.string() + ": write failed");
}

NoiseProfile load_profile(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error(path.string() + ": cannot open profile");
    auto fail = [&](const std::string& what) { return std::runtime_error(path.string() + ": " + what); };
    auto split = [](const std::string& line) {
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ','))
            fields.push_back(f);
        return fields;
    };

    std::string line;
    if (!std::getline(in, line) || line != "width,height,nscales,nangles,finest,trials,seed")
        throw fail("missing profile header");
    if (!std::getline(in, line))
        throw fail("missing profile metadata");
    const auto meta = split(line);
    if (meta.size() != 7)
        throw fail("malformed profile metadata");

    NoiseProfile profile;
    try {
        profile.width = std::stoi(meta[0]);
        profile.height = std::stoi(meta[1]);
        profile.config.nscales = std::stoi(meta[2]);
        profile.config.nangles_coarse = std::stoi(meta[3]);
        profile.config.finest = finest_mode_from_string(meta[4]);
        profile.trials = std::stoi(meta[5]);
        profile.seed = RngSeed{std::stoull(meta[6])};
    } catch (const std::exception& e) {
        throw fail(std::string("malformed profile metadata: ") + e.what());
    }
    validate_config(profile.config, profile.width, profile.height);
    profile.sigma = zero_table(profile.config);
    auto seen = zero_table(profile.config);

    if (!std::getline(in, line) || line != "gamma,o,sigma_go")
        throw fail("missing 'gamma,o,sigma_go' header");
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto f = split(line);
        if (f.size() != 3)
            throw fail("malformed row '" + line + "'");
        int s, o;
        double v;
        try {
            s = std::stoi(f[0]);
            o = std::stoi(f[1]);
            v = std::stod(f[2]);
        } catch (const std::exception&) {
            throw fail("malformed row '" + line + "'");
        }
        if (s < 1 || s > profile.config.nscales || o < 1 || o > wedges_at_scale(profile.config, s))
            throw fail("row refers to a wedge outside the configuration: '" + line + "'");
        if (!(v > 0.0) || !std::isfinite(v))
            throw fail("non-positive sigma in row '" + line + "'");
        profile.sigma[s - 1][o - 1] = v;
        seen[s - 1][o - 1] = 1.0;
    }
    for (std::size_t s = 0; s < seen.size(); ++s)
        for (std::size_t o = 0; o < seen[s].size(); ++o)
            if (seen[s][o] == 0.0)
                throw fail("missing entry for wedge (" + std::to_string(s + 1) + ", " + std::to_string(o + 1) + ")");
    return profile;
}

Thresholds thresholds(const NoiseProfile& profile, double sigma, double k)
{
    const std::vector<double> ks(profile.sigma.size(), k);
    return thresholds(profile, sigma, ks);
}

Thresholds thresholds(const NoiseProfile& profile, double sigma, std::span<const double> k_per_scale)
{
    if (!(sigma >= 0.0))
        throw std::invalid_argument("noise sigma must be non-negative");
    if (k_per_scale.size() != profile.sigma.size())
        throw std::invalid_argument("need one threshold constant per scale");
    if (profile.sigma.size() != static_cast<std::size_t>(profile.config.nscales))
        throw std::invalid_argument("noise profile is missing scales");
    Thresholds out(profile.sigma.size());
    for (std::size_t s = 0; s < profile.sigma.size(); ++s) {
        const double k = k_per_scale[s];
        if (!(k > 0.0))
            throw std::invalid_argument("threshold constant k must be positive");
        const std::size_t expected = static_cast<std::size_t>(wedges_at_scale(profile.config, static_cast<int>(s) + 1));
        if (profile.sigma[s].size() != expected)
            throw std::invalid_argument("noise profile is missing entries at scale " + std::to_string(s + 1));
        out[s].reserve(expected);
        for (double sg : profile.sigma[s])
            out[s].push_back(k * sigma * sg);
    }
    return out;
}

namespace {

double resultant_sq(const SensitivityInputs& s)
{
    if (s.mag_z < 0.0 || s.mag_n < 0.0)
        throw std::invalid_argument("sensitivity magnitudes must be non-negative");
    return s.mag_z * s.mag_z + s.mag_n * s.mag_n + 2.0 * s.mag_z * s.mag_n * std::cos(s.phase_z - s.phase_n);
}

}  // namespace

double magnitude_sensitivity(const SensitivityInputs& s)
{
    const double r2 = resultant_sq(s);
    if (!(r2 > 0.0))
        throw UndefinedResult("magnitude sensitivity undefined: signal and noise phasors cancel (Y = 0)");
    const double v = (s.mag_n + s.mag_z * std::cos(s.phase_z - s.phase_n)) / std::sqrt(r2);
    return std::clamp(v, -1.0, 1.0);
}

double phase_sensitivity(const SensitivityInputs& s)
{
    const double r2 = resultant_sq(s);
    if (!(r2 > 0.0))
        throw UndefinedResult("phase sensitivity undefined: signal and noise phasors cancel (Y = 0)");
    return s.mag_z * std::sin(s.phase_n - s.phase_z) / r2;
}

std::vector<double> min_max_normalize(std::span<const double> values)
{
    std::vector<double> out(values.begin(), values.end());
    if (out.empty())
        return out;
    const auto [lo, hi] = std::minmax_element(out.begin(), out.end());
    const double a = *lo, b = *hi;
    for (double& v : out)
        v = b > a ? (v - a) / (b - a) : 0.0;
    return out;
}

double least_squares_slope(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("slope needs two equal-length sequences of length >= 2");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0)
        throw UndefinedResult("slope undefined for constant abscissa");
    return sxy / sxx;
}

SensitivityCurves empirical_sensitivity_curves(const Image& image, std::span<const double> sigma_grid,
                                               const FdctConfig& config, RngSeed seed)
{
    if (sigma_grid.size() < 3)
        throw std::invalid_argument("sensitivity needs a noise grid of at least 3 levels");
    for (std::size_t i = 0; i < sigma_grid.size(); ++i) {
        if (!(sigma_grid[i] >= 0.0))
            throw std::invalid_argument("noise levels must be non-negative");
        if (i > 0 && !(sigma_grid[i] > sigma_grid[i - 1]))
            throw std::invalid_argument("noise grid must be strictly increasing");
    }

    const CurveletTransform transform(config, image.width(), image.height());
    const CurveletCoeffs clean = transform.forward(image);
    const CurveletCoeffs unit = transform.forward(white_noise(image.width(), image.height(), seed));

    // Coefficients are linear in the noise level, so every level is
    // clean + sigma * unit.
    std::vector<Complex> z, n;
    z.reserve(clean.total_size());
    n.reserve(clean.total_size());
    for (std::size_t s = 0; s < clean.scales.size(); ++s)
        for (std::size_t o = 0; o < clean.scales[s].size(); ++o) {
            const auto zv = clean.scales[s][o].coeffs.values();
            const auto nv = unit.scales[s][o].coeffs.values();
            z.insert(z.end(), zv.begin(), zv.end());
            n.insert(n.end(), nv.begin(), nv.end());
        }

    SensitivityCurves curves;
    for (std::size_t i = 0; i + 1 < sigma_grid.size(); ++i) {
        const double s0 = sigma_grid[i], s1 = sigma_grid[i + 1];
        double dmag = 0.0, dphase = 0.0, dnoise = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j) {
            const Complex y0 = z[j] + s0 * n[j];
            const Complex y1 = z[j] + s1 * n[j];
            const Complex n0 = s0 * n[j];
            const Complex n1 = s1 * n[j];
            dmag += std::abs(std::abs(y1) - std::abs(y0));
            dphase += std::abs(std::arg(y1 * std::conj(y0)));
            dnoise += std::abs(std::abs(n1) - std::abs(n0));
        }
        if (!(dnoise > 0.0))
            throw UndefinedResult("noise magnitude does not change between levels " + std::to_string(i) + " and " +
                                  std::to_string(i + 1));
        curves.sigma.push_back(s1);
        curves.raw_magnitude.push_back(dmag / dnoise);
        curves.raw_phase.push_back(dphase / dnoise);
    }
    curves.magnitude = min_max_normalize(curves.raw_magnitude);
    curves.phase = min_max_normalize(curves.raw_phase);
    return curves;
}

namespace {

std::vector<double> wedge_quantity(const CurveletCoeffs& coeffs, int scale, int orientation, PdfQuantity quantity)
{
    const Wedge& w = coeffs.wedge(scale, orientation);
    if (w.coeffs.empty())
        throw std::invalid_argument("wedge is empty");
    std::vector<double> v;
    v.reserve(w.coeffs.size());
    for (const Complex& c : w.coeffs.values())
        v.push_back(quantity == PdfQuantity::real_part ? c.real() : std::abs(c));
    return v;
}

}  // namespace

Histogram coefficient_pdf(const CurveletCoeffs& coeffs, int scale, int orientation, int bins, PdfQuantity quantity)
{
    if (bins < 8)
        throw std::invalid_argument("histogram needs at least 8 bins");
    const std::vector<double> v = wedge_quantity(coeffs, scale, orientation, quantity);
    auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    double lo = *lo_it, hi = *hi_it;
    if (hi <= lo) {
        const double pad = std::max(1e-12, std::abs(lo) * 1e-9);
        lo -= pad;
        hi += pad;
    }
    Histogram h;
    h.lo = lo;
    h.bin_width = (hi - lo) / bins;
    h.density.assign(static_cast<std::size_t>(bins), 0.0);
    for (double x : v) {
        auto b = static_cast<long>(std::floor((x - lo) / h.bin_width));
        b = std::clamp(b, 0L, static_cast<long>(bins) - 1);
        h.density[static_cast<std::size_t>(b)] += 1.0;
    }
    const double norm = 1.0 / (static_cast<double>(v.size()) * h.bin_width);
    for (double& d : h.density)
        d *= norm;
    return h;
}

double wedge_excess_kurtosis(const CurveletCoeffs& coeffs, int scale, int orientation, PdfQuantity quantity)
{
    const std::vector<double> v = wedge_quantity(coeffs, scale, orientation, quantity);
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double m2 = 0.0, m4 = 0.0;
    for (double x : v) {
        const double d = (x - mean) * (x - mean);
        m2 += d;
        m4 += d * d;
    }
    m2 /= n;
    m4 /= n;
    if (!(m2 > 0.0))
        throw UndefinedResult("kurtosis undefined for a constant wedge");
    return m4 / (m2 * m2) - 3.0;
}

}  // namespace ppct
