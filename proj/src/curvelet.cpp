#include "ppct/curvelet.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "fft.hpp"

namespace ppct {

namespace {

using detail::FftDirection;

int ceil_log2(int n)
{
    int k = 0;
    while ((1 << k) < n)
        ++k;
    return k;
}

int positive_mod(long long a, int m)
{
    const long long r = a % m;
    return static_cast<int>(r < 0 ? r + m : r);
}

// Meyer auxiliary polynomial: 0 at 0, 1 at 1, flat at both ends.
double meyer_nu(double x)
{
    if (x <= 0.0)
        return 0.0;
    if (x >= 1.0)
        return 1.0;
    return x * x * x * x * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x);
}

// 1D lowpass profile: 1 on [0, m], smooth roll-off to 0 at 2m.
double lowpass_profile(int k, double m)
{
    const double a = std::abs(static_cast<double>(k));
    if (a <= m)
        return 1.0;
    if (a >= 2.0 * m)
        return 0.0;
    return std::cos(0.5 * std::numbers::pi * meyer_nu((a - m) / m));
}

// Angular profile of a wedge whose nominal interval is [0, h] in the
// pseudo-angle; transitions of half-width h/2 centred on both ends.
double angular_profile(double d, double h)
{
    if (d <= -0.5 * h || d >= 1.5 * h)
        return 0.0;
    if (d < 0.5 * h)
        return std::sin(0.5 * std::numbers::pi * meyer_nu((d + 0.5 * h) / h));
    return std::cos(0.5 * std::numbers::pi * meyer_nu((d - 0.5 * h) / h));
}

// Pseudo-angle in [0, 8) on the concentric-squares grid. X and Y are the
// column and row frequencies cross-scaled by the opposite image dimension,
// so the cone boundaries are the diagonals of the normalized frequency box.
// Cones: E [0,2), N [2,4), W [4,6), S [6,8).
struct PseudoAngle {
    double t;
    bool upper_half;  // E or N cone
};

PseudoAngle pseudo_angle(long long x, long long y)
{
    if (x > 0 && -x <= y && y < x)
        return {1.0 + static_cast<double>(y) / static_cast<double>(x), true};
    if (y > 0 && -y < x && x <= y)
        return {3.0 - static_cast<double>(x) / static_cast<double>(y), true};
    if (x < 0 && x < y && y <= -x)
        return {5.0 + static_cast<double>(y) / static_cast<double>(x), false};
    return {7.0 + static_cast<double>(x) / static_cast<double>(-y), false};
}

struct AngularWeight {
    int wedge;  // 0-based
    double weight;
};

// Angular windows that are nonzero at (k1, k2). Points in the lower half are
// folded onto their antipode so that wedge o + n/2 at -k evaluates exactly the
// same arithmetic as wedge o at k.
int angular_weights(int k1, int k2, int rows, int cols, int nangles, std::array<AngularWeight, 3>& out)
{
    const long long x = static_cast<long long>(k2) * rows;
    const long long y = static_cast<long long>(k1) * cols;
    PseudoAngle pa = pseudo_angle(x, y);
    int offset = 0;
    if (!pa.upper_half) {
        pa = pseudo_angle(-x, -y);
        offset = nangles / 2;
    }
    const double h = 8.0 / nangles;
    const int base = static_cast<int>(std::floor(pa.t / h));
    int count = 0;
    for (int m = base - 1; m <= base + 1; ++m) {
        const int wedge = positive_mod(m, nangles);
        double d = pa.t - wedge * h;
        if (d < -4.0)
            d += 8.0;
        else if (d >= 4.0)
            d -= 8.0;
        const double w = angular_profile(d, h);
        if (w > 0.0)
            out[count++] = {(wedge + offset) % nangles, w};
    }
    return count;
}

struct Sample {
    int k1;  // representative frequency used for wrapping
    int k2;
    std::uint32_t spectrum_index;
    double weight;
};

// Chooses the wrapping rectangle: either full row extent by widest per-row
// span, or the transposed rule, whichever is smaller. Both are injective on
// the support.
void finalize_wedge(WedgeWindow& win, std::vector<Sample>& samples)
{
    if (samples.empty())
        throw std::invalid_argument("curvelet configuration produces an empty wedge at scale " +
                                    std::to_string(win.scale) + ", orientation " +
                                    std::to_string(win.orientation) + "; use fewer scales or angles");
    int k1min = samples[0].k1, k1max = k1min, k2min = samples[0].k2, k2max = k2min;
    std::map<int, std::pair<int, int>> row_span, col_span;
    for (const Sample& s : samples) {
        k1min = std::min(k1min, s.k1);
        k1max = std::max(k1max, s.k1);
        k2min = std::min(k2min, s.k2);
        k2max = std::max(k2max, s.k2);
        auto [rit, rnew] = row_span.try_emplace(s.k1, s.k2, s.k2);
        if (!rnew) {
            rit->second.first = std::min(rit->second.first, s.k2);
            rit->second.second = std::max(rit->second.second, s.k2);
        }
        auto [cit, cnew] = col_span.try_emplace(s.k2, s.k1, s.k1);
        if (!cnew) {
            cit->second.first = std::min(cit->second.first, s.k1);
            cit->second.second = std::max(cit->second.second, s.k1);
        }
    }
    int widest_row = 0, tallest_col = 0;
    for (const auto& [k, span] : row_span)
        widest_row = std::max(widest_row, span.second - span.first + 1);
    for (const auto& [k, span] : col_span)
        tallest_col = std::max(tallest_col, span.second - span.first + 1);

    const long long row_rule = static_cast<long long>(k1max - k1min + 1) * widest_row;
    const long long col_rule = static_cast<long long>(k2max - k2min + 1) * tallest_col;
    if (row_rule <= col_rule) {
        win.rows = k1max - k1min + 1;
        win.cols = widest_row;
    } else {
        win.rows = tallest_col;
        win.cols = k2max - k2min + 1;
    }

    std::sort(samples.begin(), samples.end(),
              [](const Sample& a, const Sample& b) { return a.spectrum_index < b.spectrum_index; });
    win.spectrum_index.reserve(samples.size());
    win.wrapped_index.reserve(samples.size());
    win.weight.reserve(samples.size());
    for (const Sample& s : samples) {
        win.spectrum_index.push_back(s.spectrum_index);
        win.wrapped_index.push_back(
            static_cast<std::uint32_t>(positive_mod(s.k1, win.rows) * win.cols + positive_mod(s.k2, win.cols)));
        win.weight.push_back(s.weight);
    }
}

}  // namespace

std::string to_string(FinestMode mode)
{
    return mode == FinestMode::wavelet ? "wavelet" : "curvelet";
}

FinestMode finest_mode_from_string(const std::string& name)
{
    if (name == "wavelet")
        return FinestMode::wavelet;
    if (name == "curvelet")
        return FinestMode::curvelet;
    throw std::invalid_argument("unknown finest mode '" + name + "' (expected wavelet or curvelet)");
}

FdctConfig default_config(int width, int height)
{
    const int n = std::min(width, height);
    if (n < 32)
        throw std::invalid_argument("image too small for the curvelet transform (min side " + std::to_string(n) +
                                    " < 32)");
    return FdctConfig{ceil_log2(n) - 3, 16, FinestMode::wavelet};
}

void validate_config(const FdctConfig& config, int width, int height)
{
    const int n = std::min(width, height);
    if (n < 32)
        throw std::invalid_argument("image too small for the curvelet transform (min side " + std::to_string(n) +
                                    " < 32)");
    if (config.nscales < 2)
        throw std::invalid_argument("nscales must be at least 2");
    if (config.nscales > ceil_log2(n) - 2)
        throw std::invalid_argument("nscales " + std::to_string(config.nscales) + " too large for min side " +
                                    std::to_string(n) + " (max " + std::to_string(ceil_log2(n) - 2) + ")");
    if (config.nangles_coarse != 8 && config.nangles_coarse != 16 && config.nangles_coarse != 32)
        throw std::invalid_argument("nangles_coarse must be 8, 16 or 32");
}

int wedges_at_scale(const FdctConfig& config, int scale)
{
    if (scale < 1 || scale > config.nscales)
        throw std::out_of_range("scale " + std::to_string(scale) + " outside 1.." + std::to_string(config.nscales));
    if (scale == 1)
        return 1;
    if (scale == config.nscales && config.finest == FinestMode::wavelet)
        return 1;
    return config.nangles_coarse << ((scale - 1) / 2);
}

int conjugate_orientation(const FdctConfig& config, int scale, int orientation)
{
    const int n = wedges_at_scale(config, scale);
    if (n == 1)
        return orientation;
    return (orientation - 1 + n / 2) % n + 1;
}

std::size_t CurveletCoeffs::total_size() const noexcept
{
    std::size_t total = 0;
    for (const auto& scale : scales)
        for (const auto& w : scale)
            total += w.coeffs.size();
    return total;
}

CurveletCoeffs CurveletCoeffs::zeros_like(const CurveletCoeffs& like)
{
    CurveletCoeffs out;
    out.width = like.width;
    out.height = like.height;
    out.config = like.config;
    out.scales.resize(like.scales.size());
    for (std::size_t s = 0; s < like.scales.size(); ++s)
        for (const Wedge& w : like.scales[s])
            out.scales[s].push_back(Wedge{w.scale, w.orientation, ComplexGrid(w.rows(), w.cols())});
    return out;
}

WindowSet::WindowSet(const FdctConfig& config, int width, int height)
    : config_(config), width_(width), height_(height)
{
    validate_config(config, width, height);
    const int n1 = height;
    const int n2 = width;
    const int nscales = config.nscales;

    // Lowpass half-widths (flat region); support extends to twice these.
    std::vector<double> m1(nscales), m2(nscales);
    for (int s = 1; s < nscales; ++s) {
        const double factor = 3.0 * std::ldexp(1.0, nscales - s);
        m1[s] = n1 / factor;
        m2[s] = n2 / factor;
    }
    auto lowpass = [&](int level, int k1, int k2) {
        return lowpass_profile(k1, m1[level]) * lowpass_profile(k2, m2[level]);
    };
    auto radial = [&](int scale, int k1, int k2) {
        if (scale == 1)
            return lowpass(1, k1, k2);
        const double inner = lowpass(scale - 1, k1, k2);
        const double hi = std::sqrt(std::max(0.0, 1.0 - inner * inner));
        return scale == nscales ? hi : lowpass(scale, k1, k2) * hi;
    };

    const int k1lo = -(n1 / 2), k1hi = (n1 - 1) / 2;  // centred ranges
    const int k2lo = -(n2 / 2), k2hi = (n2 - 1) / 2;
    auto spectrum_index = [&](int k1, int k2) {
        return static_cast<std::uint32_t>(positive_mod(k1, n1) * n2 + positive_mod(k2, n2));
    };

    windows_.resize(nscales);
    for (int scale = 1; scale <= nscales; ++scale) {
        const int nangles = wedges_at_scale(config, scale);
        std::vector<std::vector<Sample>> samples(nangles);

        int r1lo = k1lo, r1hi = k1hi, r2lo = k2lo, r2hi = k2hi;
        if (scale < nscales) {
            const int e1 = static_cast<int>(std::ceil(2.0 * m1[scale]));
            const int e2 = static_cast<int>(std::ceil(2.0 * m2[scale]));
            r1lo = std::max(r1lo, -e1);
            r1hi = std::min(r1hi, e1);
            r2lo = std::max(r2lo, -e2);
            r2hi = std::min(r2hi, e2);
        }

        const bool nyquist_rows = (n1 % 2 == 0) && scale == nscales && nangles > 1;
        const bool nyquist_cols = (n2 % 2 == 0) && scale == nscales && nangles > 1;

        std::array<AngularWeight, 3> aw{};
        std::vector<double> accum(nangles);
        for (int k1 = r1lo; k1 <= r1hi; ++k1) {
            for (int k2 = r2lo; k2 <= r2hi; ++k2) {
                const double rw = radial(scale, k1, k2);
                if (rw <= 0.0)
                    continue;
                const std::uint32_t idx = spectrum_index(k1, k2);
                if (nangles == 1) {
                    samples[0].push_back({k1, k2, idx, rw});
                    continue;
                }
                const bool ny1 = nyquist_rows && k1 == k1lo;
                const bool ny2 = nyquist_cols && k2 == k2lo;
                if (!ny1 && !ny2) {
                    const int cnt = angular_weights(k1, k2, n1, n2, nangles, aw);
                    for (int i = 0; i < cnt; ++i)
                        samples[aw[i].wedge].push_back({k1, k2, idx, rw * aw[i].weight});
                    continue;
                }
                // A Nyquist frequency is its own alias at +N/2 and -N/2. Its
                // angular weight is the RMS over all aliases so that both the
                // partition of unity and the antipodal symmetry hold; wedges of
                // the upper half wrap it at +N/2, the others at -N/2.
                std::fill(accum.begin(), accum.end(), 0.0);
                int nreps = 0;
                for (int a = 0; a < (ny1 ? 2 : 1); ++a) {
                    for (int b = 0; b < (ny2 ? 2 : 1); ++b) {
                        const int q1 = a ? -k1 : k1;
                        const int q2 = b ? -k2 : k2;
                        const int cnt = angular_weights(q1, q2, n1, n2, nangles, aw);
                        for (int i = 0; i < cnt; ++i)
                            accum[aw[i].wedge] += aw[i].weight * aw[i].weight;
                        ++nreps;
                    }
                }
                for (int o = 0; o < nangles; ++o) {
                    if (accum[o] <= 0.0)
                        continue;
                    const bool upper = o < nangles / 2;
                    const int q1 = ny1 && upper ? -k1 : k1;
                    const int q2 = ny2 && upper ? -k2 : k2;
                    samples[o].push_back({q1, q2, idx, rw * std::sqrt(accum[o] / nreps)});
                }
            }
        }

        windows_[scale - 1].resize(nangles);
        for (int o = 0; o < nangles; ++o) {
            WedgeWindow& win = windows_[scale - 1][o];
            win.scale = scale;
            win.orientation = o + 1;
            finalize_wedge(win, samples[o]);
        }
    }
}

const WedgeWindow& WindowSet::window(int scale, int orientation) const
{
    return windows_.at(scale - 1).at(orientation - 1);
}

RealGrid WindowSet::dense_window(int scale, int orientation) const
{
    RealGrid dense(height_, width_);
    const WedgeWindow& win = window(scale, orientation);
    for (std::size_t i = 0; i < win.weight.size(); ++i)
        dense[win.spectrum_index[i]] = win.weight[i];
    return dense;
}

double WindowSet::partition_of_unity_error() const
{
    std::vector<double> total(static_cast<std::size_t>(width_) * height_, 0.0);
    for (const auto& scale : windows_)
        for (const auto& win : scale)
            for (std::size_t i = 0; i < win.weight.size(); ++i)
                total[win.spectrum_index[i]] += win.weight[i] * win.weight[i];
    double err = 0.0;
    for (double t : total)
        err = std::max(err, std::abs(t - 1.0));
    return err;
}

std::shared_ptr<const WindowSet> build_windows(const FdctConfig& config, int width, int height)
{
    using Key = std::tuple<int, int, int, int, int>;
    static std::mutex mutex;
    static std::map<Key, std::weak_ptr<const WindowSet>> cache;
    const Key key{config.nscales, config.nangles_coarse, static_cast<int>(config.finest), width, height};
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end())
        if (auto alive = it->second.lock())
            return alive;
    auto built = std::make_shared<const WindowSet>(config, width, height);
    cache[key] = built;
    return built;
}

CurveletTransform::CurveletTransform(const FdctConfig& config, int width, int height)
    : windows_(build_windows(config, width, height))
{
}

CurveletTransform::CurveletTransform(std::shared_ptr<const WindowSet> windows) : windows_(std::move(windows))
{
    if (!windows_)
        throw std::invalid_argument("null window set");
}

CurveletCoeffs CurveletTransform::forward(const Image& image) const
{
    ComplexGrid grid(image.height(), image.width());
    std::copy(image.pixels().begin(), image.pixels().end(), grid.storage().begin());
    return forward(grid);
}

CurveletCoeffs CurveletTransform::forward(const ComplexGrid& image) const
{
    if (image.rows() != height() || image.cols() != width())
        throw std::invalid_argument("image is " + std::to_string(image.cols()) + "x" + std::to_string(image.rows()) +
                                    " but the transform was built for " + std::to_string(width()) + "x" +
                                    std::to_string(height()));
    ComplexGrid spectrum = image;
    detail::fft2_inplace(spectrum, FftDirection::forward);
    const double norm = 1.0 / std::sqrt(static_cast<double>(spectrum.size()));
    for (Complex& v : spectrum.values())
        v *= norm;

    CurveletCoeffs out;
    out.width = width();
    out.height = height();
    out.config = config();
    out.scales.resize(windows_->windows().size());
    for (const auto& scale : windows_->windows()) {
        for (const WedgeWindow& win : scale) {
            ComplexGrid wrapped(win.rows, win.cols);
            for (std::size_t i = 0; i < win.weight.size(); ++i)
                wrapped[win.wrapped_index[i]] = spectrum[win.spectrum_index[i]] * win.weight[i];
            detail::fft2_inplace(wrapped, FftDirection::backward);
            const double wnorm = 1.0 / std::sqrt(static_cast<double>(wrapped.size()));
            for (Complex& v : wrapped.values())
                v *= wnorm;
            out.scales[win.scale - 1].push_back(Wedge{win.scale, win.orientation, std::move(wrapped)});
        }
    }
    return out;
}

void CurveletTransform::check_layout(const CurveletCoeffs& coeffs) const
{
    const auto& wins = windows_->windows();
    if (coeffs.width != width() || coeffs.height != height() || !(coeffs.config == config()) ||
        coeffs.scales.size() != wins.size())
        throw std::invalid_argument("coefficients do not match the transform configuration");
    for (std::size_t s = 0; s < wins.size(); ++s) {
        if (coeffs.scales[s].size() != wins[s].size())
            throw std::invalid_argument("wrong number of wedges at scale " + std::to_string(s + 1));
        for (std::size_t o = 0; o < wins[s].size(); ++o) {
            const Wedge& w = coeffs.scales[s][o];
            if (w.rows() != wins[s][o].rows || w.cols() != wins[s][o].cols)
                throw std::invalid_argument("wedge (" + std::to_string(s + 1) + ", " + std::to_string(o + 1) +
                                            ") has the wrong shape");
        }
    }
}

ComplexGrid CurveletTransform::inverse_complex(const CurveletCoeffs& coeffs) const
{
    check_layout(coeffs);
    ComplexGrid spectrum(height(), width());
    for (const auto& scale : windows_->windows()) {
        for (const WedgeWindow& win : scale) {
            ComplexGrid wrapped = coeffs.wedge(win.scale, win.orientation).coeffs;
            detail::fft2_inplace(wrapped, FftDirection::forward);
            const double wnorm = 1.0 / std::sqrt(static_cast<double>(wrapped.size()));
            for (std::size_t i = 0; i < win.weight.size(); ++i)
                spectrum[win.spectrum_index[i]] += wrapped[win.wrapped_index[i]] * (win.weight[i] * wnorm);
        }
    }
    detail::fft2_inplace(spectrum, FftDirection::backward);
    const double norm = 1.0 / std::sqrt(static_cast<double>(spectrum.size()));
    for (Complex& v : spectrum.values())
        v *= norm;
    return spectrum;
}

Image CurveletTransform::inverse(const CurveletCoeffs& coeffs) const
{
    const ComplexGrid full = inverse_complex(coeffs);
    RealGrid real(full.rows(), full.cols());
    for (std::size_t i = 0; i < full.size(); ++i)
        real[i] = full[i].real();
    return Image(std::move(real));
}

CurveletCoeffs forward(const Image& image, const FdctConfig& config)
{
    return CurveletTransform(config, image.width(), image.height()).forward(image);
}

Image inverse(const CurveletCoeffs& coeffs, const FdctConfig& config)
{
    return CurveletTransform(config, coeffs.width, coeffs.height).inverse(coeffs);
}

double coeff_energy(const CurveletCoeffs& coeffs)
{
    double total = 0.0;
    for (const auto& scale : coeffs.scales)
        for (const Wedge& w : scale)
            for (const Complex& c : w.coeffs.values())
                total += std::norm(c);
    return total;
}

namespace {

static_assert(std::endian::native == std::endian::little, "coefficient dumps assume a little-endian host");

template <typename T>
void write_raw(std::ostream& out, const T& value)
{
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in)
{
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    return value;
}

}  // namespace

void dump_coefficients(const CurveletCoeffs& coeffs, const std::filesystem::path& directory)
{
    std::filesystem::create_directories(directory);
    for (const auto& scale : coeffs.scales) {
        for (const Wedge& w : scale) {
            const auto path =
                directory / ("wedge_" + std::to_string(w.scale) + "_" + std::to_string(w.orientation) + ".bin");
            std::ofstream out(path, std::ios::binary);
            if (!out)
                throw std::runtime_error(path.string() + ": cannot open for writing");
            for (std::uint32_t v : {static_cast<std::uint32_t>(w.scale), static_cast<std::uint32_t>(w.orientation),
                                    static_cast<std::uint32_t>(w.rows()), static_cast<std::uint32_t>(w.cols())})
                write_raw(out, v);
            for (const Complex& c : w.coeffs.values()) {
                write_raw(out, c.real());
                write_raw(out, c.imag());
            }
            if (!out)
                throw std::runtime_error(path.string() + ": write failed");
        }
    }
}

Wedge read_wedge_dump(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw std::runtime_error(file.string() + ": cannot open");
    Wedge w;
    w.scale = static_cast<int>(read_raw<std::uint32_t>(in));
    w.orientation = static_cast<int>(read_raw<std::uint32_t>(in));
    const auto rows = static_cast<int>(read_raw<std::uint32_t>(in));
    const auto cols = static_cast<int>(read_raw<std::uint32_t>(in));
    if (!in)
        throw std::runtime_error(file.string() + ": truncated header");
    w.coeffs = ComplexGrid(rows, cols);
    for (Complex& c : w.coeffs.values()) {
        const double re = read_raw<double>(in);
        const double im = read_raw<double>(in);
        c = {re, im};
    }
    if (!in)
        throw std::runtime_error(file.string() + ": truncated data");
    return w;
}

}  // namespace ppct
