#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ppct/coeff_filters.hpp"
#include "test_support.hpp"

using namespace ppct;

namespace {

// Direct evaluation of the joint bilateral sum, clipped at the borders.
RealGrid jbf_oracle(const RealGrid& data, const RealGrid& guide, double sd, double sr, int hw)
{
    RealGrid out(data.rows(), data.cols());
    for (int r = 0; r < data.rows(); ++r)
        for (int c = 0; c < data.cols(); ++c) {
            double num = 0.0, den = 0.0;
            for (int i = r - hw; i <= r + hw; ++i)
                for (int j = c - hw; j <= c + hw; ++j) {
                    if (i < 0 || j < 0 || i >= data.rows() || j >= data.cols())
                        continue;
                    const double d2 = (i - r) * (i - r) + (j - c) * (j - c);
                    const double g = guide(i, j) - guide(r, c);
                    const double w = std::exp(-d2 / (2 * sd * sd)) * std::exp(-g * g / (2 * sr * sr));
                    num += w * data(i, j);
                    den += w;
                }
            out(r, c) = num / den;
        }
    return out;
}

ComplexGrid bf_oracle(const ComplexGrid& y, double sd, double sr, int hw)
{
    ComplexGrid out(y.rows(), y.cols());
    for (int r = 0; r < y.rows(); ++r)
        for (int c = 0; c < y.cols(); ++c) {
            Complex num{};
            double den = 0.0;
            for (int i = r - hw; i <= r + hw; ++i)
                for (int j = c - hw; j <= c + hw; ++j) {
                    if (i < 0 || j < 0 || i >= y.rows() || j >= y.cols())
                        continue;
                    const double d2 = (i - r) * (i - r) + (j - c) * (j - c);
                    const double g = std::abs(y(i, j) - y(r, c));
                    const double w = std::exp(-d2 / (2 * sd * sd)) * std::exp(-g * g / (2 * sr * sr));
                    num += w * y(i, j);
                    den += w;
                }
            out(r, c) = num / den;
        }
    return out;
}

template <typename G>
double max_diff(const G& a, const G& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

template <typename T>
Grid<T> transpose(const Grid<T>& g)
{
    Grid<T> t(g.cols(), g.rows());
    for (int r = 0; r < g.rows(); ++r)
        for (int c = 0; c < g.cols(); ++c)
            t(c, r) = g(r, c);
    return t;
}

}  // namespace

TEST_CASE("partition at the threshold")
{
    const ComplexGrid w(1, 4, std::vector<Complex>{{3, 4}, {3, 0}, {0, 0}, std::polar(3.0, -2.0)});
    const WedgePartition p = partition_wedge(w, 4.0);
    CHECK(p.keep_mask == Grid<std::uint8_t>(1, 4, std::vector<std::uint8_t>{1, 0, 0, 0}));
    CHECK(p.thresholded == RealGrid(1, 4, std::vector<double>{5, 0, 0, 0}));
    CHECK(p.noisy_phase[2] == 0.0);
    CHECK(p.noisy_phase[3] == doctest::Approx(-2.0));

    const WedgePartition all = partition_wedge(w, 0.0);
    CHECK(all.keep_mask == Grid<std::uint8_t>(1, 4, std::vector<std::uint8_t>{1, 1, 0, 1}));

    const WedgePartition none = partition_wedge(w, 100.0);
    for (auto k : none.keep_mask.values())
        CHECK(k == 0);
    for (double v : none.thresholded.values())
        CHECK(v == 0.0);
    CHECK_THROWS_AS(partition_wedge(w, -1.0), std::invalid_argument);
}

TEST_CASE("kernel parameters")
{
    CHECK(KernelParams::from_falloffs(1.9, 1.0).half_width == 6);
    CHECK(KernelParams::from_falloffs(1.27, 1.0).half_width == 4);
    CHECK(KernelParams::from_falloffs(0.1, 1.0).half_width == 1);
    CHECK_THROWS_AS(KernelParams::from_falloffs(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(KernelParams::from_falloffs(1.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS((KernelParams{1.0, 1.0, 0}.validate()), std::invalid_argument);
}

TEST_CASE("joint bilateral magnitudes match the brute-force oracle")
{
    // 3x3 case
    const ComplexGrid w3 = testing::random_complex(3, 3, 1, 2.0);
    const WedgePartition p3 = partition_wedge(w3, 1.5);
    const KernelParams k3{1.0, 1.0, 1};
    CHECK(max_diff(jbf_magnitude(p3, k3), jbf_oracle(p3.thresholded, p3.noisy_mag, 1.0, 1.0, 1)) < 1e-12);

    for (std::uint64_t seed = 0; seed < 24; ++seed) {
        const int rows = 3 + static_cast<int>(seed % 7), cols = 4 + static_cast<int>((seed * 5) % 9);
        const ComplexGrid w = testing::random_complex(rows, cols, 100 + seed, 3.0);
        const WedgePartition p = partition_wedge(w, 2.5);
        const double sd = 0.6 + 0.2 * static_cast<double>(seed % 5);
        const double sr = 0.3 + 0.5 * static_cast<double>(seed % 4);
        const int hw = 1 + static_cast<int>(seed % 3);
        const RealGrid got = jbf_magnitude(p, KernelParams{sd, sr, hw});
        CHECK(max_diff(got, jbf_oracle(p.thresholded, p.noisy_mag, sd, sr, hw)) < 1e-10);

        // Convex combination of the data.
        const auto [lo, hi] = std::minmax_element(p.thresholded.values().begin(), p.thresholded.values().end());
        for (double v : got.values()) {
            CHECK(v >= *lo - 1e-12);
            CHECK(v <= *hi + 1e-12);
        }
    }
}

TEST_CASE("joint bilateral degenerate inputs")
{
    WedgePartition p = partition_wedge(testing::random_complex(5, 6, 3), 0.0);
    p.thresholded = RealGrid(5, 6, 2.5);
    const RealGrid flat = jbf_magnitude(p, KernelParams{1.0, 0.5, 2});
    for (double v : flat.values())
        CHECK(v == doctest::Approx(2.5));
    p.thresholded = RealGrid(5, 6, 0.0);
    const RealGrid zero = jbf_magnitude(p, KernelParams{1.0, 0.5, 2});
    for (double v : zero.values())
        CHECK(v == 0.0);
    // sigma_r == 0 passes data through.
    const WedgePartition q = partition_wedge(testing::random_complex(5, 6, 4), 0.5);
    CHECK(jbf_magnitude(q, KernelParams{1.0, 0.0, 2}) == q.thresholded);
}

TEST_CASE("complex guidance uses the modulus of the difference")
{
    const ComplexGrid w = testing::random_complex(6, 5, 12, 2.0);
    const WedgePartition p = partition_wedge(w, 1.0);
    const RealGrid got = jbf_magnitude(p, KernelParams{1.1, 0.9, 2}, RangeGuide::complex_value);
    RealGrid oracle(6, 5);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 5; ++c) {
            double num = 0.0, den = 0.0;
            for (int i = std::max(0, r - 2); i <= std::min(5, r + 2); ++i)
                for (int j = std::max(0, c - 2); j <= std::min(4, c + 2); ++j) {
                    const double d2 = (i - r) * (i - r) + (j - c) * (j - c);
                    const double g = std::abs(w(i, j) - w(r, c));
                    const double wt = std::exp(-d2 / (2 * 1.1 * 1.1) - g * g / (2 * 0.9 * 0.9));
                    num += wt * p.thresholded(i, j);
                    den += wt;
                }
            oracle(r, c) = num / den;
        }
    CHECK(max_diff(got, oracle) < 1e-10);
}

TEST_CASE("recombine")
{
    using std::numbers::pi;
    const ComplexGrid w(1, 3, std::vector<Complex>{{6, 8}, std::polar(3.0, pi / 4), std::polar(1.0, 2.0)});
    const WedgePartition p = partition_wedge(w, 4.0);
    const ComplexGrid out = recombine(p, RealGrid(1, 3, std::vector<double>{99.0, 2.0, -1.0}));
    CHECK(out[0] == w[0]);
    CHECK(std::abs(out[1] - std::polar(2.0, pi / 4)) < 1e-15);
    CHECK(out[2] == Complex{});

    const WedgePartition all = partition_wedge(w, 0.0);
    CHECK(recombine(all, RealGrid(1, 3, 7.0)) == w);

    const ComplexGrid r = testing::random_complex(8, 9, 21, 3.0);
    const WedgePartition pr = partition_wedge(r, 2.0);
    CHECK(recombine(pr, RealGrid(8, 9, 0.0)) == hard_threshold(r, 2.0));
    // Identity estimate reproduces classical hard thresholding exactly.
    CHECK(recombine(pr, pr.thresholded) == hard_threshold(r, 2.0));

    // Phase is preserved below threshold.
    const RealGrid est = jbf_magnitude(pr, KernelParams{1.0, 1.0, 1});
    const ComplexGrid rc = recombine(pr, est);
    for (std::size_t i = 0; i < rc.size(); ++i)
        if (!pr.keep_mask[i] && est[i] > 0.0)
            CHECK(std::arg(rc[i]) == doctest::Approx(pr.noisy_phase[i]));
    CHECK_THROWS_AS(recombine(pr, RealGrid(2, 2)), std::invalid_argument);
}

TEST_CASE("finest-scale bilateral filter matches the brute-force oracle")
{
    const ComplexGrid w4 = testing::random_complex(4, 4, 7, 2.0);
    CHECK(max_diff(bf_finest(w4, KernelParams{1.27, 2.0, 2}), bf_oracle(w4, 1.27, 2.0, 2)) < 1e-12);

    for (std::uint64_t seed = 0; seed < 22; ++seed) {
        const int rows = 2 + static_cast<int>(seed % 8), cols = 3 + static_cast<int>((seed * 3) % 10);
        const ComplexGrid y = testing::random_complex(rows, cols, 300 + seed, 1.5);
        const double sd = 0.5 + 0.3 * static_cast<double>(seed % 4);
        const double sr = 0.4 + 0.6 * static_cast<double>(seed % 3);
        const int hw = 1 + static_cast<int>(seed % 3);
        const ComplexGrid got = bf_finest(y, KernelParams{sd, sr, hw});
        CHECK(max_diff(got, bf_oracle(y, sd, sr, hw)) < 1e-10);
        double re_lo = 1e300, re_hi = -1e300, im_lo = 1e300, im_hi = -1e300;
        for (const Complex& v : y.values()) {
            re_lo = std::min(re_lo, v.real());
            re_hi = std::max(re_hi, v.real());
            im_lo = std::min(im_lo, v.imag());
            im_hi = std::max(im_hi, v.imag());
        }
        for (const Complex& v : got.values()) {
            CHECK(v.real() >= re_lo - 1e-12);
            CHECK(v.real() <= re_hi + 1e-12);
            CHECK(v.imag() >= im_lo - 1e-12);
            CHECK(v.imag() <= im_hi + 1e-12);
        }
    }
}

TEST_CASE("finest-scale bilateral filter limits")
{
    const ComplexGrid flat(5, 5, Complex{1.5, -2.0});
    CHECK(bf_finest(flat, KernelParams{1.0, 1.0, 2}) == flat);

    // Flat kernels on a window covering the array give the arithmetic mean.
    const ComplexGrid y = testing::random_complex(3, 3, 9);
    Complex mean{};
    for (const Complex& v : y.values())
        mean += v / 9.0;
    const ComplexGrid out = bf_finest(y, KernelParams{1e6, 1e6, 2});
    for (const Complex& v : out.values())
        CHECK(std::abs(v - mean) < 1e-9);

    CHECK(bf_finest(y, KernelParams{1.0, 0.0, 1}) == y);
}

TEST_CASE("filters are equivariant under transposition")
{
    const ComplexGrid y = testing::random_complex(7, 5, 31, 2.0);
    const KernelParams k{1.2, 1.3, 2};
    CHECK(max_diff(transpose(bf_finest(y, k)), bf_finest(transpose(y), k)) < 1e-12);

    const WedgePartition p = partition_wedge(y, 1.8);
    const WedgePartition pt = partition_wedge(transpose(y), 1.8);
    CHECK(pt.keep_mask == transpose(p.keep_mask));
    CHECK(max_diff(transpose(jbf_magnitude(p, k)), jbf_magnitude(pt, k)) < 1e-12);
    const RealGrid est = jbf_magnitude(p, k);
    CHECK(max_diff(transpose(recombine(p, est)), recombine(pt, transpose(est))) < 1e-15);
}
