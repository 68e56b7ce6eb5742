#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"
#include "ppct/calibration.hpp"
#include "test_support.hpp"

using namespace ppct;
namespace fs = std::filesystem;

TEST_CASE("Monte Carlo profile agrees with the window-mass closed form")
{
    const FdctConfig cfg = default_config(128, 128);
    const NoiseProfile mc = monte_carlo_profile(128, 128, cfg, 12, RngSeed{3});
    const NoiseProfile exact = analytic_profile(*build_windows(cfg, 128, 128));
    for (int s = 1; s <= cfg.nscales; ++s)
        for (int o = 1; o <= wedges_at_scale(cfg, s); ++o) {
            CHECK(mc.at(s, o) > 0.0);
            // The lowpass wedge has few coefficients; allow more spread there.
            const double tol = s == 1 ? 0.15 : 0.06;
            CHECK(std::abs(mc.at(s, o) / exact.at(s, o) - 1.0) < tol);
        }
}

TEST_CASE("expected noise energy obeys Parseval")
{
    for (const FdctConfig& cfg : {default_config(128, 96), FdctConfig{4, 8, FinestMode::curvelet}}) {
        const NoiseProfile p = monte_carlo_profile(128, 96, cfg, 10, RngSeed{21});
        const auto windows = build_windows(cfg, 128, 96);
        double total = 0.0;
        for (const auto& scale : windows->windows())
            for (const WedgeWindow& w : scale)
                total += p.at(w.scale, w.orientation) * p.at(w.scale, w.orientation) * w.rows * w.cols;
        CHECK(std::abs(total / (128.0 * 96.0) - 1.0) < 0.02);
    }
}

TEST_CASE("Monte Carlo profile converges to the closed form at 256x256")
{
    const FdctConfig cfg = default_config(256, 256);
    const NoiseProfile a = monte_carlo_profile(256, 256, cfg, 10, RngSeed{1});
    const NoiseProfile exact = analytic_profile(*build_windows(cfg, 256, 256));
    const CurveletCoeffs layout = forward(Image(256, 256), cfg);
    for (int s = 2; s <= cfg.nscales; ++s)
        for (int o = 1; o <= wedges_at_scale(cfg, s); ++o) {
            // Relative standard error of a sample RMS over n real samples is about 1/sqrt(2n).
            const double n = 2.0 * 10.0 * static_cast<double>(layout.wedge(s, o).coeffs.size());
            CHECK(std::abs(a.at(s, o) / exact.at(s, o) - 1.0) < 5.0 / std::sqrt(2.0 * n));
        }
    CHECK(monte_carlo_profile(256, 256, cfg, 2, RngSeed{1}).sigma ==
          monte_carlo_profile(256, 256, cfg, 2, RngSeed{1}).sigma);
    CHECK_THROWS_AS(monte_carlo_profile(256, 256, cfg, 0, RngSeed{1}), std::invalid_argument);
}

TEST_CASE("thresholds")
{
    NoiseProfile p;
    p.width = p.height = 64;
    p.config = default_config(64, 64);
    p.sigma = {{0.5}, std::vector<double>(16, 0.01), {0.2}};
    const Thresholds t = thresholds(p, 25.0, 2.0);
    CHECK(t[1][3] == doctest::Approx(0.5));
    CHECK(t[0][0] == doctest::Approx(25.0));
    const Thresholds zero = thresholds(p, 0.0, 2.0);
    for (const auto& s : zero)
        for (double v : s)
            CHECK(v == 0.0);
    // Homogeneous of degree one in sigma and in k.
    const Thresholds t2 = thresholds(p, 50.0, 2.0), t3 = thresholds(p, 25.0, 6.0);
    CHECK(t2[2][0] == doctest::Approx(2.0 * t[2][0]));
    CHECK(t3[2][0] == doctest::Approx(3.0 * t[2][0]));

    const std::vector<double> per_scale{1.0, 2.0, 4.0};
    const Thresholds ts = thresholds(p, 10.0, per_scale);
    CHECK(ts[2][0] == doctest::Approx(4.0 * 10.0 * 0.2));
    CHECK(ts[0][0] == doctest::Approx(1.0 * 10.0 * 0.5));

    CHECK_THROWS_AS(thresholds(p, -1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(thresholds(p, 1.0, 0.0), std::invalid_argument);
    NoiseProfile missing = p;
    missing.sigma[1].pop_back();
    CHECK_THROWS_AS(thresholds(missing, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("profile file round trip and validation")
{
    const fs::path dir = fs::temp_directory_path() / "ppct_test_profile";
    fs::create_directories(dir);
    const FdctConfig cfg = default_config(64, 64);
    const NoiseProfile p = monte_carlo_profile(64, 64, cfg, 3, RngSeed{44});
    save_profile(p, dir / "p.csv");
    const NoiseProfile q = load_profile(dir / "p.csv");
    CHECK(q.sigma == p.sigma);
    CHECK(q.matches(cfg, 64, 64));
    CHECK(q.trials == 3);
    CHECK(q.seed == RngSeed{44});

    std::ifstream in(dir / "p.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "width,height,nscales,nangles,finest,trials,seed");

    std::ofstream(dir / "bad.csv") << "width,height,nscales,nangles,finest,trials,seed\n64,64,3,16,wavelet,3,44\n"
                                      "gamma,o,sigma_go\n1,1,0.5\n";
    CHECK_THROWS_AS(load_profile(dir / "bad.csv"), std::runtime_error);
    std::ofstream(dir / "neg.csv") << "width,height,nscales,nangles,finest,trials,seed\n64,64,3,16,wavelet,3,44\n"
                                      "gamma,o,sigma_go\n1,1,-0.5\n";
    CHECK_THROWS_AS(load_profile(dir / "neg.csv"), std::runtime_error);
    CHECK_THROWS_AS(load_profile(dir / "absent.csv"), std::runtime_error);
}

TEST_CASE("closed-form sensitivities")
{
    using std::numbers::pi;
    CHECK(magnitude_sensitivity({2.0, 1.0, 0.3, 0.3}) == doctest::Approx(1.0));
    CHECK(magnitude_sensitivity({0.0, 1.5, 0.0, 1.0}) == doctest::Approx(1.0));
    CHECK(magnitude_sensitivity({2.0, 1.0, pi / 2, 0.0}) == doctest::Approx(1.0 / std::sqrt(5.0)));
    CHECK(phase_sensitivity({2.0, 1.0, 0.7, 0.7}) == doctest::Approx(0.0));
    CHECK(phase_sensitivity({0.0, 1.0, 0.2, 1.1}) == doctest::Approx(0.0));
    CHECK(phase_sensitivity({2.0, 1.0, pi / 2, 0.0}) == doctest::Approx(-0.4));
    CHECK_THROWS_AS(magnitude_sensitivity({1.0, 1.0, 0.0, pi}), UndefinedResult);
    CHECK_THROWS_AS(phase_sensitivity({0.0, 0.0, 0.0, 0.0}), UndefinedResult);
    CHECK_THROWS_AS(magnitude_sensitivity({-1.0, 1.0, 0.0, 0.0}), std::invalid_argument);

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> mag(0.0, 10.0), ph(-pi, pi);
    for (int i = 0; i < 2000; ++i) {
        const SensitivityInputs s{mag(rng), mag(rng), ph(rng), ph(rng)};
        CHECK(std::abs(magnitude_sensitivity(s)) <= 1.0);
        // Matches the derivative of |Z + N| along |N| numerically.
        auto y = [&](double n) { return std::abs(std::polar(s.mag_z, s.phase_z) + std::polar(n, s.phase_n)); };
        const double h = 1e-6;
        CHECK(magnitude_sensitivity(s) == doctest::Approx((y(s.mag_n + h) - y(s.mag_n - h)) / (2 * h)).epsilon(1e-4));
        auto phi = [&](double n) { return std::arg(std::polar(s.mag_z, s.phase_z) + std::polar(n, s.phase_n)); };
        double d = phi(s.mag_n + h) - phi(s.mag_n - h);
        d = std::remainder(d, 2 * pi);
        CHECK(phase_sensitivity(s) == doctest::Approx(d / (2 * h)).epsilon(1e-4).scale(1.0));
    }
}

TEST_CASE("normalization and slope helpers")
{
    const std::vector<double> v{3.0, 1.0, 2.0};
    const auto n = min_max_normalize(v);
    CHECK(n == std::vector<double>{1.0, 0.0, 0.5});
    CHECK(min_max_normalize(std::vector<double>{2.0, 2.0}) == std::vector<double>{0.0, 0.0});
    const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
    CHECK(least_squares_slope(x, y) == doctest::Approx(2.0));
    CHECK_THROWS_AS(least_squares_slope(std::vector<double>{1, 1}, std::vector<double>{1, 2}), UndefinedResult);
}

TEST_CASE("empirical sensitivity curves")
{
    const FdctConfig cfg = default_config(64, 64);
    const std::vector<double> grid{5, 10, 20, 40, 80};

    const SensitivityCurves zero = empirical_sensitivity_curves(Image(64, 64), grid, cfg, RngSeed{1});
    for (double r : zero.raw_magnitude)
        CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(zero.sigma == std::vector<double>{10, 20, 40, 80});

    const SensitivityCurves c = empirical_sensitivity_curves(testing::synthetic_scene(64), grid, cfg, RngSeed{1});
    for (const auto* curve : {&c.magnitude, &c.phase}) {
        CHECK(*std::min_element(curve->begin(), curve->end()) == 0.0);
        CHECK(*std::max_element(curve->begin(), curve->end()) == 1.0);
    }
    CHECK(least_squares_slope(c.sigma, c.magnitude) > 0.0);
    CHECK(least_squares_slope(c.sigma, c.phase) < 0.0);

    CHECK_THROWS_AS(empirical_sensitivity_curves(Image(64, 64), std::vector<double>{5, 10}, cfg, RngSeed{1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(empirical_sensitivity_curves(Image(64, 64), std::vector<double>{5, 5, 10}, cfg, RngSeed{1}),
                    std::invalid_argument);
    // Equal noise levels are rejected before they can zero the denominator.
    CHECK_THROWS_AS(empirical_sensitivity_curves(Image(64, 64), std::vector<double>{0, 0, 1}, cfg, RngSeed{1}),
                    std::invalid_argument);
}

TEST_CASE("coefficient histograms")
{
    const FdctConfig cfg = default_config(256, 256);
    const CurveletTransform t(cfg, 256, 256);
    const CurveletCoeffs noise = t.forward(white_noise(256, 256, RngSeed{6}));
    for (PdfQuantity q : {PdfQuantity::real_part, PdfQuantity::magnitude}) {
        const Histogram h = coefficient_pdf(noise, 4, 1, 40, q);
        double mass = 0.0;
        for (double d : h.density)
            mass += d * h.bin_width;
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(std::abs(wedge_excess_kurtosis(noise, 4, 3)) < 0.2);

    const CurveletCoeffs scene = t.forward(testing::synthetic_scene(256));
    CHECK(wedge_excess_kurtosis(scene, 4, 3) > 0.0);
    CHECK_THROWS_AS(coefficient_pdf(noise, 4, 1, 4), std::invalid_argument);
    CHECK_THROWS(coefficient_pdf(noise, 9, 1, 16));
}
