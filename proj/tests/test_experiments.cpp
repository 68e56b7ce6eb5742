#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "doctest.h"
#include "ppct/experiments.hpp"
#include "test_support.hpp"

using namespace ppct;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("ppct_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("grid specifications")
{
    CHECK(parse_grid("1,2.5,4") == std::vector<double>{1.0, 2.5, 4.0});
    CHECK(parse_grid("7") == std::vector<double>{7.0});
    const auto r = parse_grid("0.5:1.5:0.25");
    REQUIRE(r.size() == 5);
    CHECK(r.back() == doctest::Approx(1.5));
    CHECK(parse_grid("3:3:1") == std::vector<double>{3.0});
    CHECK_THROWS_AS(parse_grid(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("1,x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("1:2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("2:1:0.5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("1:2:0"), std::invalid_argument);
}

TEST_CASE("corpus loading")
{
    const fs::path dir = scratch_dir("corpus");
    save_image(testing::random_image(40, 30, 1), dir / "b.png");
    save_image(testing::random_image(20, 20, 2), dir / "a.pgm");
    std::ofstream(dir / "notes.txt") << "skip me";

    const auto all = load_corpus(dir, 10, 32);
    REQUIRE(all.size() == 2);
    CHECK(all[0].name == "a");
    CHECK(all[1].name == "b");
    CHECK(all[1].image.width() == 32);
    CHECK(all[1].image.height() == 32);
    CHECK(load_corpus(dir, 1, 0).front().image.width() == 20);

    CHECK_THROWS_AS(load_corpus(dir / "missing", 4, 0), std::invalid_argument);
    CHECK_THROWS_AS(load_corpus(dir, 0, 0), std::invalid_argument);
    const fs::path empty = scratch_dir("empty");
    CHECK_THROWS_AS(load_corpus(empty, 4, 0), std::invalid_argument);
    fs::remove_all(dir);
    fs::remove_all(empty);
}

TEST_CASE("profile cache")
{
    const fs::path dir = scratch_dir("cache");
    ::setenv("CURVELET_CACHE_DIR", dir.c_str(), 1);
    CHECK(profile_cache_dir() == dir);
    const FdctConfig cfg = default_config(64, 64);
    const fs::path path = profile_cache_path(64, 64, cfg, 3, RngSeed{5});
    CHECK(path.parent_path() == dir);
    CHECK(!fs::exists(path));

    const NoiseProfile a = cached_profile(64, 64, cfg, 3, RngSeed{5});
    CHECK(fs::exists(path));
    const NoiseProfile b = cached_profile(64, 64, cfg, 3, RngSeed{5});
    CHECK(a.sigma == b.sigma);
    CHECK(b.matches(cfg, 64, 64));

    // A corrupted entry is recomputed and rewritten.
    std::ofstream(path) << "garbage\n";
    const NoiseProfile c = cached_profile(64, 64, cfg, 3, RngSeed{5});
    CHECK(c.sigma == a.sigma);
    CHECK(load_profile(path).sigma == a.sigma);
    CHECK(cached_profile(64, 64, cfg, 3, RngSeed{5}, true).sigma == a.sigma);

    CHECK(profile_cache_path(64, 64, cfg, 3, RngSeed{6}) != path);
    fs::remove_all(dir);
}

TEST_CASE("noise streams")
{
    CHECK(noise_seed(RngSeed{1}, 0, 25.0) == noise_seed(RngSeed{1}, 0, 25.0));
    CHECK(!(noise_seed(RngSeed{1}, 0, 25.0) == noise_seed(RngSeed{1}, 1, 25.0)));
    CHECK(!(noise_seed(RngSeed{1}, 0, 25.0) == noise_seed(RngSeed{1}, 0, 50.0)));
}

TEST_CASE("noise subspace table")
{
    std::vector<CorpusImage> corpus{{"scene", testing::synthetic_scene(64)}};
    const DenoiseParams p = default_params(64, 64);
    const auto rows = noise_subspace_table(corpus, {50.0, 25.0, 25.0}, p, 4, RngSeed{1});
    // Band scales only, sigmas sorted and deduplicated.
    REQUIRE(rows.size() == 2 * static_cast<std::size_t>(p.fdct.nscales - 2));
    CHECK(rows.front().sigma == 25.0);
    CHECK(rows.front().gamma == 2);
    for (const auto& r : rows) {
        CHECK(r.ct_undefined == 0);
        CHECK(r.proposed_undefined == 0);
        CHECK(std::abs(r.proposed_corr) <= 1.0);
    }

    const auto direct = noise_subspace_table(corpus, {25.0}, p, 4, RngSeed{1}, SubspaceProtocol::direct);
    // Hard-thresholded coefficients vanish on the noise subspace.
    for (const auto& r : direct) {
        CHECK(std::isnan(r.ct_corr));
        CHECK(r.ct_undefined == 1);
        CHECK(std::isfinite(r.proposed_corr));
    }

    // A blank clean image has no defined correlation.
    std::vector<CorpusImage> blank{{"blank", Image(64, 64, 0.0)}};
    for (const auto& r : noise_subspace_table(blank, {25.0}, p, 4, RngSeed{1})) {
        CHECK(std::isnan(r.proposed_corr));
        CHECK(r.proposed_undefined == 1);
    }
    CHECK_THROWS_AS(noise_subspace_table({}, {25.0}, p, 4, RngSeed{1}), std::invalid_argument);
    CHECK_THROWS_AS(noise_subspace_table(corpus, {}, p, 4, RngSeed{1}), std::invalid_argument);
}

TEST_CASE("corpus sensitivity")
{
    std::vector<CorpusImage> corpus{{"a", testing::synthetic_scene(64)},
                                    {"b", resize_bilinear(testing::random_image(32, 32, 3), 64, 64)}};
    const std::vector<double> grid{5, 10, 20, 40};
    const auto s = corpus_sensitivity(corpus, grid, default_config(64, 64), RngSeed{2});
    REQUIRE(s.per_image.size() == 2);
    REQUIRE(s.mean_of_normalized.sigma.size() == 3);
    CHECK(s.mean_of_normalized.sigma.front() == 10.0);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(s.mean_of_normalized.magnitude[j] ==
              doctest::Approx((s.per_image[0].magnitude[j] + s.per_image[1].magnitude[j]) / 2));
        CHECK(s.pooled.raw_phase[j] == doctest::Approx((s.per_image[0].raw_phase[j] + s.per_image[1].raw_phase[j]) / 2));
    }
    const auto [lo, hi] = std::minmax_element(s.pooled.magnitude.begin(), s.pooled.magnitude.end());
    CHECK(*lo == doctest::Approx(0.0));
    CHECK(*hi == doctest::Approx(1.0));
}

TEST_CASE("parameter sweep")
{
    std::vector<CorpusImage> corpus{{"scene", testing::synthetic_scene(64)}};
    const DenoiseParams base = default_params(64, 64);
    const auto one = parameter_sweep(corpus, 30.0, SweepTarget::fine, {1.27}, {3.5}, base, 4, RngSeed{8});
    REQUIRE(one.size() == 1);
    const NoiseProfile prof = monte_carlo_profile(64, 64, base.fdct, 4, RngSeed{8});
    DenoiseParams p = base;
    p.k_r = 3.5;
    const Image noisy = add_awgn(corpus[0].image, 30.0, noise_seed(RngSeed{8}, 0, 30.0));
    const Image out = denoise(noisy, 30.0, p, prof);
    CHECK(one[0].psnr == doctest::Approx(psnr(corpus[0].image, out)));
    CHECK(one[0].ssim == doctest::Approx(ssim(corpus[0].image, out)));

    const auto cells = parameter_sweep(corpus, 30.0, SweepTarget::coarse, {2.0, 1.0}, {0.1, 0.04}, base, 4, RngSeed{8});
    REQUIRE(cells.size() == 4);
    CHECK(cells[0].p1 == 1.0);
    CHECK(cells[0].p2 == 0.04);
    CHECK(cells[1].p2 == 0.1);
    const std::size_t best = best_cell(cells);
    for (const auto& c : cells)
        CHECK(c.psnr <= cells[best].psnr);

    CHECK(best_cell({{0, 0, 5, 0}, {1, 1, 7, 0}, {2, 2, 7, 0}}) == 1);
    CHECK_THROWS_AS(best_cell({}), std::invalid_argument);
    CHECK_THROWS_AS(parameter_sweep(corpus, 30.0, SweepTarget::fine, {}, {1.0}, base, 4, RngSeed{8}),
                    std::invalid_argument);
}
