// ppct: curvelet-domain denoising, calibration and experiment driver.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ppct/calibration.hpp"
#include "ppct/experiments.hpp"
#include "ppct/metrics.hpp"
#include "ppct/pipeline.hpp"
#include "ppct/spatial_filters.hpp"

namespace fs = std::filesystem;
using namespace ppct;

namespace {

struct Options {
    std::string in, out, reference, corpus, csv, profile, dump;
    double sigma = -1.0;
    std::uint64_t seed = 0;
    int trials = 10;
    bool recalibrate = false;
    bool clamp = false;
    int max_images = 8;
    int size = 512;

    // transform layout; 0 / empty means "default for the image size"
    int nscales = 0;
    int nangles = 16;
    std::string finest = "wavelet";

    // denoiser
    double k = 2.0;
    std::vector<double> k_per_scale;
    double alpha = 0.04;
    double sigma_d_coarse = 1.9;
    std::optional<double> k_r;
    double sigma_d_fine = 1.27;
    double k1 = 1.3;
    int gif_radius = 2;
    bool gif_eps_squared = false;
    bool no_jbf = false;
    bool complex_guide = false;

    // experiments
    std::string sigmas = "10,25,50";
    std::string sigma_grid = "5:100:5";
    std::string protocol = "retransform";
    std::string target = "fine";
    std::string p1, p2;
    int scale = 4, orientation = 1, bins = 64;
    std::string quantity = "real";
    std::string method = "proposed";
    int width = 0, height = 0;
};

std::string fmt(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

FdctConfig transform_config(const Options& o, int width, int height)
{
    FdctConfig cfg = default_config(width, height);
    if (o.nscales > 0)
        cfg.nscales = o.nscales;
    cfg.nangles_coarse = o.nangles;
    cfg.finest = finest_mode_from_string(o.finest);
    validate_config(cfg, width, height);
    return cfg;
}

DenoiseParams denoise_params(const Options& o, int width, int height)
{
    DenoiseParams p;
    p.fdct = transform_config(o, width, height);
    p.k = o.k;
    p.k_per_scale = o.k_per_scale;
    p.alpha = o.alpha;
    p.sigma_d_coarse = o.sigma_d_coarse;
    p.k_r = o.k_r;
    p.sigma_d_fine = o.sigma_d_fine;
    p.k1 = o.k1;
    p.gif_radius = o.gif_radius;
    p.gif_eps_squared = o.gif_eps_squared;
    p.jbf_enabled = !o.no_jbf;
    p.jbf_guide = o.complex_guide ? RangeGuide::complex_value : RangeGuide::magnitude;
    p.validate();
    return p;
}

NoiseProfile obtain_profile(const Options& o, int width, int height, const FdctConfig& cfg)
{
    if (!o.profile.empty()) {
        NoiseProfile p = load_profile(o.profile);
        if (!p.matches(cfg, width, height))
            throw std::invalid_argument(o.profile + ": profile does not match the image size or transform layout");
        return p;
    }
    return cached_profile(width, height, cfg, o.trials, RngSeed{o.seed}, o.recalibrate);
}

double require_sigma(const Options& o)
{
    if (!(o.sigma >= 0.0))
        throw std::invalid_argument("--sigma is required and must be non-negative");
    return o.sigma;
}

// Opens a CSV for appending; writes `header` when the file is new or empty.
std::ofstream open_csv(const std::string& path, const std::string& header, bool append)
{
    const bool fresh = !append || !fs::exists(path) || fs::file_size(path) == 0;
    if (fs::path(path).has_parent_path())
        fs::create_directories(fs::path(path).parent_path());
    std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
    if (!out)
        throw std::runtime_error(path + ": cannot open for writing");
    if (fresh)
        out << header << '\n';
    return out;
}

void report_metrics(const Options& o, const Image& result, double sigma, const std::string& method)
{
    if (o.reference.empty())
        return;
    const Image ref = load_image(o.reference);
    const Image test = o.clamp ? clamp_to_range(result) : result;
    const MetricsReport m = evaluate(ref, test);
    std::cout << "psnr,ssim,eki\n" << fmt(m.psnr) << ',' << fmt(m.ssim) << ',' << fmt(m.eki) << '\n';
    if (!o.csv.empty()) {
        auto out = open_csv(o.csv, "image,sigma,method,psnr,ssim,eki", true);
        out << fs::path(o.in).stem().string() << ',' << fmt(sigma) << ',' << method << ',' << fmt(m.psnr) << ','
            << fmt(m.ssim) << ',' << fmt(m.eki) << '\n';
    }
}

void require(const std::string& value, const char* flag)
{
    if (value.empty())
        throw std::invalid_argument(std::string(flag) + " is required");
}

void cmd_denoise(const Options& o)
{
    require(o.in, "--in");
    require(o.out, "--out");
    const double sigma = require_sigma(o);
    const Image noisy = load_image(o.in);
    const DenoiseParams params = denoise_params(o, noisy.width(), noisy.height());
    const NoiseProfile profile = obtain_profile(o, noisy.width(), noisy.height(), params.fdct);
    const Image result = denoise(noisy, sigma, params, profile);
    save_image(result, o.out);
    report_metrics(o, result, sigma, params.jbf_enabled ? "proposed" : "proposed_no_jbf");
}

void cmd_baseline(const Options& o)
{
    require(o.in, "--in");
    require(o.out, "--out");
    const double sigma = require_sigma(o);
    const Image noisy = load_image(o.in);
    const FdctConfig cfg = transform_config(o, noisy.width(), noisy.height());
    const NoiseProfile profile = obtain_profile(o, noisy.width(), noisy.height(), cfg);
    const Image result = ct_baseline(noisy, sigma, o.k, profile);
    save_image(result, o.out);
    report_metrics(o, result, sigma, "ct_hard");
}

void cmd_calibrate(const Options& o)
{
    int w = o.width, h = o.height;
    if (!o.in.empty()) {
        const Image img = load_image(o.in);
        w = img.width();
        h = img.height();
    }
    if (w <= 0 || h <= 0) {
        w = h = o.size;
    }
    const FdctConfig cfg = transform_config(o, w, h);
    NoiseProfile p;
    fs::path where;
    if (!o.out.empty()) {
        p = monte_carlo_profile(w, h, cfg, o.trials, RngSeed{o.seed});
        save_profile(p, o.out);
        where = o.out;
    } else {
        p = cached_profile(w, h, cfg, o.trials, RngSeed{o.seed}, o.recalibrate);
        where = profile_cache_path(w, h, cfg, o.trials, RngSeed{o.seed});
    }
    std::cout << "profile " << w << 'x' << h << " nscales=" << cfg.nscales << " nangles=" << cfg.nangles_coarse
              << " finest=" << to_string(cfg.finest) << " trials=" << o.trials << " -> " << where.string() << '\n';
}

void cmd_metrics(const Options& o)
{
    require(o.in, "--in");
    require(o.reference, "--reference");
    const Image test = load_image(o.in);
    report_metrics(o, test, o.sigma, o.method);
}

void cmd_awgn(const Options& o)
{
    require(o.in, "--in");
    require(o.out, "--out");
    const double sigma = require_sigma(o);
    save_image(add_awgn(load_image(o.in), sigma, RngSeed{o.seed}), o.out);
}

void cmd_sensitivity(const Options& o)
{
    require(o.corpus, "--corpus");
    const auto corpus = load_corpus(o.corpus, o.max_images, o.size);
    const auto grid = parse_grid(o.sigma_grid);
    const int side = corpus.front().image.width();
    const FdctConfig cfg = transform_config(o, side, corpus.front().image.height());
    const CorpusSensitivity s = corpus_sensitivity(corpus, grid, cfg, RngSeed{o.seed});

    auto write = [&](std::ostream& out, const SensitivityCurves& c) {
        out << "sigma,mag_sens,phase_sens\n";
        for (std::size_t i = 0; i < c.sigma.size(); ++i)
            out << fmt(c.sigma[i]) << ',' << fmt(c.magnitude[i]) << ',' << fmt(c.phase[i]) << '\n';
    };
    if (o.csv.empty()) {
        write(std::cout, s.mean_of_normalized);
    } else {
        std::ofstream main(o.csv);
        write(main, s.mean_of_normalized);
        fs::path pooled = o.csv;
        pooled.replace_extension(".pooled.csv");
        std::ofstream alt(pooled);
        write(alt, s.pooled);
        std::cout << "wrote " << o.csv << " and " << pooled.string() << '\n';
    }
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& c = s.per_image[i];
        std::cerr << corpus[i].name << ": magnitude slope " << fmt(least_squares_slope(c.sigma, c.magnitude))
                  << ", phase slope " << fmt(least_squares_slope(c.sigma, c.phase)) << '\n';
    }
}

void cmd_pdf(const Options& o)
{
    require(o.in, "--in");
    Image img = load_image(o.in);
    if (o.sigma > 0.0)
        img = add_awgn(img, o.sigma, RngSeed{o.seed});
    const FdctConfig cfg = transform_config(o, img.width(), img.height());
    const CurveletCoeffs coeffs = CurveletTransform(cfg, img.width(), img.height()).forward(img);
    if (!o.dump.empty())
        dump_coefficients(coeffs, o.dump);
    PdfQuantity q;
    if (o.quantity == "real")
        q = PdfQuantity::real_part;
    else if (o.quantity == "magnitude")
        q = PdfQuantity::magnitude;
    else
        throw std::invalid_argument("--quantity must be 'real' or 'magnitude'");
    const Histogram h = coefficient_pdf(coeffs, o.scale, o.orientation, o.bins, q);
    std::ostringstream body;
    body << "value,density\n";
    for (std::size_t i = 0; i < h.density.size(); ++i)
        body << fmt(h.center(i)) << ',' << fmt(h.density[i]) << '\n';
    if (o.csv.empty())
        std::cout << body.str();
    else
        std::ofstream(o.csv) << body.str();
    std::cerr << "excess kurtosis " << fmt(wedge_excess_kurtosis(coeffs, o.scale, o.orientation, q)) << '\n';
}

void cmd_table1(const Options& o)
{
    require(o.corpus, "--corpus");
    const auto corpus = load_corpus(o.corpus, o.max_images, o.size);
    const Image& first = corpus.front().image;
    const DenoiseParams params = denoise_params(o, first.width(), first.height());
    SubspaceProtocol protocol;
    if (o.protocol == "retransform")
        protocol = SubspaceProtocol::retransform;
    else if (o.protocol == "direct")
        protocol = SubspaceProtocol::direct;
    else
        throw std::invalid_argument("--protocol must be 'retransform' or 'direct'");

    const auto rows = noise_subspace_table(corpus, parse_grid(o.sigmas), params, o.trials, RngSeed{o.seed}, protocol);
    std::ostringstream body;
    body << "sigma,gamma,ct_corr,proposed_corr\n";
    for (const auto& r : rows) {
        body << fmt(r.sigma) << ',' << r.gamma << ',' << fmt(r.ct_corr) << ',' << fmt(r.proposed_corr) << '\n';
        if (r.ct_undefined || r.proposed_undefined)
            std::cerr << "sigma " << r.sigma << " gamma " << r.gamma << ": correlation undefined for "
                      << r.ct_undefined << " (CT) / " << r.proposed_undefined << " (proposed) of " << corpus.size()
                      << " images\n";
    }
    if (o.csv.empty())
        std::cout << body.str();
    else
        std::ofstream(o.csv) << body.str();
}

void cmd_sweep(const Options& o)
{
    std::vector<CorpusImage> corpus;
    if (!o.corpus.empty())
        corpus = load_corpus(o.corpus, o.max_images, o.size);
    else if (!o.in.empty())
        corpus.push_back({fs::path(o.in).stem().string(), load_image(o.in)});
    else
        throw std::invalid_argument("sweep needs --in or --corpus");
    const double sigma = require_sigma(o);
    SweepTarget target;
    if (o.target == "fine")
        target = SweepTarget::fine;
    else if (o.target == "coarse")
        target = SweepTarget::coarse;
    else
        throw std::invalid_argument("--target must be 'fine' or 'coarse'");
    const std::string p1 = !o.p1.empty() ? o.p1 : (target == SweepTarget::fine ? "0.5:2.5:0.5" : "1:3:0.5");
    const std::string p2 = !o.p2.empty() ? o.p2 : (target == SweepTarget::fine ? "1,3.5,7,11,15" : "0.02:0.1:0.02");

    const Image& first = corpus.front().image;
    const DenoiseParams base = denoise_params(o, first.width(), first.height());
    const auto cells = parameter_sweep(corpus, sigma, target, parse_grid(p1), parse_grid(p2), base, o.trials,
                                       RngSeed{o.seed});
    std::ostringstream body;
    body << "p1,p2,psnr,ssim\n";
    for (const auto& c : cells)
        body << fmt(c.p1) << ',' << fmt(c.p2) << ',' << fmt(c.psnr) << ',' << fmt(c.ssim) << '\n';
    if (o.csv.empty())
        std::cout << body.str();
    else
        std::ofstream(o.csv) << body.str();
    const SweepCell& best = cells[best_cell(cells)];
    std::cerr << "best: p1=" << fmt(best.p1) << " p2=" << fmt(best.p2) << " psnr=" << fmt(best.psnr)
              << " ssim=" << fmt(best.ssim) << '\n';
}

void add_transform_flags(CLI::App* app, Options& o)
{
    app->add_option("--nscales", o.nscales, "Number of scales (default: ceil(log2(min side)) - 3)");
    app->add_option("--nangles", o.nangles, "Orientations at the second-coarsest scale")
        ->check(CLI::IsMember({8, 16, 32}));
    app->add_option("--finest", o.finest, "Finest scale: wavelet or curvelet")
        ->check(CLI::IsMember({"wavelet", "curvelet"}));
}

void add_profile_flags(CLI::App* app, Options& o)
{
    app->add_option("--trials", o.trials, "Monte Carlo trials for the noise profile")->check(CLI::PositiveNumber);
    app->add_option("--profile", o.profile, "Use this noise profile CSV instead of the cache");
    app->add_flag("--recalibrate", o.recalibrate, "Recompute the cached noise profile");
}

void add_denoise_flags(CLI::App* app, Options& o)
{
    app->add_option("--k", o.k, "Threshold constant");
    app->add_option("--k-per-scale", o.k_per_scale, "One threshold constant per scale (overrides --k)")
        ->delimiter(',');
    app->add_option("--alpha", o.alpha, "JBF range falloff as a fraction of the wedge magnitude range");
    app->add_option("--sigma-d-coarse", o.sigma_d_coarse, "JBF spatial falloff");
    app->add_option("--kr", o.k_r, "Finest-scale BF range multiple (default 3.5 for sigma <= 40, else 11)");
    app->add_option("--sigma-d-fine", o.sigma_d_fine, "Finest-scale BF spatial falloff");
    app->add_option("--k1", o.k1, "GIF regularizer multiple");
    app->add_option("--gif-radius", o.gif_radius, "GIF window radius")->check(CLI::PositiveNumber);
    app->add_flag("--gif-eps-squared", o.gif_eps_squared, "Use eps = (k1 * sigma)^2 instead of k1 * sigma");
    app->add_flag("--no-jbf", o.no_jbf, "Keep below-threshold magnitudes hard-thresholded");
    app->add_flag("--complex-guide", o.complex_guide, "JBF range distance on complex noisy values");
    add_transform_flags(app, o);
    add_profile_flags(app, o);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Phase-preserving curvelet-domain image denoiser"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--seed", o.seed, "Seed for every random draw")->capture_default_str();

    auto* den = app.add_subcommand("denoise", "Denoise an image with known noise sigma");
    den->add_option("--in", o.in, "Noisy input image")->required();
    den->add_option("--out", o.out, "Output image")->required();
    den->add_option("--sigma", o.sigma, "Noise standard deviation")->required();
    den->add_option("--reference", o.reference, "Clean image; prints psnr,ssim,eki");
    den->add_option("--csv", o.csv, "Append a metrics row to this CSV");
    den->add_flag("--clamp", o.clamp, "Clamp to [0, 255] before computing metrics");
    add_denoise_flags(den, o);
    den->callback([&] { cmd_denoise(o); });

    auto* base = app.add_subcommand("baseline", "Classical curvelet hard thresholding");
    base->add_option("--in", o.in, "Noisy input image")->required();
    base->add_option("--out", o.out, "Output image")->required();
    base->add_option("--sigma", o.sigma, "Noise standard deviation")->required();
    base->add_option("--k", o.k, "Threshold constant");
    base->add_option("--reference", o.reference, "Clean image; prints psnr,ssim,eki");
    base->add_option("--csv", o.csv, "Append a metrics row to this CSV");
    base->add_flag("--clamp", o.clamp, "Clamp to [0, 255] before computing metrics");
    add_transform_flags(base, o);
    add_profile_flags(base, o);
    base->callback([&] { cmd_baseline(o); });

    auto* cal = app.add_subcommand("calibrate", "Monte Carlo noise profile");
    cal->add_option("--in", o.in, "Take the size from this image");
    cal->add_option("--size", o.size, "Square size when neither --in nor --width/--height is given");
    cal->add_option("--width", o.width, "Image width");
    cal->add_option("--height", o.height, "Image height");
    cal->add_option("--out", o.out, "Write the profile here instead of the cache");
    add_transform_flags(cal, o);
    add_profile_flags(cal, o);
    cal->callback([&] { cmd_calibrate(o); });

    auto* met = app.add_subcommand("metrics", "PSNR, SSIM and EKI of an image against a reference");
    met->add_option("--in", o.in, "Test image")->required();
    met->add_option("--reference", o.reference, "Reference image")->required();
    met->add_option("--sigma", o.sigma, "Noise level recorded in the CSV row");
    met->add_option("--method", o.method, "Method name recorded in the CSV row");
    met->add_option("--csv", o.csv, "Append a metrics row to this CSV");
    met->add_flag("--clamp", o.clamp, "Clamp to [0, 255] first");
    met->callback([&] { cmd_metrics(o); });

    auto* awgn = app.add_subcommand("awgn", "Add seeded white Gaussian noise to an image");
    awgn->add_option("--in", o.in, "Clean image")->required();
    awgn->add_option("--out", o.out, "Noisy output image")->required();
    awgn->add_option("--sigma", o.sigma, "Noise standard deviation")->required();
    awgn->callback([&] { cmd_awgn(o); });

    auto* sens = app.add_subcommand("sensitivity", "Normalized magnitude/phase noise sensitivity curves");
    sens->add_option("--corpus", o.corpus, "Directory of PNG/PGM images")->required();
    sens->add_option("--max-images", o.max_images, "Use at most this many images")->check(CLI::PositiveNumber);
    sens->add_option("--size", o.size, "Resize images to size x size (0 keeps them)");
    sens->add_option("--sigma-grid", o.sigma_grid, "Noise levels, 'start:stop:step' or a list");
    sens->add_option("--csv", o.csv, "Output CSV (a .pooled.csv sibling is written too)");
    add_transform_flags(sens, o);
    sens->callback([&] { cmd_sensitivity(o); });

    auto* pdf = app.add_subcommand("pdf", "Histogram density of one wedge");
    pdf->add_option("--in", o.in, "Image")->required();
    pdf->add_option("--sigma", o.sigma, "Add noise of this sigma first");
    pdf->add_option("--scale", o.scale, "Scale (1 = coarsest)");
    pdf->add_option("--orientation", o.orientation, "Orientation (1-based)");
    pdf->add_option("--bins", o.bins, "Histogram bins")->check(CLI::Range(8, 1 << 20));
    pdf->add_option("--quantity", o.quantity, "real or magnitude");
    pdf->add_option("--dump", o.dump, "Also dump every wedge into this directory");
    pdf->add_option("--csv", o.csv, "Output CSV");
    add_transform_flags(pdf, o);
    pdf->callback([&] { cmd_pdf(o); });

    auto* t1 = app.add_subcommand("table1", "Noise-subspace correlation, CT vs proposed");
    t1->add_option("--corpus", o.corpus, "Directory of PNG/PGM images")->required();
    t1->add_option("--max-images", o.max_images, "Use at most this many images")->check(CLI::PositiveNumber);
    t1->add_option("--size", o.size, "Resize images to size x size (0 keeps them)");
    t1->add_option("--sigmas", o.sigmas, "Noise levels");
    t1->add_option("--protocol", o.protocol, "retransform (default) or direct");
    t1->add_option("--csv", o.csv, "Output CSV");
    add_denoise_flags(t1, o);
    t1->callback([&] { cmd_table1(o); });

    auto* sw = app.add_subcommand("sweep", "PSNR/SSIM over a parameter grid");
    sw->add_option("--in", o.in, "Clean image");
    sw->add_option("--corpus", o.corpus, "Directory of clean images");
    sw->add_option("--max-images", o.max_images, "Use at most this many images")->check(CLI::PositiveNumber);
    sw->add_option("--size", o.size, "Resize corpus images to size x size (0 keeps them)");
    sw->add_option("--sigma", o.sigma, "Noise standard deviation")->required();
    sw->add_option("--target", o.target, "fine: (sigma_d_fine, k_r); coarse: (sigma_d_coarse, alpha)");
    sw->add_option("--p1", o.p1, "First parameter grid");
    sw->add_option("--p2", o.p2, "Second parameter grid");
    sw->add_option("--csv", o.csv, "Output CSV");
    add_denoise_flags(sw, o);
    sw->callback([&] { cmd_sweep(o); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "ppct: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
