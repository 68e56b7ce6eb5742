#include "ppct/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ppct {

namespace fs = std::filesystem;

std::vector<CorpusImage> load_corpus(const fs::path& directory, int max_images, int size)
{
    if (!fs::is_directory(directory))
        throw std::invalid_argument(directory.string() + ": not a directory");
    if (max_images < 1)
        throw std::invalid_argument("max_images must be at least 1");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (!entry.is_regular_file())
            continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".png" || ext == ".pgm")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw std::invalid_argument(directory.string() + ": no PNG or PGM images");
    if (files.size() > static_cast<std::size_t>(max_images))
        files.resize(static_cast<std::size_t>(max_images));

    std::vector<CorpusImage> corpus;
    for (const auto& f : files) {
        Image img = load_image(f);
        if (size > 0 && (img.width() != size || img.height() != size))
            img = resize_bilinear(img, size, size);
        corpus.push_back({f.stem().string(), std::move(img)});
    }
    return corpus;
}

fs::path profile_cache_dir()
{
    if (const char* dir = std::getenv("CURVELET_CACHE_DIR"); dir && *dir)
        return dir;
    if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg)
        return fs::path(xdg) / "ppct";
    if (const char* home = std::getenv("HOME"); home && *home)
        return fs::path(home) / ".cache" / "ppct";
    return fs::temp_directory_path() / "ppct-cache";
}

fs::path profile_cache_path(int width, int height, const FdctConfig& config, int trials, RngSeed seed)
{
    std::ostringstream name;
    name << "profile_" << width << 'x' << height << "_s" << config.nscales << "_a" << config.nangles_coarse << '_'
         << to_string(config.finest) << "_t" << trials << "_seed" << seed.value << ".csv";
    return profile_cache_dir() / name.str();
}

NoiseProfile cached_profile(int width, int height, const FdctConfig& config, int trials, RngSeed seed,
                            bool recalibrate)
{
    const fs::path path = profile_cache_path(width, height, config, trials, seed);
    if (!recalibrate && fs::exists(path)) {
        try {
            NoiseProfile p = load_profile(path);
            if (p.matches(config, width, height) && p.trials == trials && p.seed == seed)
                return p;
        } catch (const std::exception&) {
            // Unreadable cache entries are recomputed below.
        }
    }
    NoiseProfile p = monte_carlo_profile(width, height, config, trials, seed);
    save_profile(p, path);
    return p;
}

RngSeed noise_seed(RngSeed base, std::size_t index, double sigma)
{
    const auto level = static_cast<std::uint64_t>(std::llround(sigma * 1000.0));
    return derive_seed(derive_seed(base, 0x9e37u + index), level);
}

namespace {

// Monte Carlo profiles by image size, computed once per batch.
class ProfileMemo {
public:
    ProfileMemo(const FdctConfig& config, int trials, RngSeed seed) : config_(config), trials_(trials), seed_(seed) {}

    const NoiseProfile& get(int width, int height)
    {
        const auto key = std::make_pair(width, height);
        auto it = cache_.find(key);
        if (it == cache_.end())
            it = cache_.emplace(key, monte_carlo_profile(width, height, config_, trials_, seed_)).first;
        return it->second;
    }

private:
    FdctConfig config_;
    int trials_;
    RngSeed seed_;
    std::map<std::pair<int, int>, NoiseProfile> cache_;
};

void require_corpus(const std::vector<CorpusImage>& corpus)
{
    if (corpus.empty())
        throw std::invalid_argument("corpus is empty");
}

}  // namespace

std::vector<Table1Row> noise_subspace_table(const std::vector<CorpusImage>& corpus, const std::vector<double>& sigmas,
                                            const DenoiseParams& params, int trials, RngSeed seed,
                                            SubspaceProtocol protocol)
{
    require_corpus(corpus);
    if (sigmas.empty())
        throw std::invalid_argument("need at least one noise level");
    ProfileMemo profiles(params.fdct, trials, seed);
    const int nscales = params.fdct.nscales;

    std::vector<double> sorted = sigmas;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::vector<Table1Row> rows;
    for (double sigma : sorted) {
        std::vector<double> ct_sum(nscales, 0.0), pr_sum(nscales, 0.0);
        std::vector<int> ct_n(nscales, 0), pr_n(nscales, 0);
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            const Image& clean = corpus[i].image;
            const NoiseProfile& profile = profiles.get(clean.width(), clean.height());
            const CurveletTransform transform(params.fdct, clean.width(), clean.height());
            const Image noisy = add_awgn(clean, sigma, noise_seed(seed, i, sigma));
            const CurveletCoeffs cz = transform.forward(clean);
            const CurveletCoeffs cy = transform.forward(noisy);
            const Thresholds lambda = thresholds(profile, sigma, params.k);

            CurveletCoeffs ct_est, pr_est;
            if (protocol == SubspaceProtocol::retransform) {
                ct_est = transform.forward(ct_baseline(noisy, sigma, params.k, profile));
                pr_est = transform.forward(denoise(noisy, sigma, params, profile));
            } else {
                ct_est = hard_threshold_coefficients(cy, lambda);
                pr_est = filter_coefficients(cy, sigma, params, profile);
            }
            for (int g = 2; g < nscales; ++g) {
                try {
                    ct_sum[g - 1] += noise_subspace_correlation(cz, ct_est, cy, lambda, g);
                    ++ct_n[g - 1];
                } catch (const UndefinedResult&) {
                }
                try {
                    pr_sum[g - 1] += noise_subspace_correlation(cz, pr_est, cy, lambda, g);
                    ++pr_n[g - 1];
                } catch (const UndefinedResult&) {
                }
            }
        }
        const int total = static_cast<int>(corpus.size());
        constexpr double nan = std::numeric_limits<double>::quiet_NaN();
        for (int g = 2; g < nscales; ++g)
            rows.push_back({sigma, g, ct_n[g - 1] ? ct_sum[g - 1] / ct_n[g - 1] : nan,
                            pr_n[g - 1] ? pr_sum[g - 1] / pr_n[g - 1] : nan, total - ct_n[g - 1],
                            total - pr_n[g - 1]});
    }
    return rows;
}

CorpusSensitivity corpus_sensitivity(const std::vector<CorpusImage>& corpus, const std::vector<double>& sigma_grid,
                                     const FdctConfig& config, RngSeed seed)
{
    require_corpus(corpus);
    CorpusSensitivity out;
    for (std::size_t i = 0; i < corpus.size(); ++i)
        out.per_image.push_back(
            empirical_sensitivity_curves(corpus[i].image, sigma_grid, config, derive_seed(seed, i)));

    const std::size_t n = out.per_image.front().sigma.size();
    const double count = static_cast<double>(corpus.size());
    auto average = [&](auto member) {
        std::vector<double> mean(n, 0.0);
        for (const auto& c : out.per_image)
            for (std::size_t j = 0; j < n; ++j)
                mean[j] += (c.*member)[j] / count;
        return mean;
    };
    SensitivityCurves& m = out.mean_of_normalized;
    m.sigma = out.per_image.front().sigma;
    m.raw_magnitude = average(&SensitivityCurves::raw_magnitude);
    m.raw_phase = average(&SensitivityCurves::raw_phase);
    m.magnitude = average(&SensitivityCurves::magnitude);
    m.phase = average(&SensitivityCurves::phase);

    SensitivityCurves& p = out.pooled;
    p.sigma = m.sigma;
    p.raw_magnitude = m.raw_magnitude;
    p.raw_phase = m.raw_phase;
    p.magnitude = min_max_normalize(p.raw_magnitude);
    p.phase = min_max_normalize(p.raw_phase);
    return out;
}

std::vector<SweepCell> parameter_sweep(const std::vector<CorpusImage>& corpus, double sigma, SweepTarget target,
                                       const std::vector<double>& p1, const std::vector<double>& p2,
                                       const DenoiseParams& base, int trials, RngSeed seed)
{
    require_corpus(corpus);
    if (p1.empty() || p2.empty())
        throw std::invalid_argument("sweep ranges must not be empty");
    ProfileMemo profiles(base.fdct, trials, seed);

    std::vector<Image> noisy;
    for (std::size_t i = 0; i < corpus.size(); ++i)
        noisy.push_back(add_awgn(corpus[i].image, sigma, noise_seed(seed, i, sigma)));

    std::vector<double> a = p1, b = p2;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());

    std::vector<SweepCell> cells;
    for (double x : a) {
        for (double y : b) {
            DenoiseParams params = base;
            if (target == SweepTarget::fine) {
                params.sigma_d_fine = x;
                params.k_r = y;
            } else {
                params.sigma_d_coarse = x;
                params.alpha = y;
            }
            params.validate();
            SweepCell cell{x, y, 0.0, 0.0};
            for (std::size_t i = 0; i < corpus.size(); ++i) {
                const Image& clean = corpus[i].image;
                const Image out = denoise(noisy[i], sigma, params, profiles.get(clean.width(), clean.height()));
                cell.psnr += psnr(clean, out) / static_cast<double>(corpus.size());
                cell.ssim += ssim(clean, out) / static_cast<double>(corpus.size());
            }
            cells.push_back(cell);
        }
    }
    return cells;
}

std::size_t best_cell(const std::vector<SweepCell>& cells)
{
    if (cells.empty())
        throw std::invalid_argument("no sweep cells");
    std::size_t best = 0;
    for (std::size_t i = 1; i < cells.size(); ++i)
        if (cells[i].psnr > cells[best].psnr)
            best = i;
    return best;
}

std::vector<double> parse_grid(const std::string& spec)
{
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad number '" + s + "' in grid '" + spec + "'");
        }
        if (used != s.size() || !std::isfinite(v))
            throw std::invalid_argument("bad number '" + s + "' in grid '" + spec + "'");
        return v;
    };
    std::vector<std::string> parts;
    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {
        std::stringstream ss(spec);
        std::string f;
        while (std::getline(ss, f, ':'))
            parts.push_back(f);
        if (parts.size() != 3)
            throw std::invalid_argument("range grid must be 'start:stop:step', got '" + spec + "'");
        const double lo = number(parts[0]), hi = number(parts[1]), step = number(parts[2]);
        if (!(step > 0.0) || hi < lo)
            throw std::invalid_argument("invalid range '" + spec + "'");
        const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
        for (long i = 0; i <= n; ++i)
            out.push_back(lo + static_cast<double>(i) * step);
        return out;
    }
    std::stringstream ss(spec);
    std::string f;
    while (std::getline(ss, f, ','))
        out.push_back(number(f));
    if (out.empty())
        throw std::invalid_argument("empty grid");
    return out;
}

}  // namespace ppct
