#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ppct/calibration.hpp"
#include "ppct/curvelet.hpp"
#include "ppct/metrics.hpp"
#include "ppct/pipeline.hpp"
#include "ppct/spatial_filters.hpp"

namespace py = pybind11;
using namespace ppct;

namespace {

using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ComplexArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

Image to_image(const RealArray& a)
{
    if (a.ndim() != 2)
        throw std::invalid_argument("expected a 2-D array");
    const auto rows = static_cast<int>(a.shape(0)), cols = static_cast<int>(a.shape(1));
    std::vector<double> px(a.data(), a.data() + a.size());
    return Image(cols, rows, std::move(px));
}

RealArray to_array(const Image& img)
{
    RealArray out({img.height(), img.width()});
    std::copy(img.pixels().begin(), img.pixels().end(), out.mutable_data());
    return out;
}

ComplexArray to_array(const ComplexGrid& g)
{
    ComplexArray out({g.rows(), g.cols()});
    std::copy(g.values().begin(), g.values().end(), out.mutable_data());
    return out;
}

ComplexGrid to_grid(const ComplexArray& a)
{
    if (a.ndim() != 2)
        throw std::invalid_argument("expected a 2-D array");
    std::vector<Complex> v(a.data(), a.data() + a.size());
    return ComplexGrid(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)), std::move(v));
}

// Coefficients as a list (per scale) of lists (per orientation) of arrays.
py::list coeffs_to_list(const CurveletCoeffs& c)
{
    py::list scales;
    for (const auto& s : c.scales) {
        py::list wedges;
        for (const auto& w : s)
            wedges.append(to_array(w.coeffs));
        scales.append(wedges);
    }
    return scales;
}

CurveletCoeffs list_to_coeffs(const py::list& scales, const CurveletTransform& t)
{
    CurveletCoeffs c;
    c.width = t.width();
    c.height = t.height();
    c.config = t.config();
    int s = 1;
    for (const auto& scale : scales) {
        std::vector<Wedge> wedges;
        int o = 1;
        for (const auto& w : scale.cast<py::list>())
            wedges.push_back({s, o++, to_grid(w.cast<ComplexArray>())});
        c.scales.push_back(std::move(wedges));
        ++s;
    }
    return c;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Phase-preserving curvelet-domain denoising";

    py::register_exception<UndefinedResult>(m, "UndefinedResult", PyExc_ValueError);

    py::enum_<FinestMode>(m, "FinestMode")
        .value("wavelet", FinestMode::wavelet)
        .value("curvelet", FinestMode::curvelet);

    py::class_<FdctConfig>(m, "FdctConfig")
        .def(py::init([](int nscales, int nangles_coarse, FinestMode finest) {
                 return FdctConfig{nscales, nangles_coarse, finest};
             }),
             py::arg("nscales"), py::arg("nangles_coarse") = 16, py::arg("finest") = FinestMode::wavelet)
        .def_readwrite("nscales", &FdctConfig::nscales)
        .def_readwrite("nangles_coarse", &FdctConfig::nangles_coarse)
        .def_readwrite("finest", &FdctConfig::finest)
        .def("__eq__", [](const FdctConfig& a, const FdctConfig& b) { return a == b; })
        .def("__repr__", [](const FdctConfig& c) {
            return "FdctConfig(nscales=" + std::to_string(c.nscales) +
                   ", nangles_coarse=" + std::to_string(c.nangles_coarse) + ", finest='" + to_string(c.finest) + "')";
        });

    m.def("default_config", &default_config, py::arg("width"), py::arg("height"));
    m.def("wedges_at_scale", &wedges_at_scale, py::arg("config"), py::arg("scale"));

    py::class_<CurveletTransform>(m, "CurveletTransform")
        .def(py::init<const FdctConfig&, int, int>(), py::arg("config"), py::arg("width"), py::arg("height"))
        .def_property_readonly("config", &CurveletTransform::config)
        .def("forward", [](const CurveletTransform& t, const RealArray& img) { return coeffs_to_list(t.forward(to_image(img))); })
        .def("inverse", [](const CurveletTransform& t, const py::list& c) { return to_array(t.inverse(list_to_coeffs(c, t))); })
        .def("partition_of_unity_error", [](const CurveletTransform& t) { return t.windows().partition_of_unity_error(); });

    py::class_<NoiseProfile>(m, "NoiseProfile")
        .def_readonly("width", &NoiseProfile::width)
        .def_readonly("height", &NoiseProfile::height)
        .def_readonly("config", &NoiseProfile::config)
        .def_readonly("trials", &NoiseProfile::trials)
        .def_readonly("sigma", &NoiseProfile::sigma)
        .def("at", &NoiseProfile::at, py::arg("scale"), py::arg("orientation"));

    m.def("monte_carlo_profile",
          [](int w, int h, const FdctConfig& cfg, int trials, std::uint64_t seed) {
              return monte_carlo_profile(w, h, cfg, trials, RngSeed{seed});
          },
          py::arg("width"), py::arg("height"), py::arg("config"), py::arg("trials") = 10, py::arg("seed") = 0);
    m.def("save_profile", &save_profile, py::arg("profile"), py::arg("path"));
    m.def("load_profile", &load_profile, py::arg("path"));
    m.def("thresholds", py::overload_cast<const NoiseProfile&, double, double>(&thresholds), py::arg("profile"),
          py::arg("sigma"), py::arg("k") = 2.0);

    m.def("magnitude_sensitivity",
          [](double mz, double mn, double pz, double pn) { return magnitude_sensitivity({mz, mn, pz, pn}); },
          py::arg("mag_z"), py::arg("mag_n"), py::arg("phase_z"), py::arg("phase_n"));
    m.def("phase_sensitivity",
          [](double mz, double mn, double pz, double pn) { return phase_sensitivity({mz, mn, pz, pn}); },
          py::arg("mag_z"), py::arg("mag_n"), py::arg("phase_z"), py::arg("phase_n"));

    py::class_<DenoiseParams>(m, "DenoiseParams")
        .def(py::init([](int width, int height) { return default_params(width, height); }), py::arg("width"),
             py::arg("height"))
        .def_readwrite("k", &DenoiseParams::k)
        .def_readwrite("alpha", &DenoiseParams::alpha)
        .def_readwrite("sigma_d_coarse", &DenoiseParams::sigma_d_coarse)
        .def_readwrite("k_r", &DenoiseParams::k_r)
        .def_readwrite("sigma_d_fine", &DenoiseParams::sigma_d_fine)
        .def_readwrite("k1", &DenoiseParams::k1)
        .def_readwrite("gif_radius", &DenoiseParams::gif_radius)
        .def_readwrite("gif_eps_squared", &DenoiseParams::gif_eps_squared)
        .def_readwrite("jbf_enabled", &DenoiseParams::jbf_enabled)
        .def_readwrite("fdct", &DenoiseParams::fdct);

    m.def("add_awgn",
          [](const RealArray& img, double sigma, std::uint64_t seed) {
              return to_array(add_awgn(to_image(img), sigma, RngSeed{seed}));
          },
          py::arg("image"), py::arg("sigma"), py::arg("seed") = 0);

    m.def(
        "denoise",
        [](const RealArray& img, double sigma, const DenoiseParams& p, const NoiseProfile& prof) {
            const Image in = to_image(img);
            Image out;
            {
                py::gil_scoped_release release;
                out = denoise(in, sigma, p, prof);
            }
            return to_array(out);
        },
        py::arg("noisy"), py::arg("sigma"), py::arg("params"), py::arg("profile"));

    m.def("ct_baseline",
          [](const RealArray& img, double sigma, double k, const NoiseProfile& prof) {
              return to_array(ct_baseline(to_image(img), sigma, k, prof));
          },
          py::arg("noisy"), py::arg("sigma"), py::arg("k"), py::arg("profile"));

    m.def("guided_filter_self",
          [](const RealArray& img, int radius, double eps) {
              return to_array(guided_filter_self(to_image(img), GifParams{radius, eps}));
          },
          py::arg("image"), py::arg("radius"), py::arg("epsilon"));
    m.def("box_mean", [](const RealArray& img, int r) { return to_array(box_mean(to_image(img), r)); },
          py::arg("image"), py::arg("radius"));

    m.def("psnr", [](const RealArray& a, const RealArray& b, double peak) { return psnr(to_image(a), to_image(b), peak); },
          py::arg("reference"), py::arg("test"), py::arg("peak") = 255.0);
    m.def("ssim", [](const RealArray& a, const RealArray& b) { return ssim(to_image(a), to_image(b)); },
          py::arg("reference"), py::arg("test"));
    m.def("eki", [](const RealArray& a, const RealArray& b) { return eki(to_image(a), to_image(b)); },
          py::arg("reference"), py::arg("test"));
    m.def("pearson",
          [](const RealArray& a, const RealArray& b) {
              return pearson({a.data(), static_cast<std::size_t>(a.size())}, {b.data(), static_cast<std::size_t>(b.size())});
          },
          py::arg("a"), py::arg("b"));

    m.def("load_image", [](const std::filesystem::path& p) { return to_array(load_image(p)); }, py::arg("path"));
    m.def("save_image", [](const RealArray& img, const std::filesystem::path& p) { save_image(to_image(img), p); },
          py::arg("image"), py::arg("path"));
}
