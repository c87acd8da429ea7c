#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "depthsr/chain.hpp"
#include "depthsr/dataio.hpp"
#include "depthsr/degrade.hpp"
#include "depthsr/metrics.hpp"
#include "depthsr/restore.hpp"
#include "depthsr/scene.hpp"

namespace py = pybind11;
using namespace depthsr;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

DepthMap to_depth(const Array& a) {
    if (a.ndim() != 2) throw std::invalid_argument("depth map must be a 2-D array (height, width)");
    DepthMap m(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    std::memcpy(m.storage().data(), a.data(), m.storage().size() * sizeof(double));
    return m;
}

RgbImage to_rgb(const Array& a) {
    if (a.ndim() != 3 || a.shape(2) != 3) throw std::invalid_argument("guide must be a (height, width, 3) array");
    RgbImage m(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    std::memcpy(m.storage().data(), a.data(), m.storage().size() * sizeof(double));
    return m;
}

template <int C>
Array to_array(const Grid<double, C>& g) {
    std::vector<py::ssize_t> shape{g.height(), g.width()};
    if (C > 1) shape.push_back(C);
    Array out(shape);
    std::memcpy(out.mutable_data(), g.storage().data(), g.storage().size() * sizeof(double));
    return out;
}

std::optional<PixelMask> to_mask(const std::optional<py::array_t<bool, py::array::c_style | py::array::forcecast>>& a,
                                 const DepthMap& like) {
    if (!a) return std::nullopt;
    if (a->ndim() != 2 || a->shape(0) != like.height() || a->shape(1) != like.width()) {
        throw std::invalid_argument("mask shape does not match the depth map");
    }
    PixelMask m(like.width(), like.height());
    const bool* src = a->data();
    for (std::size_t i = 0; i < m.storage().size(); ++i) m.storage()[i] = src[i] ? 1 : 0;
    return m;
}

using MaskArg = std::optional<py::array_t<bool, py::array::c_style | py::array::forcecast>>;

}  // namespace

PYBIND11_MODULE(_depthsr, m) {
    m.doc() = "Depth map degradation, guided restoration and evaluation";

    py::register_exception<DegenerateFitError>(m, "DegenerateFitError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<QuantSpec>(m, "QuantSpec")
        .def(py::init([](int bits, double d_min, double d_max) {
                 QuantSpec s{bits, d_min, d_max};
                 s.validate();
                 return s;
             }),
             py::arg("bits") = 12, py::arg("d_min") = 0.0, py::arg("d_max") = 20.0)
        .def_readwrite("bits", &QuantSpec::bits)
        .def_readwrite("d_min", &QuantSpec::d_min)
        .def_readwrite("d_max", &QuantSpec::d_max)
        .def_property_readonly("step", &QuantSpec::step)
        .def_property_readonly("max_level", &QuantSpec::max_level);

    py::class_<DegradationConfig>(m, "DegradationConfig")
        .def(py::init<>())
        .def_readwrite("quant", &DegradationConfig::quant)
        .def_readwrite("factor", &DegradationConfig::factor)
        .def_readwrite("seed", &DegradationConfig::seed)
        .def_readwrite("clamp_nonneg", &DegradationConfig::clamp_nonneg)
        .def_property(
            "sigma_r2", [](const DegradationConfig& c) { return c.noise.sigma_r2; },
            [](DegradationConfig& c, double v) { c.noise.sigma_r2 = v; })
        .def_property(
            "sigma_a2", [](const DegradationConfig& c) { return c.noise.sigma_a2; },
            [](DegradationConfig& c, double v) { c.noise.sigma_a2 = v; })
        .def_property(
            "downscale_method",
            [](const DegradationConfig& c) { return std::string(to_string(c.downscale_method)); },
            [](DegradationConfig& c, const std::string& v) { c.downscale_method = parse_resample_method(v); })
        .def("to_json", [](const DegradationConfig& c) { return config_to_json(c); })
        .def_static("from_json", &config_from_json);

    m.def(
        "bitdepth_reduce", [](const Array& d, const QuantSpec& s) { return to_array(bitdepth_reduce(to_depth(d), s)); },
        py::arg("depth"), py::arg("spec") = QuantSpec{});
    m.def(
        "downscale",
        [](const Array& d, int factor, const std::string& method) {
            return to_array(downscale(to_depth(d), factor, parse_resample_method(method)));
        },
        py::arg("depth"), py::arg("factor") = 8, py::arg("method") = "block-mean");
    m.def(
        "upscale",
        [](const Array& d, int factor, const std::string& method) {
            return to_array(upscale(to_depth(d), factor, parse_resample_method(method)));
        },
        py::arg("depth"), py::arg("factor") = 8, py::arg("method") = "bicubic");
    m.def(
        "add_noise",
        [](const Array& d, double sigma_r2, double sigma_a2, std::uint64_t seed, const std::string& id, bool clamp) {
            RngStream rng(seed, id);
            return to_array(add_noise(to_depth(d), NoiseParams{sigma_r2, sigma_a2}, rng, clamp));
        },
        py::arg("depth"), py::arg("sigma_r2") = 0.02, py::arg("sigma_a2") = 0.05, py::arg("seed") = 0,
        py::arg("id") = "", py::arg("clamp") = false);
    m.def(
        "degrade",
        [](const Array& hr, const DegradationConfig& c, const std::string& id) {
            return to_array(degrade(to_depth(hr), c, id).lq);
        },
        py::arg("hr"), py::arg("config") = DegradationConfig{}, py::arg("id") = "");

    m.def(
        "mae", [](const Array& p, const Array& g, const MaskArg& mask) {
            const DepthMap pd = to_depth(p), gd = to_depth(g);
            const auto mk = to_mask(mask, gd);
            return mk ? mae(pd, gd, *mk) : mae(pd, gd);
        },
        py::arg("pred"), py::arg("gt"), py::arg("mask") = py::none());
    m.def(
        "rmse", [](const Array& p, const Array& g, const MaskArg& mask) {
            const DepthMap pd = to_depth(p), gd = to_depth(g);
            const auto mk = to_mask(mask, gd);
            return mk ? rmse(pd, gd, *mk) : rmse(pd, gd);
        },
        py::arg("pred"), py::arg("gt"), py::arg("mask") = py::none());
    m.def(
        "silog", [](const Array& p, const Array& g, double lambda) { return silog(to_depth(p), to_depth(g), lambda); },
        py::arg("pred"), py::arg("gt"), py::arg("lam") = 0.5);
    m.def(
        "silog_scaled",
        [](const Array& p, const Array& g, double lambda, double alpha) {
            return silog_scaled(to_depth(p), to_depth(g), SilogParams{lambda, alpha});
        },
        py::arg("pred"), py::arg("gt"), py::arg("lam") = 0.85, py::arg("alpha") = 10.0);

    m.def(
        "jbu",
        [](const Array& lq, const Array& guide, double sigma_spatial, double sigma_range) {
            return to_array(jbu(to_depth(lq), to_rgb(guide), JbuParams{sigma_spatial, sigma_range}));
        },
        py::arg("lq"), py::arg("guide"), py::arg("sigma_spatial") = 2.0, py::arg("sigma_range") = 0.1);
    m.def(
        "guided_filter",
        [](const Array& lq, const Array& guide, int radius, double eps) {
            return to_array(guided_filter_upsample(to_depth(lq), to_rgb(guide), GuidedFilterParams{radius, eps}));
        },
        py::arg("lq"), py::arg("guide"), py::arg("radius") = 4, py::arg("eps") = 1e-3);
    m.def(
        "restore",
        [](const std::string& chain, const Array& lq, const std::optional<Array>& guide) {
            const Restorer r = build_restorer(chain);
            return to_array(r(to_depth(lq), guide ? to_rgb(*guide) : RgbImage{}));
        },
        py::arg("chain"), py::arg("lq"), py::arg("guide") = py::none(),
        "Runs a restorer chain such as 'jbu|clip:0.1,20'.");
    m.def("canonical_chain", [](const std::string& chain) { return format_chain(parse_chain(chain)); });

    m.def(
        "theil_sen",
        [](const std::vector<double>& xs, const std::vector<double>& ys) {
            const LineFit f = fit_theil_sen(xs, ys);
            return py::make_tuple(f.slope, f.intercept);
        },
        py::arg("xs"), py::arg("ys"));
    m.def(
        "fit_scale_offset",
        [](const Array& pred, const Array& target, const MaskArg& mask, bool robust) {
            const DepthMap p = to_depth(pred), t = to_depth(target);
            const PixelMask mk = to_mask(mask, p).value_or(full_mask(p.width(), p.height()));
            const ScaleOffset st = fit_scale_offset_lsq(p, t, mk, robust);
            return py::make_tuple(st.s, st.t);
        },
        py::arg("pred"), py::arg("target"), py::arg("mask") = py::none(), py::arg("robust") = false);
    m.def(
        "align_prediction",
        [](const Array& pred, const Array& lq, double global_scale, bool robust) {
            const DepthMap p = to_depth(pred), l = to_depth(lq);
            if (l.width() == 0 || p.width() % l.width() != 0) {
                throw std::invalid_argument("prediction width is not a multiple of the LQ width");
            }
            return to_array(align_prediction(p, l, AlignParams{global_scale, p.width() / l.width(), robust}));
        },
        py::arg("pred"), py::arg("lq"), py::arg("global_scale") = 16.0, py::arg("robust") = false);

    m.def(
        "generate_scene",
        [](const std::string& kind, int width, int height, std::uint64_t seed, double depth_min, double depth_max) {
            SceneSpec s{parse_scene_kind(kind), width, height, depth_min, depth_max, seed};
            const Scene sc = generate_scene(s);
            return py::make_tuple(to_array(sc.depth), to_array(sc.rgb));
        },
        py::arg("kind") = "steps", py::arg("width") = 512, py::arg("height") = 512, py::arg("seed") = 0,
        py::arg("depth_min") = 1.0, py::arg("depth_max") = 20.0, "Returns (depth, rgb).");

    m.def("read_depth", [](const std::filesystem::path& p) { return to_array(read_depth(p)); });
    m.def("write_pfm", [](const Array& d, const std::filesystem::path& p) { write_pfm(to_depth(d), p); });
    m.def("read_rgb", [](const std::filesystem::path& p) { return to_array(read_rgb(p)); });
}
