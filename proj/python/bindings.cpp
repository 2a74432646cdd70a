#include "sonavol/channel_sim.hpp"
#include "sonavol/config.hpp"
#include "sonavol/error.hpp"
#include "sonavol/geometry.hpp"
#include "sonavol/mask.hpp"
#include "sonavol/mls.hpp"
#include "sonavol/pipeline.hpp"
#include "sonavol/ranging.hpp"
#include "sonavol/synth.hpp"
#include "sonavol/volumetry.hpp"
#include "sonavol/wav.hpp"

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

namespace py = pybind11;
using namespace sonavol;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ByteArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const DoubleArray& a) {
    if (a.ndim() != 1) {
        throw std::invalid_argument("expected a 1-D array");
    }
    return {a.data(), a.data() + a.size()};
}

py::array_t<double> to_array(const std::vector<double>& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(double));
    return out;
}

FoodMask to_mask(const ByteArray& a, View view) {
    if (a.ndim() != 2) {
        throw std::invalid_argument("mask must be a 2-D array");
    }
    const auto h = static_cast<int>(a.shape(0));
    const auto w = static_cast<int>(a.shape(1));
    return FoodMask(w, h, std::vector<std::uint8_t>(a.data(), a.data() + a.size()), view);
}

py::array_t<std::uint8_t> to_array(const FoodMask& m) {
    py::array_t<std::uint8_t> out({m.height(), m.width()});
    const auto bits = m.bits();
    std::memcpy(out.mutable_data(), bits.data(), bits.size());
    return out;
}

nlohmann::json to_json_value(const py::object& obj) {
    if (obj.is_none()) {
        return nlohmann::json::object();
    }
    auto dumps = py::module_::import("json").attr("dumps");
    return nlohmann::json::parse(dumps(obj).cast<std::string>());
}

py::object from_json_value(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

PipelineConfig config_arg(const py::object& obj) {
    return config_from_json(to_json_value(obj));
}

EchoTrace trace_arg(const DoubleArray& samples, double rate) {
    return EchoTrace{to_vector(samples), rate, TraceRole::Recorded};
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Echo-ranged food volume estimation";

    py::register_exception<RangingError>(m, "RangingError", PyExc_RuntimeError);
    PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> stage_error;
    stage_error.call_once_and_store_result([&]() { return py::object(py::exception<StageError>(m, "StageError", PyExc_RuntimeError)); });
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const StageError& e) {
            const auto& type = stage_error.get_stored();
            py::object exc = type(e.what());
            exc.attr("stage") = e.stage();
            PyErr_SetObject(type.ptr(), exc.ptr());
        }
    });

    py::enum_<View>(m, "View").value("TOP", View::Top).value("SIDE", View::Side);

    // mls
    m.def(
        "generate_mls",
        [](int order, std::optional<mls::TapSet> taps, std::optional<mls::RegisterState> seed) {
            return to_array(mls::generate_mls(order, std::move(taps), std::move(seed)).samples());
        },
        py::arg("order"), py::arg("taps") = py::none(), py::arg("seed") = py::none(),
        "One period of a +/-1 maximum length sequence.");
    m.def("default_taps", &mls::default_taps, py::arg("order"));
    m.def(
        "circular_autocorrelation",
        [](const DoubleArray& seq) {
            const auto v = to_vector(seq);
            return to_array(mls::circular_autocorrelation(v).values);
        },
        py::arg("seq"), "Unit-peak periodic autocorrelation, indexed by lag.");
    m.def(
        "cross_correlate",
        [](const DoubleArray& recorded, const DoubleArray& reference) {
            const auto r = to_vector(recorded);
            const auto ref = to_vector(reference);
            return to_array(mls::cross_correlate(r, ref).values);
        },
        py::arg("recorded"), py::arg("reference"), "Linear cross-correlation at non-negative lags.");

    // channel
    m.def(
        "simulate",
        [](const DoubleArray& reference, double height_m, std::optional<double> snr_db, std::uint64_t seed,
           bool fractional, const py::object& config) {
            const auto cfg = config_arg(config);
            auto opt = cfg.scenario;
            opt.noise_snr_db = snr_db;
            if (fractional) {
                opt.delay_mode = channel::DelayMode::Fractional;
            }
            const auto ch = channel::scenario_from_geometry(height_m, cfg.ranging, opt);
            const auto ref = to_vector(reference);
            return to_array(channel::simulate_channel(ref, ch, seed).samples);
        },
        py::arg("reference"), py::arg("height_m"), py::arg("snr_db") = py::none(), py::arg("seed") = 1,
        py::arg("fractional") = false, py::arg("config") = py::none(),
        "Recording of the reference through the direct and table-echo paths.");
    m.def(
        "simulate_channel",
        [](const DoubleArray& reference, const py::object& channel, std::uint64_t seed, std::size_t min_length) {
            const auto ch = channel_from_json(to_json_value(channel));
            const auto ref = to_vector(reference);
            return to_array(channel::simulate_channel(ref, ch, seed, min_length).samples);
        },
        py::arg("reference"), py::arg("channel"), py::arg("seed") = 1, py::arg("min_length") = 0);
    m.def("environment_snr_db", [](const std::string& name) { return channel::environment_snr_db(name); });

    // ranging
    m.def(
        "height_from_gap",
        [](double gap_s, const py::object& config) { return ranging::height_from_gap(gap_s, config_arg(config).ranging); },
        py::arg("gap_s"), py::arg("config") = py::none());
    m.def(
        "range_recording",
        [](const DoubleArray& recorded, const DoubleArray& reference, double sample_rate, const py::object& config) {
            const auto cfg = config_arg(config);
            const auto ref = to_vector(reference);
            return from_json_value(
                to_json(ranging::range_recording(trace_arg(recorded, sample_rate), ref, cfg.ranging)));
        },
        py::arg("recorded"), py::arg("reference"), py::arg("sample_rate") = 48000.0, py::arg("config") = py::none(),
        "Height estimate from a recording split into retry-interval windows.");
    m.def(
        "range_with_retry",
        [](const std::function<DoubleArray(int)>& source, const DoubleArray& reference, const py::object& config) {
            const auto cfg = config_arg(config);
            const auto ref = to_vector(reference);
            const double rate = cfg.ranging.sample_rate;
            const ranging::TraceSource adapter = [&](int attempt) { return trace_arg(source(attempt), rate); };
            return from_json_value(to_json(ranging::range_with_retry(adapter, ref, cfg.ranging)));
        },
        py::arg("source"), py::arg("reference"), py::arg("config") = py::none(),
        "Retry loop; source(attempt) returns the recording for that attempt.");

    // geometry and volumetry
    m.def(
        "meters_per_pixel",
        [](double height_m, const py::object& config) {
            return from_json_value(to_json(geometry::meters_per_pixel(height_m, config_arg(config).camera)));
        },
        py::arg("height_m"), py::arg("config") = py::none());
    m.def(
        "volume",
        [](const ByteArray& top, const ByteArray& side, double height_m, const py::object& config) {
            const auto cfg = config_arg(config);
            const auto scale = geometry::meters_per_pixel(height_m, cfg.camera);
            const auto t = volumetry::top_area(to_mask(top, View::Top), scale);
            const auto profile = volumetry::side_profile(to_mask(side, View::Side));
            return from_json_value(to_json(volumetry::estimate_volume(t.area_m2, t.width_m, profile, cfg.side_scale)));
        },
        py::arg("top"), py::arg("side"), py::arg("height_m"), py::arg("config") = py::none());
    m.def(
        "side_profile",
        [](const ByteArray& side) { return volumetry::side_profile(to_mask(side, View::Side)).widths; },
        py::arg("side"), "Food width per row, bottom row first.");
    m.def(
        "iou",
        [](const ByteArray& pred, const ByteArray& truth) {
            const auto r = volumetry::iou(to_mask(pred, View::Top), to_mask(truth, View::Top));
            py::dict d;
            d["food"] = r.food;
            d["background"] = r.background;
            d["mean"] = r.mean;
            return d;
        },
        py::arg("pred"), py::arg("truth"));
    m.def(
        "miou",
        [](const ByteArray& pred, const ByteArray& truth) {
            return volumetry::miou(to_mask(pred, View::Top), to_mask(truth, View::Top));
        },
        py::arg("pred"), py::arg("truth"));

    // masks
    m.def(
        "read_mask", [](const std::filesystem::path& p) { return to_array(mask_io::read_mask(p, View::Top)); },
        py::arg("path"));
    m.def(
        "write_pgm",
        [](const std::filesystem::path& p, const ByteArray& mask) { mask_io::write_pgm(p, to_mask(mask, View::Top)); },
        py::arg("path"), py::arg("mask"));

    // wav
    m.def(
        "read_wav",
        [](const std::filesystem::path& p) {
            const auto t = wav::read(p, TraceRole::Recorded);
            return py::make_tuple(to_array(t.samples), t.sample_rate);
        },
        py::arg("path"), "Returns (samples, sample_rate).");
    m.def(
        "write_wav",
        [](const std::filesystem::path& p, const DoubleArray& samples, double rate, bool normalize) {
            wav::write(p, trace_arg(samples, rate), normalize ? wav::Scaling::NormalizePeak : wav::Scaling::Clip);
        },
        py::arg("path"), py::arg("samples"), py::arg("sample_rate") = 48000.0, py::arg("normalize") = false);

    // synthetic solids
    m.def(
        "synth_solid",
        [](const std::string& shape, double radius_px, double height_px, int grid) {
            const auto s = synth::parse_shape(shape);
            if (!s) {
                throw std::invalid_argument("unknown shape '" + shape + "'");
            }
            const auto solid = synth::synth_solid(*s, radius_px, height_px, grid);
            py::dict d;
            d["top"] = to_array(solid.top);
            d["side"] = to_array(solid.side);
            d["height_px"] = solid.height_px;
            d["voxel_count"] = solid.voxel_count;
            d["analytic_volume_px3"] = solid.analytic_volume();
            return d;
        },
        py::arg("shape"), py::arg("radius_px"), py::arg("height_px"), py::arg("grid") = 512);

    m.def(
        "run_pipeline",
        [](const DoubleArray& recorded, const DoubleArray& reference, const ByteArray& top,
           std::optional<ByteArray> side, const py::object& config) {
            const auto cfg = config_arg(config);
            std::optional<FoodMask> side_mask;
            if (side) {
                side_mask = to_mask(*side, View::Side);
            }
            const auto ref = to_vector(reference);
            const auto report =
                run_pipeline(cfg, trace_arg(recorded, cfg.ranging.sample_rate), ref, to_mask(top, View::Top), side_mask);
            return from_json_value(to_json(report));
        },
        py::arg("recorded"), py::arg("reference"), py::arg("top"), py::arg("side") = py::none(),
        py::arg("config") = py::none());

    m.attr("__version__") = VERSION_INFO;
    m.attr("REPORT_SCHEMA_VERSION") = kReportSchemaVersion;
}
