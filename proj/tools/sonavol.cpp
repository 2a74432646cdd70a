// sonavol: file-based echo-ranging and silhouette volumetry.
//
// Every subcommand prints one JSON document on stdout. Failures print
// {"error": {"stage": ..., "message": ...}} and exit with status 1.

#include "sonavol/channel_sim.hpp"
#include "sonavol/config.hpp"
#include "sonavol/error.hpp"
#include "sonavol/mask.hpp"
#include "sonavol/mls.hpp"
#include "sonavol/pipeline.hpp"
#include "sonavol/synth.hpp"
#include "sonavol/wav.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using nlohmann::json;
using namespace sonavol;

namespace {

struct Options {
    std::string config_path;

    // mls gen
    int order = 10;
    std::vector<int> taps;
    double rate = 48000.0;
    std::string out_path;

    // range sim / est, pipeline
    double height = 0.0;
    std::string snr = "30";
    std::uint64_t seed = 1;
    int repeats = 1;
    bool fractional = false;
    std::string ref_path;
    std::string recorded_path;

    // volume, pipeline
    std::string top_path;
    std::string side_path;
    std::string container;
    double side_scale = 0.0;

    // oracle
    std::string shape = "cone";
    int grid = 512;
    double radius_px = 0.0;
    double height_px = 0.0;
    std::string top_out;
    std::string side_out;
};

[[noreturn]] void fail(const std::string& stage, const std::string& message) {
    std::cout << json{{"error", {{"stage", stage}, {"message", message}}}}.dump(2) << '\n';
    std::exit(1);
}

template <typename F>
auto stage(const std::string& name, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const StageError& e) {
        fail(e.stage(), e.what());
    } catch (const std::exception& e) {
        fail(name, e.what());
    }
}

void emit(const json& j) {
    std::cout << j.dump(2) << '\n';
}

PipelineConfig load(const Options& o) {
    return stage("config", [&] {
        PipelineConfig c = o.config_path.empty() ? config_from_json(json::object()) : load_config(o.config_path);
        if (!o.container.empty()) {
            if (o.container != "plate" && o.container != "bowl") {
                throw std::invalid_argument("--container must be 'plate' or 'bowl'");
            }
            c.container = o.container == "bowl" ? ContainerClass::Bowl : ContainerClass::Plate;
        }
        if (o.side_scale > 0.0) {
            c.side_scale = o.side_scale;
        }
        return c;
    });
}

std::vector<double> read_reference(const std::string& path, const PipelineConfig& config) {
    const auto ref = wav::read(path, TraceRole::Reference);
    if (ref.sample_rate != config.ranging.sample_rate) {
        throw std::invalid_argument("reference sample rate " + std::to_string(ref.sample_rate) +
                                    " Hz differs from configured " + std::to_string(config.ranging.sample_rate) +
                                    " Hz");
    }
    return ref.samples;
}

void cmd_mls_gen(const Options& o) {
    stage("mls", [&] {
        std::optional<mls::TapSet> taps;
        if (!o.taps.empty()) {
            taps = o.taps;
        }
        const auto seq = mls::generate_mls(o.order, taps);
        wav::write(o.out_path, EchoTrace{seq.samples(), o.rate, TraceRole::Reference});
        emit({{"order", seq.order()},
              {"taps", seq.taps()},
              {"length", seq.length()},
              {"sample_rate", o.rate},
              {"duration_s", static_cast<double>(seq.length()) / o.rate},
              {"output", o.out_path}});
    });
}

void cmd_range_sim(const Options& o, bool height_given) {
    const auto config = load(o);
    stage("channel_sim", [&] {
        const auto ref = read_reference(o.ref_path, config);
        channel::Channel ch;
        if (height_given) {
            channel::ScenarioOptions opt = config.scenario;
            if (o.snr == "none") {
                opt.noise_snr_db.reset();
            } else if (auto env = channel::environment_snr_db(o.snr)) {
                opt.noise_snr_db = env;
            } else {
                opt.noise_snr_db = std::stod(o.snr);
            }
            if (o.fractional) {
                opt.delay_mode = channel::DelayMode::Fractional;
            }
            ch = channel::scenario_from_geometry(o.height, config.ranging, opt);
        } else if (config.channel) {
            ch = *config.channel;
        } else {
            throw std::invalid_argument("give --height or a 'channel' section in the config");
        }
        if (o.repeats < 1) {
            throw std::invalid_argument("--repeats must be at least 1");
        }

        // Repeated probes are laid out one per retry interval.
        const auto window = static_cast<std::size_t>(std::llround(config.ranging.retry_interval * ch.sample_rate));
        EchoTrace rec;
        rec.sample_rate = ch.sample_rate;
        for (int r = 0; r < o.repeats; ++r) {
            auto part = channel::simulate_channel(ref, ch, o.seed + static_cast<std::uint64_t>(r),
                                                  o.repeats > 1 ? window : 0);
            if (o.repeats > 1 && part.size() > window) {
                throw std::invalid_argument("probe does not fit in one retry interval");
            }
            rec.samples.insert(rec.samples.end(), part.samples.begin(), part.samples.end());
        }
        wav::write(o.out_path, rec, wav::Scaling::NormalizePeak);
        emit({{"channel", to_json(ch)},
              {"seed", o.seed},
              {"repeats", o.repeats},
              {"samples", rec.size()},
              {"output", o.out_path}});
    });
}

void cmd_range_est(const Options& o) {
    const auto config = load(o);
    stage("ranging", [&] {
        const auto ref = read_reference(o.ref_path, config);
        const auto rec = wav::read(o.recorded_path, TraceRole::Recorded);
        emit(to_json(ranging::range_recording(rec, ref, config.ranging)));
    });
}

void cmd_scale(const Options& o) {
    const auto config = load(o);
    stage("geometry", [&] { emit(to_json(geometry::meters_per_pixel(o.height, config.camera))); });
}

void cmd_volume(const Options& o) {
    const auto config = load(o);
    const auto scale = stage("geometry", [&] { return geometry::meters_per_pixel(o.height, config.camera); });
    stage("volumetry", [&] {
        const auto top = volumetry::top_area(mask_io::read_mask(o.top_path, View::Top), scale);
        const auto profile = volumetry::side_profile(mask_io::read_mask(o.side_path, View::Side));
        auto report = to_json(volumetry::estimate_volume(top.area_m2, top.width_m, profile, config.side_scale));
        report["schema_version"] = kReportSchemaVersion;
        report["height_m"] = o.height;
        report["scale"] = to_json(scale);
        report["container"] = std::string(to_string(config.container));
        emit(report);
    });
}

void cmd_oracle(const Options& o) {
    stage("volumetry", [&] {
        const auto shape = synth::parse_shape(o.shape);
        if (!shape) {
            throw std::invalid_argument("unknown shape '" + o.shape + "'");
        }
        const double radius = o.radius_px > 0.0 ? o.radius_px : o.grid / 4.0;
        const double height = o.height_px > 0.0 ? o.height_px : o.grid / 2.0;
        const auto solid = synth::synth_solid(*shape, radius, height, o.grid);
        if (!o.top_out.empty()) {
            mask_io::write_pgm(o.top_out, solid.top);
        }
        if (!o.side_out.empty()) {
            mask_io::write_pgm(o.side_out, solid.side);
        }
        const auto top = volumetry::top_area(solid.top, {static_cast<double>(o.grid), 1.0});
        const auto model = volumetry::estimate_volume(top.area_m2, top.width_m, volumetry::side_profile(solid.side));
        const double voxel = solid.voxel_volume();
        const double analytic = solid.analytic_volume();
        emit({{"shape", std::string(synth::to_string(*shape))},
              {"grid", o.grid},
              {"radius_px", solid.radius_px},
              {"height_px", solid.height_px},
              {"model_volume_px3", model.volume_m3},
              {"voxel_volume_px3", voxel},
              {"analytic_volume_px3", analytic},
              {"rel_error_vs_voxel", (model.volume_m3 - voxel) / voxel},
              {"rel_error_vs_analytic", (model.volume_m3 - analytic) / analytic}});
    });
}

void cmd_pipeline(const Options& o) {
    const auto config = load(o);
    const auto inputs = stage("input", [&] {
        struct Inputs {
            std::vector<double> ref;
            EchoTrace rec;
            FoodMask top;
        };
        return Inputs{read_reference(o.ref_path, config), wav::read(o.recorded_path, TraceRole::Recorded),
                      mask_io::read_mask(o.top_path, View::Top)};
    });
    const auto side = stage("volumetry", [&]() -> std::optional<FoodMask> {
        if (o.side_path.empty()) {
            return std::nullopt;
        }
        return mask_io::read_mask(o.side_path, View::Side);
    });
    stage("pipeline", [&] { emit(to_json(run_pipeline(config, inputs.rec, inputs.ref, inputs.top, side))); });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Echo-ranged food volume estimation from top and side masks"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);

    auto* mls_cmd = app.add_subcommand("mls", "Maximum length sequences")->require_subcommand(1);
    auto* gen = mls_cmd->add_subcommand("gen", "Write one MLS period as a 16-bit WAV");
    gen->add_option("--order", o.order, "Register length n (period 2^n - 1)")->capture_default_str();
    gen->add_option("--taps", o.taps, "Feedback taps, 1-based stage indices")->delimiter(',');
    gen->add_option("--rate", o.rate, "Sample rate in Hz")->capture_default_str();
    gen->add_option("-o,--output", o.out_path, "Output WAV")->required();

    auto* range = app.add_subcommand("range", "Acoustic echo ranging")->require_subcommand(1);
    auto* sim = range->add_subcommand("sim", "Simulate a recording through a multipath channel");
    auto* height_opt = sim->add_option("--height", o.height, "Phone height above the table in meters");
    sim->add_option("--snr", o.snr, "SNR in dB, 'none', or quiet/restaurant/cafeteria")->capture_default_str();
    sim->add_option("--seed", o.seed, "Noise seed")->capture_default_str();
    sim->add_option("--repeats", o.repeats, "Probes to record, one per retry interval")->capture_default_str();
    sim->add_flag("--fractional", o.fractional, "Sub-sample delays by windowed-sinc interpolation");
    sim->add_option("--ref", o.ref_path, "Reference MLS WAV")->required()->check(CLI::ExistingFile);
    sim->add_option("-o,--output", o.out_path, "Output WAV")->required();

    auto* est = range->add_subcommand("est", "Estimate height from a recording");
    est->add_option("--recorded", o.recorded_path, "Recorded WAV")->required()->check(CLI::ExistingFile);
    est->add_option("--ref", o.ref_path, "Reference MLS WAV")->required()->check(CLI::ExistingFile);
    est->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);

    auto* scale = app.add_subcommand("scale", "Meters per pixel at a given height");
    scale->add_option("--height", o.height, "Camera height in meters")->required();
    scale->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);

    auto* volume = app.add_subcommand("volume", "Volume from top and side masks at a known height");
    volume->add_option("--top", o.top_path, "Top-view mask (PGM or PNG)")->required()->check(CLI::ExistingFile);
    volume->add_option("--side", o.side_path, "Side-view mask (PGM or PNG)")->required()->check(CLI::ExistingFile);
    volume->add_option("--height", o.height, "Camera height in meters")->required();
    volume->add_option("--container", o.container, "plate or bowl");
    volume->add_option("--side-scale", o.side_scale, "Side image meters per pixel (explicit calibration)");
    volume->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);

    auto* oracle = app.add_subcommand("oracle", "Compare the slab model with a voxel count");
    oracle->add_option("--shape", o.shape, "cylinder, cone, hemisphere or ellipsoid-cap")->capture_default_str();
    oracle->add_option("--grid", o.grid, "Lattice size")->capture_default_str();
    oracle->add_option("--radius", o.radius_px, "Radius in pixels (default grid/4)");
    oracle->add_option("--height", o.height_px, "Height in pixels (default grid/2)");
    oracle->add_option("--top-out", o.top_out, "Write the top silhouette as PGM");
    oracle->add_option("--side-out", o.side_out, "Write the side silhouette as PGM");

    auto* pipe = app.add_subcommand("pipeline", "Recording and masks in, volume report out");
    pipe->add_option("--recorded", o.recorded_path, "Recorded WAV")->required()->check(CLI::ExistingFile);
    pipe->add_option("--ref", o.ref_path, "Reference MLS WAV")->required()->check(CLI::ExistingFile);
    pipe->add_option("--top", o.top_path, "Top-view mask")->required()->check(CLI::ExistingFile);
    pipe->add_option("--side", o.side_path, "Side-view mask")->check(CLI::ExistingFile);
    pipe->add_option("--container", o.container, "plate or bowl");
    pipe->add_option("--side-scale", o.side_scale, "Side image meters per pixel (explicit calibration)");
    pipe->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cout << json{{"error", {{"stage", "cli"}, {"message", e.what()}}}}.dump(2) << '\n';
        return 2;
    }

    if (*gen) {
        cmd_mls_gen(o);
    } else if (*sim) {
        cmd_range_sim(o, height_opt->count() > 0);
    } else if (*est) {
        cmd_range_est(o);
    } else if (*scale) {
        cmd_scale(o);
    } else if (*volume) {
        cmd_volume(o);
    } else if (*oracle) {
        cmd_oracle(o);
    } else if (*pipe) {
        cmd_pipeline(o);
    }
    return 0;
}
