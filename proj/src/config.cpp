#include "sonavol/config.hpp"

#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace sonavol {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, std::string_view section, std::initializer_list<std::string_view> known) {
    if (!obj.is_object()) {
        throw std::invalid_argument("config: '" + std::string(section) + "' must be an object");
    }
    for (const auto& [key, _] : obj.items()) {
        bool found = false;
        for (auto k : known) {
            found = found || key == k;
        }
        if (!found) {
            throw std::invalid_argument("config: unknown key '" + key + "' in '" + std::string(section) + "'");
        }
    }
}

template <typename T>
void read_if(const json& obj, const char* key, T& dst) {
    if (auto it = obj.find(key); it != obj.end()) {
        dst = it->get<T>();
    }
}

channel::DelayMode parse_delay_mode(const std::string& s) {
    if (s == "integer") {
        return channel::DelayMode::Integer;
    }
    if (s == "fractional") {
        return channel::DelayMode::Fractional;
    }
    throw std::invalid_argument("config: delay_mode must be 'integer' or 'fractional'");
}

std::vector<channel::Path> paths_from_json(const json& arr) {
    if (!arr.is_array()) {
        throw std::invalid_argument("config: paths must be an array");
    }
    std::vector<channel::Path> out;
    for (const auto& p : arr) {
        reject_unknown(p, "paths[]", {"delay_s", "gain"});
        out.push_back({p.at("delay_s").get<double>(), p.value("gain", 1.0)});
    }
    return out;
}

std::optional<double> snr_from_json(const json& v) {
    if (v.is_null()) {
        return std::nullopt;
    }
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "none") {
            return std::nullopt;
        }
        if (auto env = channel::environment_snr_db(s)) {
            return env;
        }
        throw std::invalid_argument("config: unknown noise environment '" + s + "'");
    }
    return v.get<double>();
}

} // namespace

std::string_view to_string(ContainerClass c) noexcept {
    return c == ContainerClass::Bowl ? "bowl" : "plate";
}

void PipelineConfig::validate() const {
    camera.validate();
    ranging.validate();
    if (mls_order < mls::kMinOrder || mls_order > mls::kMaxOrder) {
        throw std::invalid_argument("config: mls.order out of range");
    }
    if (!(mls_rate > 0.0)) {
        throw std::invalid_argument("config: mls.rate_hz must be positive");
    }
    if (side_scale && !(*side_scale > 0.0)) {
        throw std::invalid_argument("config: side scale must be positive");
    }
    if (channel) {
        channel->validate();
    }
}

channel::Channel channel_from_json(const json& j) {
    reject_unknown(j, "channel", {"paths", "noise_snr_db", "sample_rate", "delay_mode"});
    channel::Channel ch;
    ch.paths = paths_from_json(j.at("paths"));
    if (auto it = j.find("noise_snr_db"); it != j.end()) {
        ch.noise_snr_db = snr_from_json(*it);
    }
    read_if(j, "sample_rate", ch.sample_rate);
    if (auto it = j.find("delay_mode"); it != j.end()) {
        ch.delay_mode = parse_delay_mode(it->get<std::string>());
    }
    ch.validate();
    return ch;
}

PipelineConfig config_from_json(const json& j) {
    reject_unknown(j, "<root>", {"camera", "ranging", "mls", "container", "calibration", "scenario", "channel"});
    PipelineConfig c;

    if (auto it = j.find("camera"); it != j.end()) {
        reject_unknown(*it, "camera", {"focal_length_m", "sensor_width_m", "image_width_px"});
        read_if(*it, "focal_length_m", c.camera.focal_length_m);
        read_if(*it, "sensor_width_m", c.camera.sensor_width_m);
        read_if(*it, "image_width_px", c.camera.image_width_px);
    }
    if (auto it = j.find("ranging"); it != j.end()) {
        const json& r = *it;
        reject_unknown(r, "ranging",
                       {"speed_of_sound_mps", "speaker_mic_distance_m", "sample_rate_hz", "peak_threshold_ratio",
                        "min_peak_separation_s", "min_peak_prominence", "parabolic_interpolation", "height_min_m",
                        "height_max_m", "retry_interval_s", "max_attempts"});
        read_if(r, "speed_of_sound_mps", c.ranging.speed_of_sound);
        read_if(r, "speaker_mic_distance_m", c.ranging.speaker_mic_distance);
        read_if(r, "sample_rate_hz", c.ranging.sample_rate);
        read_if(r, "peak_threshold_ratio", c.ranging.peak_threshold_ratio);
        read_if(r, "min_peak_separation_s", c.ranging.min_peak_separation);
        read_if(r, "min_peak_prominence", c.ranging.min_peak_prominence);
        read_if(r, "parabolic_interpolation", c.ranging.parabolic_interpolation);
        read_if(r, "height_min_m", c.ranging.height_min);
        read_if(r, "height_max_m", c.ranging.height_max);
        read_if(r, "retry_interval_s", c.ranging.retry_interval);
        read_if(r, "max_attempts", c.ranging.max_attempts);
    }
    if (auto it = j.find("mls"); it != j.end()) {
        reject_unknown(*it, "mls", {"order", "rate_hz"});
        read_if(*it, "order", c.mls_order);
        read_if(*it, "rate_hz", c.mls_rate);
    }
    if (auto it = j.find("container"); it != j.end()) {
        const auto s = it->get<std::string>();
        if (s != "plate" && s != "bowl") {
            throw std::invalid_argument("config: container must be 'plate' or 'bowl'");
        }
        c.container = s == "bowl" ? ContainerClass::Bowl : ContainerClass::Plate;
    }
    if (auto it = j.find("calibration"); it != j.end()) {
        reject_unknown(*it, "calibration", {"mode", "side_scale_m_per_px"});
        const bool has_scale = it->contains("side_scale_m_per_px");
        const auto mode = it->value("mode", std::string(has_scale ? "explicit-side-scale" : "width-matching"));
        if (mode == "explicit-side-scale") {
            c.side_scale = it->at("side_scale_m_per_px").get<double>();
        } else if (mode != "width-matching") {
            throw std::invalid_argument("config: calibration.mode must be 'width-matching' or 'explicit-side-scale'");
        } else if (has_scale) {
            throw std::invalid_argument("config: side_scale_m_per_px given with width-matching calibration");
        }
    }
    if (auto it = j.find("scenario"); it != j.end()) {
        reject_unknown(*it, "scenario", {"echo_gain", "clutter", "noise_snr_db", "delay_mode"});
        read_if(*it, "echo_gain", c.scenario.echo_gain);
        if (auto cl = it->find("clutter"); cl != it->end()) {
            c.scenario.clutter = paths_from_json(*cl);
        }
        if (auto n = it->find("noise_snr_db"); n != it->end()) {
            c.scenario.noise_snr_db = snr_from_json(*n);
        }
        if (auto m = it->find("delay_mode"); m != it->end()) {
            c.scenario.delay_mode = parse_delay_mode(m->get<std::string>());
        }
    }
    if (auto it = j.find("channel"); it != j.end()) {
        c.channel = channel_from_json(*it);
    }
    c.validate();
    return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

json to_json(const channel::Channel& ch) {
    json paths = json::array();
    for (const auto& p : ch.paths) {
        paths.push_back({{"delay_s", p.delay_s}, {"gain", p.gain}});
    }
    return {{"paths", paths},
            {"noise_snr_db", ch.noise_snr_db ? json(*ch.noise_snr_db) : json(nullptr)},
            {"sample_rate", ch.sample_rate},
            {"delay_mode", ch.delay_mode == channel::DelayMode::Integer ? "integer" : "fractional"}};
}

json to_json(const ranging::RangeEstimate& r) {
    return {{"height_m", r.height_m},
            {"round_trip_path_m", r.round_trip_path_m},
            {"attempts", r.attempts_used},
            {"elapsed_s", r.elapsed_retry_s}};
}

json to_json(const geometry::ScaleResult& s) {
    return {{"image_physical_width_m", s.image_physical_width_m}, {"meters_per_pixel", s.meters_per_pixel}};
}

json to_json(const volumetry::VolumeReport& v) {
    return {{"top_area_m2", v.top_area_m2},
            {"top_width_m", v.top_width_m},
            {"side_scale_m_per_px", v.side_scale_m_per_px},
            {"volume_m3", v.volume_m3},
            {"rows", v.rows},
            {"base_width_px", v.base_width_px},
            {"calibration_mode", std::string(volumetry::to_string(v.calibration_mode))}};
}

} // namespace sonavol
