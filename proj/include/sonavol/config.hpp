#pragma once

#include "sonavol/channel_sim.hpp"
#include "sonavol/geometry.hpp"
#include "sonavol/ranging.hpp"
#include "sonavol/ranging_config.hpp"
#include "sonavol/volumetry.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string_view>

namespace sonavol {

enum class ContainerClass { Plate, Bowl };

std::string_view to_string(ContainerClass c) noexcept;

/// Everything the pipeline needs besides the sensor files. Every section of
/// the JSON file is optional; missing keys keep their defaults.
struct PipelineConfig {
    geometry::CameraIntrinsics camera;
    RangingConfig ranging;
    int mls_order = 10;
    double mls_rate = 48000.0;
    ContainerClass container = ContainerClass::Plate;
    std::optional<double> side_scale; // set => explicit-side-scale calibration
    channel::ScenarioOptions scenario;
    std::optional<channel::Channel> channel;

    void validate() const;
};

PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);

channel::Channel channel_from_json(const nlohmann::json& j);
nlohmann::json to_json(const channel::Channel& ch);
nlohmann::json to_json(const ranging::RangeEstimate& r);
nlohmann::json to_json(const geometry::ScaleResult& s);
nlohmann::json to_json(const volumetry::VolumeReport& v);

} // namespace sonavol
