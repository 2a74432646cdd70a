#pragma once

#include "sonavol/config.hpp"
#include "sonavol/mask.hpp"
#include "sonavol/trace.hpp"

#include <optional>
#include <span>

namespace sonavol {

inline constexpr int kReportSchemaVersion = 1;

struct PipelineReport {
    ranging::RangeEstimate range;
    geometry::ScaleResult scale;
    volumetry::TopMeasurement top;
    volumetry::WidthProfile profile;
    volumetry::VolumeReport volume;
    ContainerClass container = ContainerClass::Plate;
};

/// ranging -> geometry -> volumetry. A recording longer than two retry
/// intervals is treated as repeated probes, one per interval. Any failure is
/// rethrown as StageError naming the stage ("config", "ranging", "geometry"
/// or "volumetry"); later stages do not run.
PipelineReport run_pipeline(const PipelineConfig& config, const EchoTrace& recorded,
                            std::span<const double> reference, const FoodMask& top,
                            const std::optional<FoodMask>& side);

nlohmann::json to_json(const PipelineReport& report);

} // namespace sonavol
