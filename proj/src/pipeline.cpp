#include "sonavol/pipeline.hpp"

#include "sonavol/error.hpp"

#include <exception>
#include <string>
#include <utility>

namespace sonavol {

namespace {

template <typename F>
auto run_stage(const char* stage, F&& body) -> decltype(body()) {
    try {
        return std::forward<F>(body)();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

} // namespace

PipelineReport run_pipeline(const PipelineConfig& config, const EchoTrace& recorded,
                            std::span<const double> reference, const FoodMask& top,
                            const std::optional<FoodMask>& side) {
    run_stage("config", [&] { config.validate(); });

    PipelineReport report;
    report.container = config.container;

    report.range = run_stage("ranging", [&] { return ranging::range_recording(recorded, reference, config.ranging); });

    report.scale = run_stage("geometry", [&] { return geometry::meters_per_pixel(report.range.height_m, config.camera); });

    run_stage("volumetry", [&] {
        if (!side) {
            throw std::invalid_argument("side-view mask is missing");
        }
        FoodMask top_view = top;
        top_view.set_view(View::Top);
        FoodMask side_view = *side;
        side_view.set_view(View::Side);
        report.top = volumetry::top_area(top_view, report.scale);
        report.profile = volumetry::side_profile(side_view);
        report.volume = volumetry::estimate_volume(report.top.area_m2, report.top.width_m, report.profile,
                                                   config.side_scale);
    });
    return report;
}

nlohmann::json to_json(const PipelineReport& r) {
    nlohmann::json j;
    j["schema_version"] = kReportSchemaVersion;
    j["container"] = std::string(to_string(r.container));
    j["ranging"] = to_json(r.range);
    j["scale"] = to_json(r.scale);
    j["top"] = {{"area_m2", r.top.area_m2},
                {"width_m", r.top.width_m},
                {"pixel_count", r.top.pixel_count},
                {"width_px", r.top.width_px}};
    j["side_profile"] = {{"rows", r.profile.rows()}, {"base_width_px", r.profile.base_width}};
    j["volume"] = to_json(r.volume);
    return j;
}

} // namespace sonavol
