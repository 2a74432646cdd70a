#pragma once

#include "sonavol/geometry.hpp"
#include "sonavol/mask.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace sonavol::volumetry {

struct TopMeasurement {
    double area_m2 = 0.0;  // food pixel count times scale^2
    double width_m = 0.0;  // widest row extent times scale
    std::size_t pixel_count = 0;
    int width_px = 0;
};

/// Per-row food widths of a side view, bottom row first. Rows inside the
/// food's vertical span with no food pixels have width 0.
struct WidthProfile {
    std::vector<int> widths;
    int base_width = 0; // max of widths

    int rows() const noexcept { return static_cast<int>(widths.size()); }
};

enum class CalibrationMode {
    ExplicitSideScale, // side rows measured with their own meters-per-pixel
    WidthMatching,     // widest side row is matched to the top-view food width
};

std::string_view to_string(CalibrationMode mode) noexcept;

struct VolumeReport {
    double top_area_m2 = 0.0;
    double top_width_m = 0.0;
    double side_scale_m_per_px = 0.0; // slab thickness per side row
    double volume_m3 = 0.0;
    int rows = 0;
    int base_width_px = 0;
    CalibrationMode calibration_mode = CalibrationMode::WidthMatching;
};

/// Throws std::invalid_argument for a side-view mask or an empty mask.
TopMeasurement top_area(const FoodMask& top, const geometry::ScaleResult& scale);

/// Throws std::invalid_argument for a top-view mask or an empty mask.
WidthProfile side_profile(const FoodMask& side);

/// Stacks one slab per side row, each a copy of the top silhouette scaled by
/// the ratio of the row's physical width to the top-view width:
///   V = dz * sum_i S * (w_i * dz_w / w_f)^2
/// With `side_scale`, dz = dz_w = side_scale. Without it, dz = dz_w =
/// top_width / base_width so the widest row matches the top view.
VolumeReport estimate_volume(double top_area_m2, double top_width_m, const WidthProfile& profile,
                             std::optional<double> side_scale = std::nullopt);

struct IouBreakdown {
    double food = 0.0;
    double background = 0.0;
    double mean = 0.0;
};

/// Per-class IoU for {food, background} and their mean. A class absent
/// from both masks scores 1. Throws std::invalid_argument on size mismatch.
IouBreakdown iou(const FoodMask& pred, const FoodMask& truth);

inline double miou(const FoodMask& pred, const FoodMask& truth) { return iou(pred, truth).mean; }

} // namespace sonavol::volumetry
