#include "sonavol/volumetry.hpp"

#include <algorithm>
#include <stdexcept>

namespace sonavol::volumetry {

namespace {

struct RowExtent {
    int left = -1;
    int right = -1;
    bool any() const { return left >= 0; }
    int width() const { return any() ? right - left + 1 : 0; }
};

RowExtent row_extent(const FoodMask& mask, int y) {
    RowExtent e;
    for (int x = 0; x < mask.width(); ++x) {
        if (mask.at(x, y)) {
            if (e.left < 0) {
                e.left = x;
            }
            e.right = x;
        }
    }
    return e;
}

} // namespace

std::string_view to_string(CalibrationMode mode) noexcept {
    return mode == CalibrationMode::ExplicitSideScale ? "explicit-side-scale" : "width-matching";
}

TopMeasurement top_area(const FoodMask& top, const geometry::ScaleResult& scale) {
    if (top.view() != View::Top) {
        throw std::invalid_argument("top_area needs a top-view mask");
    }
    if (!(scale.meters_per_pixel > 0.0)) {
        throw std::invalid_argument("top_area: scale must be positive");
    }
    TopMeasurement m;
    m.pixel_count = top.count();
    if (m.pixel_count == 0) {
        throw std::invalid_argument("top mask contains no food");
    }
    for (int y = 0; y < top.height(); ++y) {
        m.width_px = std::max(m.width_px, row_extent(top, y).width());
    }
    const double s = scale.meters_per_pixel;
    m.area_m2 = static_cast<double>(m.pixel_count) * s * s;
    m.width_m = static_cast<double>(m.width_px) * s;
    return m;
}

WidthProfile side_profile(const FoodMask& side) {
    if (side.view() != View::Side) {
        throw std::invalid_argument("side_profile needs a side-view mask");
    }
    std::vector<int> top_down(static_cast<std::size_t>(side.height()));
    int first = -1, last = -1;
    for (int y = 0; y < side.height(); ++y) {
        top_down[static_cast<std::size_t>(y)] = row_extent(side, y).width();
        if (top_down[static_cast<std::size_t>(y)] > 0) {
            if (first < 0) {
                first = y;
            }
            last = y;
        }
    }
    if (first < 0) {
        throw std::invalid_argument("side mask contains no food");
    }
    WidthProfile p;
    for (int y = last; y >= first; --y) {
        p.widths.push_back(top_down[static_cast<std::size_t>(y)]);
    }
    p.base_width = *std::max_element(p.widths.begin(), p.widths.end());
    return p;
}

VolumeReport estimate_volume(double top_area_m2, double top_width_m, const WidthProfile& profile,
                             std::optional<double> side_scale) {
    if (!(top_width_m > 0.0)) {
        throw std::invalid_argument("estimate_volume: top width must be positive");
    }
    if (!(top_area_m2 > 0.0)) {
        throw std::invalid_argument("estimate_volume: top area must be positive");
    }
    if (profile.widths.empty()) {
        throw std::invalid_argument("estimate_volume: empty width profile");
    }
    if (profile.base_width <= 0) {
        throw std::invalid_argument("estimate_volume: zero base width");
    }
    if (side_scale && !(*side_scale > 0.0)) {
        throw std::invalid_argument("estimate_volume: side scale must be positive");
    }

    VolumeReport r;
    r.top_area_m2 = top_area_m2;
    r.top_width_m = top_width_m;
    r.rows = profile.rows();
    r.base_width_px = profile.base_width;
    r.calibration_mode = side_scale ? CalibrationMode::ExplicitSideScale : CalibrationMode::WidthMatching;
    r.side_scale_m_per_px = side_scale ? *side_scale : top_width_m / static_cast<double>(profile.base_width);

    const double dz = r.side_scale_m_per_px;
    double sum = 0.0;
    for (int w : profile.widths) {
        if (w < 0) {
            throw std::invalid_argument("estimate_volume: negative row width");
        }
        const double ratio = static_cast<double>(w) * dz / top_width_m;
        sum += top_area_m2 * ratio * ratio;
    }
    r.volume_m3 = dz * sum;
    return r;
}

IouBreakdown iou(const FoodMask& pred, const FoodMask& truth) {
    if (pred.width() != truth.width() || pred.height() != truth.height()) {
        throw std::invalid_argument("iou: mask dimensions differ");
    }
    std::size_t food_inter = 0, food_union = 0, bg_inter = 0, bg_union = 0;
    const auto a = pred.bits();
    const auto b = truth.bits();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool p = a[i] != 0;
        const bool t = b[i] != 0;
        food_inter += (p && t) ? 1 : 0;
        food_union += (p || t) ? 1 : 0;
        bg_inter += (!p && !t) ? 1 : 0;
        bg_union += (!p || !t) ? 1 : 0;
    }
    auto ratio = [](std::size_t inter, std::size_t uni) {
        return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
    };
    IouBreakdown r;
    r.food = ratio(food_inter, food_union);
    r.background = ratio(bg_inter, bg_union);
    r.mean = 0.5 * (r.food + r.background);
    return r;
}

} // namespace sonavol::volumetry
