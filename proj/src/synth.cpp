#include "sonavol/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sonavol::synth {

namespace {

// Radius of the horizontal cross-section at height z, or -1 above the solid.
double section_radius(Shape shape, double radius, double height, double z) {
    if (z < 0.0 || z >= height) {
        return -1.0;
    }
    switch (shape) {
    case Shape::Cylinder: return radius;
    case Shape::Cone: return radius * (1.0 - z / height);
    case Shape::Hemisphere:
    case Shape::EllipsoidCap: {
        const double u = z / height;
        return radius * std::sqrt(1.0 - u * u);
    }
    }
    return -1.0;
}

} // namespace

std::string_view to_string(Shape shape) noexcept {
    switch (shape) {
    case Shape::Cylinder: return "cylinder";
    case Shape::Cone: return "cone";
    case Shape::Hemisphere: return "hemisphere";
    case Shape::EllipsoidCap: return "ellipsoid-cap";
    }
    return "unknown";
}

std::optional<Shape> parse_shape(std::string_view name) {
    for (Shape s : {Shape::Cylinder, Shape::Cone, Shape::Hemisphere, Shape::EllipsoidCap}) {
        if (name == to_string(s)) {
            return s;
        }
    }
    return std::nullopt;
}

double SynthSolid::voxel_volume(double meters_per_pixel) const {
    return static_cast<double>(voxel_count) * meters_per_pixel * meters_per_pixel * meters_per_pixel;
}

double SynthSolid::analytic_volume(double meters_per_pixel) const {
    const double r2h = radius_px * radius_px * height_px;
    double v = 0.0;
    switch (shape) {
    case Shape::Cylinder: v = std::numbers::pi * r2h; break;
    case Shape::Cone: v = std::numbers::pi * r2h / 3.0; break;
    case Shape::Hemisphere:
    case Shape::EllipsoidCap: v = 2.0 * std::numbers::pi * r2h / 3.0; break;
    }
    return v * meters_per_pixel * meters_per_pixel * meters_per_pixel;
}

SynthSolid synth_solid(Shape shape, double radius_px, double height_px, int grid) {
    if (grid < 64) {
        throw std::invalid_argument("synth_solid: grid must be at least 64");
    }
    if (shape == Shape::Hemisphere) {
        height_px = radius_px;
    }
    if (!(radius_px >= 1.0) || !(height_px >= 1.0)) {
        throw std::invalid_argument("synth_solid: radius and height must be at least one pixel");
    }
    if (2.0 * radius_px > grid || height_px > grid) {
        throw std::invalid_argument("synth_solid: solid does not fit in the grid");
    }

    SynthSolid s;
    s.shape = shape;
    s.grid = grid;
    s.radius_px = radius_px;
    s.height_px = height_px;
    s.top = FoodMask(grid, grid, View::Top);
    s.side = FoodMask(grid, grid, View::Side);

    const double centre = 0.5 * grid;
    for (int k = 0; k < grid; ++k) {
        const double r = section_radius(shape, radius_px, height_px, k + 0.5);
        const double r2 = r * r;
        const int side_row = grid - 1 - k;
        for (int y = 0; y < grid; ++y) {
            const double dy = y + 0.5 - centre;
            for (int x = 0; x < grid; ++x) {
                const double dx = x + 0.5 - centre;
                if (r >= 0.0 && dx * dx + dy * dy <= r2) {
                    ++s.voxel_count;
                    s.top.set(x, y);
                    s.side.set(x, side_row);
                }
            }
        }
    }
    return s;
}

} // namespace sonavol::synth
