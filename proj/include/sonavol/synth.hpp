#pragma once

#include "sonavol/mask.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace sonavol::synth {

enum class Shape { Cylinder, Cone, Hemisphere, EllipsoidCap };

std::string_view to_string(Shape shape) noexcept;
std::optional<Shape> parse_shape(std::string_view name);

/// A solid of revolution standing on the table, voxelised on a grid^3
/// lattice, with its exact top and side silhouettes.
struct SynthSolid {
    Shape shape = Shape::Cylinder;
    int grid = 0;
    double radius_px = 0.0;
    double height_px = 0.0;
    FoodMask top;
    FoodMask side;
    std::uint64_t voxel_count = 0;

    /// Brute-force volume for a lattice spacing of `meters_per_pixel`.
    double voxel_volume(double meters_per_pixel = 1.0) const;
    /// Closed-form volume of the continuous solid, in px^3 times scale^3.
    double analytic_volume(double meters_per_pixel = 1.0) const;
};

/// Rasterises `shape` by testing every cell centre of a grid^3 lattice. The
/// axis is centred in x/y and the base sits on z = 0 (the bottom row of the
/// side image). A hemisphere's height is its radius, so `height_px` is
/// ignored for it. Throws std::invalid_argument when grid < 64 or the solid
/// does not fit.
SynthSolid synth_solid(Shape shape, double radius_px, double height_px, int grid);

} // namespace sonavol::synth
