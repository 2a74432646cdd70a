#pragma once

namespace sonavol::geometry {

/// Pinhole camera parameters. The defaults are placeholders for a typical
/// phone main camera; supply per-device values through the config file.
struct CameraIntrinsics {
    double focal_length_m = 4.15e-3;
    double sensor_width_m = 4.8e-3;
    int image_width_px = 3264;

    void validate() const;
};

struct ScaleResult {
    double image_physical_width_m = 0.0; // footprint of the full image width on the surface
    double meters_per_pixel = 0.0;
};

/// Footprint M = sensor_width * height / focal_length, divided evenly over
/// the image columns. Lens distortion is ignored.
ScaleResult meters_per_pixel(double height_m, const CameraIntrinsics& intrinsics);

} // namespace sonavol::geometry
