#include "sonavol/geometry.hpp"

#include <stdexcept>

namespace sonavol::geometry {

void CameraIntrinsics::validate() const {
    if (!(focal_length_m > 0.0) || !(sensor_width_m > 0.0) || image_width_px <= 0) {
        throw std::invalid_argument("camera intrinsics must be strictly positive");
    }
}

ScaleResult meters_per_pixel(double height_m, const CameraIntrinsics& intrinsics) {
    intrinsics.validate();
    if (!(height_m > 0.0)) {
        throw std::invalid_argument("camera height must be positive");
    }
    ScaleResult r;
    r.image_physical_width_m = intrinsics.sensor_width_m * height_m / intrinsics.focal_length_m;
    r.meters_per_pixel = r.image_physical_width_m / static_cast<double>(intrinsics.image_width_px);
    return r;
}

} // namespace sonavol::geometry
