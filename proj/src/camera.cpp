#include "ilvs/camera.hpp"

#include <cmath>
#include <numbers>

#include "ilvs/errors.hpp"

namespace ilvs {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0 && fy > 0.0)) throw ConfigError("focal lengths must be positive");
  if (!(cu > 0.0 && cu < width && cv > 0.0 && cv < height)) {
    throw ConfigError("principal point must lie inside the image");
  }
}

CameraIntrinsics intrinsics_from_fov(double width_px, double height_px, double hfov_rad,
                                     double vfov_rad) {
  constexpr double pi = std::numbers::pi;
  if (!(hfov_rad > 0.0 && hfov_rad < pi && vfov_rad > 0.0 && vfov_rad < pi)) {
    throw ConfigError("field of view must lie in (0, pi)");
  }
  if (!(width_px > 0.0 && height_px > 0.0)) throw ConfigError("resolution must be positive");
  CameraIntrinsics intr;
  intr.width = width_px;
  intr.height = height_px;
  intr.fx = (width_px / 2.0) / std::tan(hfov_rad / 2.0);
  intr.fy = (height_px / 2.0) / std::tan(vfov_rad / 2.0);
  intr.cu = width_px / 2.0;
  intr.cv = height_px / 2.0;
  return intr;
}

std::array<Vector3, kNumCorners> marker_corners(double side) {
  if (!(side > 0.0)) throw ConfigError("marker side must be positive");
  const double h = side / 2.0;
  return {Vector3(-h, -h, 0.0), Vector3(h, -h, 0.0), Vector3(h, h, 0.0), Vector3(-h, h, 0.0)};
}

Projection project(const CameraIntrinsics& intr, const Vector3& p_cam) {
  if (!(p_cam.z() > 0.0)) throw BehindCameraError("point at or behind the camera plane");
  Projection out;
  out.normalized = {p_cam.x() / p_cam.z(), p_cam.y() / p_cam.z()};
  out.pixel = {intr.cu + intr.fx * out.normalized.x(), intr.cv + intr.fy * out.normalized.y()};
  return out;
}

}  // namespace ilvs
