#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "ilvs/se3.hpp"
#include "ilvs/types.hpp"

namespace ilvs {

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cu = 0.0;
  double cv = 0.0;
  double width = 0.0;
  double height = 0.0;

  // Throws ConfigError unless fx, fy > 0 and the principal point is inside the image.
  void validate() const;
};

CameraIntrinsics intrinsics_from_fov(double width_px, double height_px, double hfov_rad,
                                     double vfov_rad);

// Four corners of a square marker of side `side` lying in the marker's z = 0
// plane, counter-clockwise from (−s/2, −s/2).
std::array<Vector3, kNumCorners> marker_corners(double side);

struct Projection {
  Eigen::Vector2d normalized;
  Eigen::Vector2d pixel;
};

// Pinhole projection of a camera-frame point. Throws BehindCameraError when Z ≤ 0.
Projection project(const CameraIntrinsics& intr, const Vector3& p_cam);

// Normalized coordinates (x₀,y₀,…,x₃,y₃) of the marker corners plus the
// depth of each corner in the camera frame.
struct FeatureVector {
  Vector8 normalized = Vector8::Zero();
  Eigen::Vector4d depth = Eigen::Vector4d::Zero();

  double x(int i) const { return normalized[2 * i]; }
  double y(int i) const { return normalized[2 * i + 1]; }
};

struct Observation {
  FeatureVector features;
  Vector8 pixels = Vector8::Zero();
  // Some corner falls outside [0,width]×[0,height]. Not an error by itself.
  bool out_of_view = false;
};

}  // namespace ilvs
