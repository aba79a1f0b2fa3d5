#pragma once

#include <string>
#include <vector>

#include "ilvs/camera.hpp"
#include "ilvs/trace.hpp"

namespace ilvs {

// Feature trajectories in the image plane: one polyline per corner, a circle
// at each start and a cross at each desired corner. Reference traces (e.g.
// demonstrations) are drawn dotted underneath.
std::string image_plane_svg(const Trace& trace, const CameraIntrinsics& intr,
                            const Vector8& desired_pixels,
                            const std::vector<const Trace*>& references = {});

// Per-corner pixel error over time plus the corner average.
std::string error_vs_time_svg(const Trace& trace, const CameraIntrinsics& intr);

}  // namespace ilvs
