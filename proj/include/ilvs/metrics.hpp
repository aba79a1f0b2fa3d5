#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ilvs/camera.hpp"
#include "ilvs/trace.hpp"

namespace ilvs {

// Mean over the four corners of the Euclidean pixel distance to the desired corner.
double pixel_error(const VisualError& e, const CameraIntrinsics& intr);
std::vector<double> pixel_errors(const Trace& trace, const CameraIntrinsics& intr);
// Distance (m) between the camera and the goal camera position.
std::vector<double> position_errors(const Trace& trace);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};
// Population standard deviation.
MeanStd mean_std(const std::vector<double>& values);

struct ReplayRmse {
  std::vector<double> feature_px;     // one per pixel coordinate (8)
  std::vector<double> position_mm;    // x, y, z
  std::vector<double> velocity_mmps;  // linear vx, vy, vz
  MeanStd features;
  MeanStd position;
  MeanStd velocity;
  std::size_t samples = 0;
};

// Per-coordinate RMSE over the common prefix of the two traces. Throws
// ConfigError when their steps differ.
ReplayRmse rmse_vs_demo(const Trace& trace, const Demonstration& demo);

struct TrackingPhase {
  bool entered = false;
  double entry_time = 0.0;
  std::size_t samples = 0;
  MeanStd pixel;        // px
  MeanStd position_mm;  // mm
};

// Statistics over the samples from the first crossing below `threshold_px` onwards.
TrackingPhase tracking_phase_metrics(const Trace& trace, const CameraIntrinsics& intr,
                                     double threshold_px = 5.0);

// Mean pixel error over the trailing `fraction` of the trace.
double steady_state_error(const Trace& trace, const CameraIntrinsics& intr, double fraction = 0.3);

struct Metrics {
  std::optional<ReplayRmse> replay;
  TrackingPhase tracking;
  std::optional<double> convergence_time_to_threshold;
  double threshold_px = 5.0;
  double steady_state_window_err = 0.0;
  double final_pixel_error = 0.0;
  std::size_t samples = 0;
};

Metrics compute_metrics(const Trace& trace, const CameraIntrinsics& intr, double threshold_px = 5.0,
                        const Demonstration* demo = nullptr);

// JSON text; an empty trace yields "{}".
std::string metrics_json(const Metrics& m);

}  // namespace ilvs
