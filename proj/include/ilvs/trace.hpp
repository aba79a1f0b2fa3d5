#pragma once

#include <limits>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "ilvs/se3.hpp"
#include "ilvs/types.hpp"

namespace ilvs {

// One control step of an episode.
struct Sample {
  double t = 0.0;
  VisualError e = VisualError::Zero();
  Twist v;
  Vector3 camera_position = Vector3::Zero();
  Eigen::Quaterniond camera_orientation = Eigen::Quaterniond::Identity();
  Vector8 pixels = Vector8::Zero();
  // Compensation estimate used by the controller; NaN when there is none.
  Vector6 rho_hat = Vector6::Constant(std::numeric_limits<double>::quiet_NaN());
  // Camera position that would center the target at this instant.
  Vector3 goal_position = Vector3::Zero();
  // Ground-truth ∂e/∂t caused by the target motion.
  Vector8 feature_rate = Vector8::Zero();
  bool out_of_view = false;

  Pose camera_pose() const { return Pose::from_quaternion(camera_orientation, camera_position); }
};

// Fixed-step log of an episode. Demonstrations are traces produced by the
// oracle controller.
struct Trace {
  double dt = 0.0;
  std::vector<Sample> samples;
  bool aborted = false;
  std::string abort_reason;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};
using Demonstration = Trace;

// Throws FormatError unless timestamps increase with constant step dt.
void check_uniform_time(const Trace& trace, double rel_tol = 1e-9);

// CSV columns: t,e0..e7,vx,vy,vz,wx,wy,wz,u0,v0,...,u3,v3,px,py,pz,qw,qx,qy,qz
// followed by the extension columns r0..r5,gx,gy,gz,oov,f0..f7.
// Numbers are written with 17 significant digits so reading is lossless.
std::string trace_csv_header();
void write_trace_csv(const Trace& trace, const std::string& path);
// Accepts files carrying only the leading demonstration columns; missing
// extension columns keep their defaults.
Trace read_trace_csv(const std::string& path);

}  // namespace ilvs
