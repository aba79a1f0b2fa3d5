#pragma once

#include <cstdint>
#include <random>

#include "ilvs/camera.hpp"
#include "ilvs/se3.hpp"

namespace ilvs {

// Everything that defines one simulated setup: camera, marker, belt, start poses.
struct Scenario {
  CameraIntrinsics intrinsics;
  double hfov_deg = 69.0;
  double vfov_deg = 42.0;
  double marker_side = 0.04;
  double belt_speed = 0.1;
  double belt_ramp_time = 0.5;
  Vector3 belt_direction = Vector3::UnitX();
  Pose target_pose0;
  Pose camera_pose0;
  double desired_depth = 0.09116;
  double dt = 0.01;
  double duration = 10.0;
  double pixel_noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t num_steps() const;
};

// 1920×1080, 69°×42°, belt ramping to 0.1 m/s, camera starting at the goal pose.
Scenario default_scenario();

// Camera orientation at the goal: optical axis along −z of the marker,
// image x along marker x.
Matrix3 goal_camera_rotation();

// Camera pose centered over the marker, fronto-parallel, at `depth`.
Pose desired_camera_pose(const Pose& target, double depth);

Observation observe(const Pose& camera, const Pose& target, const Scenario& scenario);
// Same as observe, with zero-mean Gaussian pixel noise of the scenario's sigma.
Observation observe_noisy(const Pose& camera, const Pose& target, const Scenario& scenario,
                          std::mt19937_64& rng);

FeatureVector desired_features(const Scenario& scenario);

struct TargetState {
  Pose pose;
  Twist twist;  // world frame
};

// Belt position/velocity at time t, with no perturbations applied.
TargetState step_target(const Scenario& scenario, double t);

// Simulated world inside one episode. Owns the camera pose and any sudden
// displacements applied to the target.
struct WorldState {
  double time = 0.0;
  Pose camera;
  Vector3 target_offset = Vector3::Zero();
};

WorldState initial_world(const Scenario& scenario);
TargetState target_at(const Scenario& scenario, const WorldState& state);
WorldState displace_target(WorldState state, const Vector3& offset);

// Target twist re-expressed in the camera frame.
Twist target_twist_in_camera(const Pose& camera, const Twist& target_world);

}  // namespace ilvs
