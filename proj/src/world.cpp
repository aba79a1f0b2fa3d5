#include "ilvs/world.hpp"

#include <cmath>
#include <numbers>

#include "ilvs/errors.hpp"

namespace ilvs {

namespace {

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

bool inside_image(const CameraIntrinsics& intr, const Eigen::Vector2d& px) {
  return px.x() >= 0.0 && px.x() <= intr.width && px.y() >= 0.0 && px.y() <= intr.height;
}

// Distance travelled by the belt after t seconds of the ramp-then-constant profile.
double belt_travel(const Scenario& s, double t) {
  if (s.belt_ramp_time <= 0.0) return s.belt_speed * t;
  if (t < s.belt_ramp_time) return 0.5 * s.belt_speed * t * t / s.belt_ramp_time;
  return 0.5 * s.belt_speed * s.belt_ramp_time + s.belt_speed * (t - s.belt_ramp_time);
}

double belt_speed_at(const Scenario& s, double t) {
  if (s.belt_ramp_time <= 0.0) return s.belt_speed;
  return s.belt_speed * std::min(t / s.belt_ramp_time, 1.0);
}

}  // namespace

void Scenario::validate() const {
  intrinsics.validate();
  if (!(marker_side > 0.0)) throw ConfigError("marker_side_m must be positive");
  if (!(belt_speed >= 0.0)) throw ConfigError("belt_speed_mps must be non-negative");
  if (!(belt_ramp_time >= 0.0)) throw ConfigError("belt_ramp_s must be non-negative");
  if (!(dt > 0.0)) throw ConfigError("dt_s must be positive");
  if (!(duration >= 0.0)) throw ConfigError("duration_s must be non-negative");
  if (!(desired_depth > 0.0)) throw ConfigError("desired_depth_m must be positive");
  if (!(pixel_noise_sigma >= 0.0)) throw ConfigError("pixel_noise_sigma must be non-negative");
  if (std::abs(belt_direction.norm() - 1.0) > 1e-9) {
    throw ConfigError("belt_dir must be a unit vector");
  }
}

std::size_t Scenario::num_steps() const {
  return static_cast<std::size_t>(std::llround(duration / dt));
}

Scenario default_scenario() {
  Scenario s;
  s.intrinsics = intrinsics_from_fov(1920.0, 1080.0, deg2rad(s.hfov_deg), deg2rad(s.vfov_deg));
  s.target_pose0 = Pose::identity();
  s.camera_pose0 = desired_camera_pose(s.target_pose0, s.desired_depth);
  return s;
}

Matrix3 goal_camera_rotation() { return Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal(); }

Pose desired_camera_pose(const Pose& target, double depth) {
  return compose(target, Pose{goal_camera_rotation(), Vector3(0.0, 0.0, depth)});
}

Observation observe(const Pose& camera, const Pose& target, const Scenario& scenario) {
  const Pose target_in_camera = compose(inverse(camera), target);
  const auto corners = marker_corners(scenario.marker_side);
  Observation obs;
  for (int i = 0; i < kNumCorners; ++i) {
    const Vector3 p = transform_point(target_in_camera, corners[i]);
    const Projection proj = project(scenario.intrinsics, p);
    obs.features.normalized.segment<2>(2 * i) = proj.normalized;
    obs.features.depth[i] = p.z();
    obs.pixels.segment<2>(2 * i) = proj.pixel;
    if (!inside_image(scenario.intrinsics, proj.pixel)) obs.out_of_view = true;
  }
  return obs;
}

Observation observe_noisy(const Pose& camera, const Pose& target, const Scenario& scenario,
                          std::mt19937_64& rng) {
  Observation obs = observe(camera, target, scenario);
  if (scenario.pixel_noise_sigma <= 0.0) return obs;
  std::normal_distribution<double> noise(0.0, scenario.pixel_noise_sigma);
  const auto& intr = scenario.intrinsics;
  obs.out_of_view = false;
  for (int i = 0; i < kNumCorners; ++i) {
    obs.pixels[2 * i] += noise(rng);
    obs.pixels[2 * i + 1] += noise(rng);
    obs.features.normalized[2 * i] = (obs.pixels[2 * i] - intr.cu) / intr.fx;
    obs.features.normalized[2 * i + 1] = (obs.pixels[2 * i + 1] - intr.cv) / intr.fy;
    if (!inside_image(intr, obs.pixels.segment<2>(2 * i))) obs.out_of_view = true;
  }
  return obs;
}

FeatureVector desired_features(const Scenario& scenario) {
  const Pose target = Pose::identity();
  return observe(desired_camera_pose(target, scenario.desired_depth), target, scenario).features;
}

TargetState step_target(const Scenario& scenario, double t) {
  if (t < 0.0) throw ConfigError("step_target: t must be non-negative");
  TargetState out;
  out.pose = scenario.target_pose0;
  out.pose.translation += belt_travel(scenario, t) * scenario.belt_direction;
  out.twist.linear = belt_speed_at(scenario, t) * scenario.belt_direction;
  return out;
}

WorldState initial_world(const Scenario& scenario) {
  WorldState w;
  w.camera = scenario.camera_pose0;
  return w;
}

TargetState target_at(const Scenario& scenario, const WorldState& state) {
  TargetState s = step_target(scenario, state.time);
  s.pose.translation += state.target_offset;
  return s;
}

WorldState displace_target(WorldState state, const Vector3& offset) {
  state.target_offset += offset;
  return state;
}

Twist target_twist_in_camera(const Pose& camera, const Twist& target_world) {
  const Matrix3 rt = camera.rotation.transpose();
  return {rt * target_world.linear, rt * target_world.angular};
}

}  // namespace ilvs
