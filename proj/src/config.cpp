#include "ilvs/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include "ilvs/errors.hpp"
#include "ilvs/svg.hpp"

namespace ilvs {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Vector3 vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(std::string(what) + " must be a 3-vector");
  Vector3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw ConfigError(std::string(what) + " must be numeric");
    v[i] = j[i].get<double>();
  }
  return v;
}

json read_json(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
}

double number(const json& j, const char* key) {
  if (!j.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return j.get<double>();
}

}  // namespace

json pose_to_json(const Pose& p) {
  const auto q = p.quaternion();
  return {{"position", {p.translation.x(), p.translation.y(), p.translation.z()}},
          {"quaternion", {q.w(), q.x(), q.y(), q.z()}}};
}

Pose pose_from_json(const json& j) {
  if (!j.is_object() || !j.contains("position") || !j.contains("quaternion")) {
    throw ConfigError("pose must have 'position' and 'quaternion'");
  }
  const auto& q = j["quaternion"];
  if (!q.is_array() || q.size() != 4) throw ConfigError("quaternion must be [w, x, y, z]");
  const Eigen::Quaterniond quat(number(q[0], "quaternion"), number(q[1], "quaternion"),
                                number(q[2], "quaternion"), number(q[3], "quaternion"));
  return Pose::from_quaternion(quat, vec3(j["position"], "position"));
}

json scenario_to_json(const Scenario& s) {
  return {{"width_px", s.intrinsics.width},
          {"height_px", s.intrinsics.height},
          {"hfov_deg", s.hfov_deg},
          {"vfov_deg", s.vfov_deg},
          {"marker_side_m", s.marker_side},
          {"belt_speed_mps", s.belt_speed},
          {"belt_ramp_s", s.belt_ramp_time},
          {"belt_dir", {s.belt_direction.x(), s.belt_direction.y(), s.belt_direction.z()}},
          {"target_pose0", pose_to_json(s.target_pose0)},
          {"camera_pose0", pose_to_json(s.camera_pose0)},
          {"desired_depth_m", s.desired_depth},
          {"dt_s", s.dt},
          {"duration_s", s.duration},
          {"pixel_noise_sigma", s.pixel_noise_sigma},
          {"seed", s.seed}};
}

Scenario scenario_from_json(const json& j) {
  static const std::set<std::string> known = {
      "width_px",      "height_px",      "hfov_deg",    "vfov_deg",     "marker_side_m",
      "belt_speed_mps", "belt_ramp_s",   "belt_dir",    "target_pose0", "camera_pose0",
      "desired_depth_m", "dt_s",         "duration_s",  "pixel_noise_sigma", "seed"};
  if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown scenario key '" + key + "'");
  }
  Scenario s = default_scenario();
  double width = s.intrinsics.width, height = s.intrinsics.height;
  if (j.contains("width_px")) width = number(j["width_px"], "width_px");
  if (j.contains("height_px")) height = number(j["height_px"], "height_px");
  if (j.contains("hfov_deg")) s.hfov_deg = number(j["hfov_deg"], "hfov_deg");
  if (j.contains("vfov_deg")) s.vfov_deg = number(j["vfov_deg"], "vfov_deg");
  s.intrinsics = intrinsics_from_fov(width, height, s.hfov_deg * kDeg, s.vfov_deg * kDeg);
  if (j.contains("marker_side_m")) s.marker_side = number(j["marker_side_m"], "marker_side_m");
  if (j.contains("belt_speed_mps")) s.belt_speed = number(j["belt_speed_mps"], "belt_speed_mps");
  if (j.contains("belt_ramp_s")) s.belt_ramp_time = number(j["belt_ramp_s"], "belt_ramp_s");
  if (j.contains("belt_dir")) {
    const Vector3 d = vec3(j["belt_dir"], "belt_dir");
    if (!(d.norm() > 0.0)) throw ConfigError("belt_dir must be non-zero");
    s.belt_direction = d.normalized();
  }
  if (j.contains("desired_depth_m")) s.desired_depth = number(j["desired_depth_m"], "desired_depth_m");
  if (j.contains("target_pose0")) s.target_pose0 = pose_from_json(j["target_pose0"]);
  s.camera_pose0 = j.contains("camera_pose0") ? pose_from_json(j["camera_pose0"])
                                              : desired_camera_pose(s.target_pose0, s.desired_depth);
  if (j.contains("dt_s")) s.dt = number(j["dt_s"], "dt_s");
  if (j.contains("duration_s")) s.duration = number(j["duration_s"], "duration_s");
  if (j.contains("pixel_noise_sigma")) s.pixel_noise_sigma = number(j["pixel_noise_sigma"], "pixel_noise_sigma");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
      throw ConfigError("'seed' must be an integer");
    }
    s.seed = j["seed"].get<std::uint64_t>();
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) { return scenario_from_json(read_json(path)); }

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write scenario file " + path);
  f << scenario_to_json(s).dump(2) << '\n';
}

std::vector<Pose> load_poses(const std::string& path) {
  const json j = read_json(path);
  if (!j.is_array() || j.empty()) throw ConfigError("poses file must be a non-empty JSON array");
  std::vector<Pose> poses;
  for (const auto& p : j) poses.push_back(pose_from_json(p));
  return poses;
}

std::string scenario_hash(const Scenario& s) {
  const std::string text = scenario_to_json(s).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<InitialCondition> unseen_initial_conditions(const Scenario& scenario) {
  const Pose goal = desired_camera_pose(scenario.target_pose0, scenario.desired_depth);
  const Matrix3 tilt = rot_z(8.0 * kDeg) * rot_x(4.0 * kDeg) * rot_y(-4.0 * kDeg);
  return {
      {"near", {goal.rotation, goal.translation + Vector3(-0.04, -0.01, 0.03)}},
      {"far", {goal.rotation, goal.translation + Vector3(-0.08, 0.04, 0.10)}},
      {"far_rotated", {goal.rotation * tilt, goal.translation + Vector3(-0.07, 0.03, 0.10)}},
  };
}

void emit_outputs(const Trace& trace, const Metrics& metrics, const Scenario& scenario,
                  const std::string& outdir, const OutputOptions& options) {
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + outdir + ": " + ec.message());
  write_trace_csv(trace, (fs::path(outdir) / "trace.csv").string());
  auto write_text = [&](const std::string& name, const std::string& text) {
    const fs::path p = fs::path(outdir) / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << text;
    if (!f) throw std::runtime_error("failed writing " + p.string());
  };
  write_text("metrics.json", metrics_json(metrics));
  if (options.svg) {
    const Pose target = Pose::identity();
    const Vector8 desired_px =
        observe(desired_camera_pose(target, scenario.desired_depth), target, scenario).pixels;
    write_text("image_plane.svg",
               image_plane_svg(trace, scenario.intrinsics, desired_px, options.references));
    write_text("error.svg", error_vs_time_svg(trace, scenario.intrinsics));
  }
}

}  // namespace ilvs
