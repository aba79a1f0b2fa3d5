#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ilvs/episode.hpp"
#include "ilvs/metrics.hpp"
#include "ilvs/world.hpp"

namespace ilvs {

// {"position": [x, y, z], "quaternion": [w, x, y, z]}; the quaternion is
// normalized on load.
nlohmann::json pose_to_json(const Pose& p);
Pose pose_from_json(const nlohmann::json& j);

nlohmann::json scenario_to_json(const Scenario& s);
// Unknown keys are rejected; missing keys take the defaults.
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

std::vector<Pose> load_poses(const std::string& path);

// FNV-1a of the canonical scenario JSON, as 16 hex digits.
std::string scenario_hash(const Scenario& s);

// Named starting poses for the unseen-initial-condition experiments.
struct InitialCondition {
  std::string name;
  Pose pose;
};
std::vector<InitialCondition> unseen_initial_conditions(const Scenario& scenario);

struct OutputOptions {
  bool svg = true;
  std::vector<const Trace*> references;
};

// Writes trace.csv, metrics.json and optional image_plane.svg / error.svg into `outdir`.
void emit_outputs(const Trace& trace, const Metrics& metrics, const Scenario& scenario,
                  const std::string& outdir, const OutputOptions& options = {});

}  // namespace ilvs
