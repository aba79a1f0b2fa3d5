#include "ilvs/demo.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "ilvs/config.hpp"
#include "ilvs/episode.hpp"
#include "ilvs/errors.hpp"

namespace ilvs {

namespace fs = std::filesystem;

SampleMatrix TrainingSet::joint() const {
  SampleMatrix j(inputs.rows() + outputs.rows(), inputs.cols());
  j << inputs, outputs;
  return j;
}

Twist oracle_controller(const WorldState& state, const Scenario& scenario, ControlGain gain,
                        const PseudoInverse& lp) {
  const TargetState target = target_at(scenario, state);
  const Observation obs = observe(state.camera, target.pose, scenario);
  const VisualError e = visual_error(obs.features, desired_features(scenario));
  const Vector8 rate =
      target_feature_rate(obs.features, target_twist_in_camera(state.camera, target.twist));
  return tracking_control(e, gain, lp, rate);
}

std::vector<Pose> default_demo_poses(const Scenario& scenario) {
  const Pose goal = desired_camera_pose(scenario.target_pose0, scenario.desired_depth);
  const std::vector<Vector3> offsets = {
      {-0.05, -0.02, 0.04},
      {0.04, -0.025, 0.05},
      {0.0, 0.025, 0.06},
  };
  std::vector<Pose> poses;
  for (const auto& o : offsets) poses.push_back({goal.rotation, goal.translation + o});
  return poses;
}

Demonstration record_demonstration(const Scenario& scenario, ControlGain gain,
                                   const PseudoInverse& lp, double duration, double dt) {
  RunConfig cfg;
  cfg.scenario = scenario;
  cfg.scenario.duration = duration;
  cfg.scenario.dt = dt;
  cfg.controller = ControllerKind::oracle;
  cfg.lambda = gain.value();
  cfg.strict_fov = true;
  cfg.seed = scenario.seed;
  Episode ep(cfg);
  if ((ep.lhat_pinv() - lp).cwiseAbs().maxCoeff() > 0.0) {
    throw ConfigError("record_demonstration: L̂⁺ does not match the scenario's goal configuration");
  }
  ep.run();
  Demonstration demo = ep.take_trace();
  if (demo.aborted) throw SimulationAbort("demonstration aborted: " + demo.abort_reason);
  return demo;
}

DemoSuite collect_suite(const Scenario& scenario, const std::vector<Pose>& initial_poses,
                        ControlGain gain, const PseudoInverse& lp) {
  if (initial_poses.empty()) throw ConfigError("collect_suite: need at least one initial pose");
  DemoSuite suite;
  suite.scenario = scenario;
  suite.lambda = gain.value();
  suite.lhat_pinv = lp;
  suite.initial_poses = initial_poses;
  for (std::size_t i = 0; i < initial_poses.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (initial_poses[i].translation == initial_poses[j].translation &&
          initial_poses[i].rotation == initial_poses[j].rotation) {
        std::clog << "warning: demonstration " << i << " duplicates the start pose of " << j
                  << '\n';
      }
    }
    Scenario sc = scenario;
    sc.camera_pose0 = initial_poses[i];
    suite.demos.push_back(record_demonstration(sc, gain, lp, sc.duration, sc.dt));
  }
  return suite;
}

TrainingSet build_training_set(const std::vector<Demonstration>& demos, double lambda,
                               const PseudoInverse& lp) {
  Eigen::Index total = 0;
  for (const auto& d : demos) total += static_cast<Eigen::Index>(d.samples.size());
  TrainingSet set;
  set.inputs.resize(6, total);
  set.outputs.resize(6, total);
  set.provenance.reserve(static_cast<std::size_t>(total));
  Eigen::Index col = 0;
  for (std::size_t d = 0; d < demos.size(); ++d) {
    const auto& samples = demos[d].samples;
    for (std::size_t n = 0; n < samples.size(); ++n) {
      const Vector6 eps = lp * samples[n].e;
      set.inputs.col(col) = eps;
      set.outputs.col(col) = samples[n].v.vector() + lambda * eps;
      set.provenance.emplace_back(static_cast<int>(d), static_cast<int>(n));
      ++col;
    }
  }
  return set;
}

TrainingSet build_training_set(const DemoSuite& suite) {
  return build_training_set(suite.demos, suite.lambda, suite.lhat_pinv);
}

void save_suite(const DemoSuite& suite, const std::string& dir) {
  fs::create_directories(dir);
  nlohmann::json manifest;
  manifest["demos"] = nlohmann::json::array();
  for (std::size_t i = 0; i < suite.demos.size(); ++i) {
    const std::string name = "demo_" + std::to_string(i) + ".csv";
    write_trace_csv(suite.demos[i], (fs::path(dir) / name).string());
    manifest["demos"].push_back(name);
  }
  manifest["lambda"] = suite.lambda;
  nlohmann::json lp = nlohmann::json::array();
  for (int r = 0; r < 6; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < 8; ++c) row.push_back(suite.lhat_pinv(r, c));
    lp.push_back(row);
  }
  manifest["lhat_pinv"] = lp;
  manifest["scenario_hash"] = scenario_hash(suite.scenario);
  manifest["scenario"] = scenario_to_json(suite.scenario);
  manifest["initial_poses"] = nlohmann::json::array();
  for (const auto& p : suite.initial_poses) manifest["initial_poses"].push_back(pose_to_json(p));

  std::ofstream f(fs::path(dir) / "manifest.json", std::ios::binary);
  if (!f) throw std::runtime_error("cannot write suite manifest in " + dir);
  f << manifest.dump(2) << '\n';
}

DemoSuite load_suite(const std::string& dir) {
  const fs::path mpath = fs::path(dir) / "manifest.json";
  std::ifstream f(mpath, std::ios::binary);
  if (!f) throw FormatError("missing suite manifest: " + mpath.string());
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed suite manifest: " + std::string(e.what()));
  }
  DemoSuite suite;
  try {
    suite.lambda = m.at("lambda").get<double>();
    const auto& lp = m.at("lhat_pinv");
    if (lp.size() != 6) throw FormatError("suite manifest: lhat_pinv must be 6x8");
    for (int r = 0; r < 6; ++r) {
      if (lp[r].size() != 8) throw FormatError("suite manifest: lhat_pinv must be 6x8");
      for (int c = 0; c < 8; ++c) suite.lhat_pinv(r, c) = lp[r][c].get<double>();
    }
    if (m.contains("scenario")) {
      suite.scenario = scenario_from_json(m["scenario"]);
      if (m.contains("scenario_hash") &&
          m["scenario_hash"].get<std::string>() != scenario_hash(suite.scenario)) {
        std::clog << "warning: suite scenario does not match its recorded hash\n";
      }
    } else {
      suite.scenario = default_scenario();
    }
    if (m.contains("initial_poses")) {
      for (const auto& p : m["initial_poses"]) suite.initial_poses.push_back(pose_from_json(p));
    }
    for (const auto& name : m.at("demos")) {
      suite.demos.push_back(read_trace_csv((fs::path(dir) / name.get<std::string>()).string()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed suite manifest: " + std::string(e.what()));
  }
  return suite;
}

}  // namespace ilvs
