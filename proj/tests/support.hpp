#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "ilvs/control.hpp"
#include "ilvs/demo.hpp"
#include "ilvs/gmr.hpp"
#include "ilvs/world.hpp"

namespace ilvs::test {

// Default scenario, three oracle demonstrations and an 11-component model,
// built once per test binary.
struct TrainedFixture {
  Scenario scenario;
  PseudoInverse lp;
  DemoSuite suite;
  TrainingSet training;
  GmmModel model;
};

inline const TrainedFixture& trained() {
  static const TrainedFixture fx = [] {
    TrainedFixture f;
    f.scenario = default_scenario();
    f.lp = constant_lhat_pinv(f.scenario);
    f.suite = collect_suite(f.scenario, default_demo_poses(f.scenario), ControlGain(2.0), f.lp);
    f.training = build_training_set(f.suite);
    EmOptions opt;
    opt.k = 11;
    f.model = train_model(f.training, opt, 2.0, f.lp);
    return f;
  }();
  return fx;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("ilvs_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline Pose random_pose(std::mt19937_64& rng, double pos_scale = 1.0) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return Pose::from_quaternion(q, pos_scale * Vector3(n(rng), n(rng), n(rng)));
}

}  // namespace ilvs::test
