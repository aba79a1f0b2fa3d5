#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ilvs/control.hpp"
#include "ilvs/trace.hpp"
#include "ilvs/world.hpp"

namespace ilvs {

// Demonstrations recorded under one scenario and one (λ, L̂⁺).
struct DemoSuite {
  Scenario scenario;
  double lambda = 2.0;
  PseudoInverse lhat_pinv = PseudoInverse::Zero();
  std::vector<Pose> initial_poses;
  std::vector<Demonstration> demos;
};

// ε = L̂⁺e, ρ = v + λL̂⁺e for every sample, stored column-wise.
struct TrainingSet {
  Eigen::MatrixXd inputs;   // 6 × N
  Eigen::MatrixXd outputs;  // 6 × N
  // (demonstration index, sample index) of each column
  std::vector<std::pair<int, int>> provenance;

  Eigen::Index size() const { return inputs.cols(); }
  SampleMatrix joint() const;
};

// Tracking law with the true belt velocity expressed in the camera frame.
Twist oracle_controller(const WorldState& state, const Scenario& scenario, ControlGain gain,
                        const PseudoInverse& lp);

// Goal pose displaced by (−0.05,−0.02,+0.04), (+0.04,−0.025,+0.05), (0,+0.025,+0.06) m.
std::vector<Pose> default_demo_poses(const Scenario& scenario);

// Runs the oracle from the scenario's camera_pose0 for `duration` seconds at
// step `dt`. Any corner leaving the image aborts with SimulationAbort.
Demonstration record_demonstration(const Scenario& scenario, ControlGain gain,
                                   const PseudoInverse& lp, double duration, double dt);

DemoSuite collect_suite(const Scenario& scenario, const std::vector<Pose>& initial_poses,
                        ControlGain gain, const PseudoInverse& lp);

TrainingSet build_training_set(const DemoSuite& suite);
TrainingSet build_training_set(const std::vector<Demonstration>& demos, double lambda,
                               const PseudoInverse& lp);

// Writes demo_<i>.csv files and manifest.json into `dir`.
void save_suite(const DemoSuite& suite, const std::string& dir);
DemoSuite load_suite(const std::string& dir);

}  // namespace ilvs
