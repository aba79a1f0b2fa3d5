#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "ilvs/control.hpp"
#include "ilvs/demo.hpp"
#include "ilvs/errors.hpp"
#include "ilvs/metrics.hpp"
#include "support.hpp"

using namespace ilvs;

namespace {

Scenario short_scenario(double duration) {
  Scenario s = default_scenario();
  s.duration = duration;
  return s;
}

}  // namespace

TEST(OracleController, StaticBeltReducesToPlainVs) {
  Scenario s = default_scenario();
  s.belt_speed = 0.0;
  const PseudoInverse lp = constant_lhat_pinv(s);
  WorldState w = initial_world(s);
  w.camera.translation += Vector3(0.01, -0.02, 0.03);
  w.time = 2.0;
  const VisualError e = visual_error(observe(w.camera, target_at(s, w).pose, s).features, desired_features(s));
  EXPECT_EQ(oracle_controller(w, s, ControlGain(2), lp).vector(), vs_control(e, ControlGain(2), lp).vector());
}

TEST(OracleController, MatchesFirstLoggedCommand) {
  const auto& fx = test::trained();
  Scenario s = fx.scenario;
  s.camera_pose0 = fx.suite.initial_poses[0];
  const Twist v = oracle_controller(initial_world(s), s, ControlGain(fx.suite.lambda), fx.lp);
  EXPECT_EQ(v.vector(), fx.suite.demos[0].samples[0].v.vector());
}

TEST(RecordDemonstration, SampleCountAndConvergence) {
  const auto& fx = test::trained();
  for (const auto& d : fx.suite.demos) {
    ASSERT_EQ(d.samples.size(), 1000u);
    EXPECT_FALSE(d.aborted);
    EXPECT_LT(pixel_error(d.samples.back().e, fx.scenario.intrinsics), 0.1);
    EXPECT_NEAR(d.samples[1].t - d.samples[0].t, 0.01, 1e-15);
    check_uniform_time(d);
  }
}

TEST(RecordDemonstration, LoggedVelocityIsOracleOnLoggedState) {
  const auto& fx = test::trained();
  const ControlGain g(fx.suite.lambda);
  for (const auto& d : fx.suite.demos) {
    for (const auto& s : d.samples) {
      ASSERT_EQ(tracking_control(s.e, g, fx.lp, s.feature_rate).vector(), s.v.vector()) << "t=" << s.t;
    }
  }
}

TEST(RecordDemonstration, TrueRateIsTheTargetInducedFeatureMotion) {
  const auto& fx = test::trained();
  const Demonstration& d = fx.suite.demos[1];
  for (std::size_t n = 100; n < d.samples.size(); n += 97) {
    const Sample& s = d.samples[n];
    WorldState w;
    w.time = s.t;
    w.camera = s.camera_pose();
    const TargetState ts = target_at(fx.scenario, w);
    const FeatureVector f = observe(w.camera, ts.pose, fx.scenario).features;
    const Vector8 rate = target_feature_rate(f, target_twist_in_camera(w.camera, ts.twist));
    EXPECT_LT((rate - s.feature_rate).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(RecordDemonstration, OutOfViewAborts) {
  Scenario s = short_scenario(1.0);
  s.camera_pose0.translation += Vector3(0.2, 0.0, 0.0);
  EXPECT_THROW(record_demonstration(s, ControlGain(2), constant_lhat_pinv(s), 1.0, 0.01), SimulationAbort);
}

TEST(CollectSuite, Sizes) {
  const Scenario s = short_scenario(2.0);
  const PseudoInverse lp = constant_lhat_pinv(s);
  const auto poses = default_demo_poses(s);
  ASSERT_EQ(poses.size(), 3u);
  const DemoSuite one = collect_suite(s, {poses[0]}, ControlGain(2), lp);
  EXPECT_EQ(one.demos.size(), 1u);
  EXPECT_EQ(one.demos[0].samples.size(), 200u);

  const DemoSuite dup = collect_suite(s, {poses[1], poses[1]}, ControlGain(2), lp);
  ASSERT_EQ(dup.demos.size(), 2u);
  for (std::size_t n = 0; n < dup.demos[0].samples.size(); ++n) {
    EXPECT_EQ(dup.demos[0].samples[n].v.vector(), dup.demos[1].samples[n].v.vector());
  }
  EXPECT_THROW(collect_suite(s, {}, ControlGain(2), lp), ConfigError);
}

TEST(CollectSuite, DefaultPosesStartInView) {
  const Scenario s = default_scenario();
  for (const Pose& p : default_demo_poses(s)) {
    EXPECT_FALSE(observe(p, s.target_pose0, s).out_of_view);
  }
}

TEST(TrainingSet, SizeAndProvenance) {
  const auto& fx = test::trained();
  EXPECT_EQ(fx.training.size(), 3000);
  EXPECT_EQ(fx.training.provenance.size(), 3000u);
  EXPECT_EQ(fx.training.provenance[1500], std::make_pair(1, 500));
  const SampleMatrix j = fx.training.joint();
  EXPECT_EQ(j.rows(), 12);
  EXPECT_EQ(j.topRows(6), fx.training.inputs);
  EXPECT_EQ(j.bottomRows(6), fx.training.outputs);
}

TEST(TrainingSet, ZeroVelocityGivesScaledInput) {
  Demonstration d;
  d.dt = 0.01;
  Sample s;
  s.e << 0.01, -0.02, 0.03, 0.0, -0.01, 0.02, 0.005, -0.004;
  d.samples.push_back(s);
  const PseudoInverse lp = constant_lhat_pinv(default_scenario());
  const TrainingSet t = build_training_set({d}, 2.0, lp);
  EXPECT_EQ(t.outputs.col(0), Vector6(2.0 * t.inputs.col(0)));
}

TEST(TrainingSet, CompensationTermEqualsNegatedFeedforward) {
  const auto& fx = test::trained();
  double worst = 0.0;
  for (Eigen::Index c = 0; c < fx.training.size(); ++c) {
    const auto [d, n] = fx.training.provenance[static_cast<std::size_t>(c)];
    const Vector8& rate = fx.suite.demos[static_cast<std::size_t>(d)].samples[static_cast<std::size_t>(n)].feature_rate;
    worst = std::max(worst, (fx.training.outputs.col(c) + fx.lp * rate).norm());
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(TrainingSet, ReconstructsLoggedVelocities) {
  const auto& fx = test::trained();
  const double lambda = fx.suite.lambda;
  std::size_t inexact = 0;
  double worst = 0.0;
  for (Eigen::Index c = 0; c < fx.training.size(); ++c) {
    const auto [d, n] = fx.training.provenance[static_cast<std::size_t>(c)];
    const Vector6 logged = fx.suite.demos[static_cast<std::size_t>(d)].samples[static_cast<std::size_t>(n)].v.vector();
    const Vector6 rebuilt = -lambda * fx.training.inputs.col(c) + fx.training.outputs.col(c);
    if (rebuilt != logged) ++inexact;
    worst = std::max(worst, (rebuilt - logged).cwiseAbs().maxCoeff());
  }
  EXPECT_EQ(inexact, 0u) << "worst deviation " << worst;
}

TEST(TrainingSet, CompensationIsSteadyDuringTracking) {
  const auto& fx = test::trained();
  for (std::size_t d = 0; d < fx.suite.demos.size(); ++d) {
    const Eigen::Index n = static_cast<Eigen::Index>(fx.suite.demos[d].samples.size());
    const Eigen::Index start = static_cast<Eigen::Index>(d) * n + n / 2;
    const Eigen::MatrixXd rho = fx.training.outputs.middleCols(start, n - n / 2);
    const Eigen::VectorXd mean = rho.rowwise().mean();
    const double var = (rho.colwise() - mean).colwise().squaredNorm().sum() / static_cast<double>(rho.cols() - 1);
    EXPECT_LE(std::sqrt(var), 0.05 * mean.norm()) << "demo " << d;
  }
}

TEST(Suite, SaveLoadRoundTrip) {
  const auto& fx = test::trained();
  const auto dir = test::temp_dir("suite_roundtrip");
  save_suite(fx.suite, dir.string());
  EXPECT_TRUE(std::filesystem::exists(dir / "manifest.json"));
  const DemoSuite loaded = load_suite(dir.string());
  ASSERT_EQ(loaded.demos.size(), fx.suite.demos.size());
  EXPECT_EQ(loaded.lambda, fx.suite.lambda);
  EXPECT_EQ(loaded.lhat_pinv, fx.suite.lhat_pinv);
  const TrainingSet t = build_training_set(loaded);
  EXPECT_EQ(t.inputs, fx.training.inputs);
  EXPECT_EQ(t.outputs, fx.training.outputs);
}
