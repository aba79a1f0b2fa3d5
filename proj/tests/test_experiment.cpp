#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "ilvs/config.hpp"
#include "ilvs/control.hpp"
#include "ilvs/episode.hpp"
#include "ilvs/errors.hpp"
#include "ilvs/metrics.hpp"
#include "ilvs/svg.hpp"
#include "support.hpp"

using namespace ilvs;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::size_t count_matches(const std::string& text, const std::string& pattern) {
  const std::regex re(pattern);
  return static_cast<std::size_t>(std::distance(std::sregex_iterator(text.begin(), text.end(), re),
                                                std::sregex_iterator()));
}

RunConfig config_for(ControllerKind kind, double lambda) {
  RunConfig c;
  c.scenario = default_scenario();
  c.controller = kind;
  c.lambda = lambda;
  return c;
}

bool same_sample(const Sample& a, const Sample& b) {
  auto eq = [](const auto& x, const auto& y) { return (x.array() == y.array()).all(); };
  const bool rho_eq = (a.rho_hat.array().isNaN() && b.rho_hat.array().isNaN()).all() || eq(a.rho_hat, b.rho_hat);
  return a.t == b.t && eq(a.e, b.e) && eq(a.v.vector(), b.v.vector()) && eq(a.camera_position, b.camera_position) &&
         eq(a.camera_orientation.coeffs(), b.camera_orientation.coeffs()) && eq(a.pixels, b.pixels) && rho_eq &&
         eq(a.goal_position, b.goal_position) && eq(a.feature_rate, b.feature_rate) && a.out_of_view == b.out_of_view;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ILVS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(RunEpisode, OracleConvergesWhileTracking) {
  const Trace t = run_episode(config_for(ControllerKind::oracle, 2.0));
  ASSERT_EQ(t.size(), 1000u);
  const auto px = pixel_errors(t, default_scenario().intrinsics);
  EXPECT_LT(px.back(), 0.1);
  for (std::size_t k = 300; k < px.size(); ++k) ASSERT_LT(px[k], 0.1) << "t=" << t.samples[k].t;
}

TEST(RunEpisode, PlainVsNeverCentersTheTarget) {
  const Trace t = run_episode(config_for(ControllerKind::vs, 2.0));
  EXPECT_GT(steady_state_error(t, default_scenario().intrinsics), 5.0);
  EXPECT_FALSE(t.aborted);
}

TEST(RunEpisode, IlvsTracksWithinThreshold) {
  const auto& fx = test::trained();
  const GmrRegressor gmr(fx.model);
  const Trace t = run_episode(config_for(ControllerKind::ilvs, 2.0), &gmr);
  EXPECT_LE(steady_state_error(t, fx.scenario.intrinsics), 5.0);
  for (const auto& s : t.samples) ASSERT_TRUE(s.rho_hat.allFinite());
}

TEST(RunEpisode, ReshapedFallsBackToPlainVsAfterCut) {
  const auto& fx = test::trained();
  const GmrRegressor gmr(fx.model);
  RunConfig c = config_for(ControllerKind::reshaped, 2.0);
  c.t_cut = 2.0;
  c.tau = 0.2;
  const Trace reshaped = run_episode(c, &gmr);
  const Trace plain = run_episode(config_for(ControllerKind::vs, 2.0));
  const double a = steady_state_error(reshaped, fx.scenario.intrinsics);
  const double b = steady_state_error(plain, fx.scenario.intrinsics);
  EXPECT_NEAR(a, b, 0.05 * b);
}

TEST(RunConfig, Validation) {
  RunConfig c = config_for(ControllerKind::ilvs, 2.0);
  EXPECT_THROW(Episode{c}, ConfigError);
  c.controller = ControllerKind::vs;
  c.lambda = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(parse_controller("pid"), ConfigError);
  for (auto k : {ControllerKind::vs, ControllerKind::oracle, ControllerKind::ilvs, ControllerKind::reshaped}) {
    EXPECT_EQ(parse_controller(to_string(k)), k);
  }
}

TEST(RunEpisode, StrictFieldOfViewAbortsWithPartialTrace) {
  RunConfig c = config_for(ControllerKind::vs, 1.0);
  c.strict_fov = true;
  const Trace t = run_episode(c);
  EXPECT_TRUE(t.aborted);
  EXPECT_FALSE(t.abort_reason.empty());
  EXPECT_GT(t.size(), 0u);
  EXPECT_LT(t.size(), 1000u);
}

TEST(RunEpisode, BehindCameraAborts) {
  RunConfig c = config_for(ControllerKind::vs, 2.0);
  Pose start = c.scenario.camera_pose0;
  start.rotation = start.rotation * rot_x(std::numbers::pi);
  c.initial_pose = start;
  const Trace t = run_episode(c);
  EXPECT_TRUE(t.aborted);
  EXPECT_EQ(t.size(), 0u);
}

TEST(RunEpisode, DeterministicForSameSeed) {
  RunConfig c = config_for(ControllerKind::vs, 2.0);
  c.scenario.pixel_noise_sigma = 0.3;
  c.seed = 5;
  const auto dir = test::temp_dir("determinism");
  write_trace_csv(run_episode(c), (dir / "a.csv").string());
  write_trace_csv(run_episode(c), (dir / "b.csv").string());
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
  c.seed = 6;
  write_trace_csv(run_episode(c), (dir / "c.csv").string());
  EXPECT_NE(slurp(dir / "a.csv"), slurp(dir / "c.csv"));
}

TEST(Episode, PerturbationEventEqualsManualDisplacement) {
  const auto& fx = test::trained();
  const GmrRegressor gmr(fx.model);
  const Vector3 offset(0.05, 0.0, 0.0);
  RunConfig c = config_for(ControllerKind::ilvs, 2.0);
  c.perturbations.push_back({5.0, offset});
  const Trace event = run_episode(c, &gmr);

  RunConfig plain = c;
  plain.perturbations.clear();
  Episode ep(plain, &gmr);
  while (ep.steps_taken() < 500) ASSERT_TRUE(ep.step());
  ep.displace_target(offset);
  ep.run();
  const Trace manual = ep.take_trace();

  ASSERT_EQ(event.size(), manual.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < event.size(); ++k) {
    worst = std::max(worst, (event.samples[k].camera_position - manual.samples[k].camera_position).cwiseAbs().maxCoeff());
    worst = std::max(worst, (event.samples[k].e - manual.samples[k].e).cwiseAbs().maxCoeff());
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(Episode, RecoversFromTargetDisplacement) {
  const auto& fx = test::trained();
  const GmrRegressor gmr(fx.model);
  for (double lambda : {2.0, 10.0}) {
    RunConfig c = config_for(ControllerKind::ilvs, lambda);
    c.perturbations.push_back({5.0, Vector3(0.05, 0.0, 0.0)});
    const Trace t = run_episode(c, &gmr);
    ASSERT_FALSE(t.aborted);
    const auto px = pixel_errors(t, fx.scenario.intrinsics);
    EXPECT_GT(px[500], 5.0);
    bool recovered = false;
    for (std::size_t k = 500; k < px.size() && t.samples[k].t <= 8.0; ++k) recovered |= px[k] < 5.0;
    EXPECT_TRUE(recovered) << "lambda " << lambda;
  }
}

TEST(CompareGains, OrderingAndGainScaling) {
  const auto& fx = test::trained();
  const auto rows = compare_gains(fx.scenario, {1.0, 2.0, 5.0}, fx.model);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[3].controller, ControllerKind::ilvs);
  std::vector<double> err;
  for (const auto& r : rows) err.push_back(steady_state_error(r.trace, fx.scenario.intrinsics));
  EXPECT_GT(err[0], err[1]);
  EXPECT_GT(err[1], err[2]);
  EXPECT_GT(err[2], err[3]);
  EXPECT_GT(err[2], 5.0);
  EXPECT_LE(err[3], 5.0);
  EXPECT_NEAR(err[0] / err[1], 2.0, 0.3);
  EXPECT_EQ(rows[0].name, "vs_lambda1");
  EXPECT_EQ(rows[3].name, "ilvs_lambda2");

  // ‖L̂⁺e‖ at steady state halves when the gain doubles.
  auto projected = [&](const Trace& t) { return (fx.lp * t.samples.back().e).norm(); };
  EXPECT_NEAR(projected(rows[0].trace) / projected(rows[1].trace), 2.0, 0.3);
}

TEST(Metrics, ReplayRmseDefinition) {
  const auto& fx = test::trained();
  const Demonstration& demo = fx.suite.demos[0];
  const ReplayRmse same = rmse_vs_demo(demo, demo);
  EXPECT_EQ(same.features.mean, 0.0);
  EXPECT_EQ(same.position.mean, 0.0);
  EXPECT_EQ(same.velocity.mean, 0.0);

  Trace shifted = demo;
  for (auto& s : shifted.samples) s.pixels[0] += 3.0;
  const ReplayRmse r = rmse_vs_demo(shifted, demo);
  EXPECT_NEAR(r.feature_px[0], 3.0, 1e-9);
  for (int i = 1; i < 8; ++i) EXPECT_EQ(r.feature_px[static_cast<std::size_t>(i)], 0.0);
  EXPECT_NEAR(r.features.mean, 3.0 / 8.0, 1e-9);

  Trace other = demo;
  other.dt = 0.02;
  EXPECT_THROW(rmse_vs_demo(other, demo), ConfigError);

  Trace truncated = demo;
  truncated.samples.resize(100);
  EXPECT_EQ(rmse_vs_demo(truncated, demo).samples, 100u);
}

TEST(Metrics, TrackingPhase) {
  const CameraIntrinsics intr = default_scenario().intrinsics;
  const Trace oracle = run_episode(config_for(ControllerKind::oracle, 2.0));
  const TrackingPhase tp = tracking_phase_metrics(oracle, intr);
  EXPECT_TRUE(tp.entered);
  EXPECT_LT(tp.pixel.mean, 0.5);

  // Started at the goal, plain VS enters the phase at t = 0 and then drifts away.
  const Trace vs = run_episode(config_for(ControllerKind::vs, 1.0));
  const TrackingPhase drift = tracking_phase_metrics(vs, intr);
  EXPECT_TRUE(!drift.entered || drift.pixel.mean > 5.0);

  RunConfig far = config_for(ControllerKind::vs, 1.0);
  far.initial_pose = unseen_initial_conditions(far.scenario)[1].pose;
  const TrackingPhase none = tracking_phase_metrics(run_episode(far), intr);
  EXPECT_FALSE(none.entered);
  EXPECT_EQ(none.samples, 0u);
}

TEST(Metrics, InvariantToTrailingSteadyPadding) {
  const CameraIntrinsics intr = default_scenario().intrinsics;
  Trace t;
  t.dt = 0.01;
  for (int k = 0; k < 400; ++k) {
    Sample s;
    s.t = k * 0.01;
    // Transient above the 5 px threshold, then a constant steady state.
    const double scale = k < 100 ? 0.05 * (1.0 - k / 200.0) : 1e-3;
    s.e.setConstant(scale);
    s.camera_position = Vector3(scale, 0, 0);
    t.samples.push_back(s);
  }
  Trace padded = t;
  for (int k = 0; k < 600; ++k) {
    Sample s = t.samples.back();
    s.t = padded.samples.back().t + 0.01;
    padded.samples.push_back(s);
  }
  const TrackingPhase a = tracking_phase_metrics(t, intr), b = tracking_phase_metrics(padded, intr);
  EXPECT_EQ(a.entry_time, b.entry_time);
  EXPECT_NEAR(a.pixel.mean, b.pixel.mean, 1e-9);
  EXPECT_NEAR(a.pixel.std, b.pixel.std, 1e-9);
  EXPECT_NEAR(a.position_mm.mean, b.position_mm.mean, 1e-9);
  EXPECT_NEAR(steady_state_error(t, intr), steady_state_error(padded, intr), 1e-9);
  EXPECT_NEAR(compute_metrics(t, intr).final_pixel_error, compute_metrics(padded, intr).final_pixel_error, 1e-9);
}

TEST(Metrics, NonNegative) {
  const auto& fx = test::trained();
  const Metrics m = compute_metrics(fx.suite.demos[1], fx.scenario.intrinsics, 5.0, &fx.suite.demos[0]);
  ASSERT_TRUE(m.replay.has_value());
  EXPECT_GE(m.replay->features.mean, 0.0);
  EXPECT_GE(m.replay->features.std, 0.0);
  EXPECT_GE(m.tracking.pixel.mean, 0.0);
  EXPECT_GE(m.steady_state_window_err, 0.0);
  ASSERT_TRUE(m.convergence_time_to_threshold.has_value());
  EXPECT_GT(*m.convergence_time_to_threshold, 0.0);
}

TEST(Outputs, EmptyTrace) {
  const auto dir = test::temp_dir("empty_outputs");
  Trace t;
  t.dt = 0.01;
  emit_outputs(t, compute_metrics(t, default_scenario().intrinsics), default_scenario(), dir.string());
  EXPECT_EQ(slurp(dir / "trace.csv"), trace_csv_header() + "\n");
  EXPECT_EQ(slurp(dir / "metrics.json"), "{}\n");
  EXPECT_TRUE(fs::exists(dir / "image_plane.svg"));
}

TEST(Outputs, CsvRoundTripIsExact) {
  const auto& fx = test::trained();
  const GmrRegressor gmr(fx.model);
  RunConfig c = config_for(ControllerKind::ilvs, 2.0);
  c.scenario.duration = 2.0;
  const Trace ilvs = run_episode(c, &gmr);
  const auto dir = test::temp_dir("csv_roundtrip");
  for (const Trace* t : {&ilvs, &fx.suite.demos[2]}) {
    write_trace_csv(*t, (dir / "t.csv").string());
    const Trace back = read_trace_csv((dir / "t.csv").string());
    ASSERT_EQ(back.size(), t->size());
    EXPECT_EQ(back.dt, t->dt);
    for (std::size_t k = 0; k < back.size(); ++k) ASSERT_TRUE(same_sample(back.samples[k], t->samples[k])) << k;
  }
  const std::string header = slurp(dir / "t.csv").substr(0, trace_csv_header().size());
  EXPECT_EQ(header.rfind("t,e0,e1,e2,e3,e4,e5,e6,e7,vx,vy,vz,wx,wy,wz,u0,v0,u1,v1,u2,v2,u3,v3,px,py,pz,qw,qx,qy,qz", 0), 0u);
}

TEST(Outputs, CsvReaderRejectsMalformedInput) {
  const auto dir = test::temp_dir("csv_bad");
  std::ofstream(dir / "bad.csv") << "t,e0\n0,1\n";
  EXPECT_THROW(read_trace_csv((dir / "bad.csv").string()), FormatError);
  EXPECT_THROW(read_trace_csv((dir / "missing.csv").string()), FormatError);
}

TEST(Outputs, SvgHasOnePolylinePerCornerAndMarkers) {
  const auto& fx = test::trained();
  const Pose target = Pose::identity();
  const Vector8 goal = observe(desired_camera_pose(target, fx.scenario.desired_depth), target, fx.scenario).pixels;
  const std::string svg = image_plane_svg(fx.suite.demos[0], fx.scenario.intrinsics, goal);
  EXPECT_EQ(count_matches(svg, "<polyline[^>]*class=\"feature\""), 4u);
  EXPECT_EQ(count_matches(svg, "<circle class=\"start\""), 4u);
  EXPECT_EQ(count_matches(svg, "<path class=\"goal\""), 4u);
  EXPECT_EQ(count_matches(svg, "class=\"reference\""), 0u);
  const std::string with_ref =
      image_plane_svg(fx.suite.demos[0], fx.scenario.intrinsics, goal, {&fx.suite.demos[1]});
  EXPECT_EQ(count_matches(with_ref, "class=\"reference\""), 4u);
  const std::string err = error_vs_time_svg(fx.suite.demos[0], fx.scenario.intrinsics);
  EXPECT_EQ(count_matches(err, "<polyline"), 5u);
}

TEST(Config, ScenarioJsonRoundTrip) {
  Scenario s = default_scenario();
  s.belt_speed = 0.07;
  s.seed = 42;
  s.pixel_noise_sigma = 0.25;
  const Scenario back = scenario_from_json(scenario_to_json(s));
  EXPECT_EQ(back.belt_speed, 0.07);
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.intrinsics.fx, s.intrinsics.fx);
  EXPECT_EQ(scenario_hash(back), scenario_hash(s));
  EXPECT_NE(scenario_hash(default_scenario()), scenario_hash(s));

  nlohmann::json j = scenario_to_json(s);
  j["bogus"] = 1;
  EXPECT_THROW(scenario_from_json(j), ConfigError);
  const Scenario defaults = scenario_from_json(nlohmann::json::object());
  EXPECT_EQ(scenario_hash(defaults), scenario_hash(default_scenario()));
}

TEST(Config, UnseenInitialConditionsStayWithinDeclaredOffsets) {
  const Scenario s = default_scenario();
  const Pose goal = desired_camera_pose(s.target_pose0, s.desired_depth);
  const auto conditions = unseen_initial_conditions(s);
  ASSERT_EQ(conditions.size(), 3u);
  for (const auto& c : conditions) {
    EXPECT_LE((c.pose.translation - goal.translation).cwiseAbs().maxCoeff(), 0.10 + 1e-12) << c.name;
    const double angle = Eigen::AngleAxisd(goal.rotation.transpose() * c.pose.rotation).angle();
    EXPECT_LE(angle, 10.0 * std::numbers::pi / 180.0 + 1e-9) << c.name;
    EXPECT_FALSE(observe(c.pose, s.target_pose0, s).out_of_view) << c.name;
  }
}

TEST(Cli, ExitCodes) {
  const auto dir = test::temp_dir("cli");
  EXPECT_EQ(run_cli("scenario --out " + (dir / "s.json").string()), 0);
  EXPECT_EQ(run_cli("run --scenario " + (dir / "s.json").string() + " --controller vs --lambda 2 --no-svg --out " +
                    (dir / "run").string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "run" / "trace.csv"));
  EXPECT_EQ(run_cli("run --controller pid --out " + (dir / "x").string()), 2);
  EXPECT_EQ(run_cli("run --controller ilvs --out " + (dir / "x").string()), 2);
  EXPECT_EQ(run_cli("run --controller vs --lambda -1 --out " + (dir / "x").string()), 2);
  std::ofstream(dir / "broken.json") << "{\"belt_speed_mps\": ";
  EXPECT_EQ(run_cli("run --scenario " + (dir / "broken.json").string() + " --out " + (dir / "x").string()), 2);
  EXPECT_EQ(run_cli("run --controller vs --lambda 1 --strict-fov --no-svg --out " + (dir / "abort").string()), 3);
  EXPECT_EQ(run_cli("eval --trace " + (dir / "run" / "trace.csv").string() + " --out " + (dir / "m.json").string()), 0);
  EXPECT_NE(slurp(dir / "m.json").find("\"tracking_phase_entered\""), std::string::npos);
}
