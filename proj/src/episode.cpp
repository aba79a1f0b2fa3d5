#include "ilvs/episode.hpp"

#include <cmath>
#include <future>
#include <iostream>
#include <sstream>

#include "ilvs/errors.hpp"

namespace ilvs {

ControllerKind parse_controller(const std::string& name) {
  if (name == "vs") return ControllerKind::vs;
  if (name == "oracle") return ControllerKind::oracle;
  if (name == "ilvs") return ControllerKind::ilvs;
  if (name == "reshaped") return ControllerKind::reshaped;
  throw ConfigError("unknown controller '" + name + "' (expected vs|oracle|ilvs|reshaped)");
}

std::string to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::vs: return "vs";
    case ControllerKind::oracle: return "oracle";
    case ControllerKind::ilvs: return "ilvs";
    case ControllerKind::reshaped: return "reshaped";
  }
  return "?";
}

void RunConfig::validate() const {
  scenario.validate();
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  for (const auto& p : perturbations) {
    if (!(p.time >= 0.0) || !p.offset.allFinite()) throw ConfigError("invalid perturbation event");
  }
}

Episode::Episode(const RunConfig& config, const GmrRegressor* model)
    : config_(config), model_(model), noise_rng_(config.seed) {
  config_.validate();
  const bool needs_model =
      config_.controller == ControllerKind::ilvs || config_.controller == ControllerKind::reshaped;
  if (needs_model && (model_ == nullptr || model_->empty())) {
    throw ConfigError(to_string(config_.controller) + " controller requires a trained model");
  }
  lp_ = constant_lhat_pinv(config_.scenario);
  desired_ = desired_features(config_.scenario);
  world_ = initial_world(config_.scenario);
  if (config_.initial_pose) world_.camera = *config_.initial_pose;
  applied_.assign(config_.perturbations.size(), false);
  num_steps_ = config_.scenario.num_steps();
  trace_.dt = config_.scenario.dt;
  trace_.samples.reserve(num_steps_);
  done_ = num_steps_ == 0;
}

void Episode::displace_target(const Vector3& offset) {
  world_ = ilvs::displace_target(world_, offset);
}

bool Episode::step() {
  if (done_) return false;
  const Scenario& sc = config_.scenario;
  const double t = static_cast<double>(step_) * sc.dt;
  world_.time = t;

  for (std::size_t i = 0; i < config_.perturbations.size(); ++i) {
    if (!applied_[i] && config_.perturbations[i].time <= t) {
      displace_target(config_.perturbations[i].offset);
      applied_[i] = true;
    }
  }

  const TargetState target = target_at(sc, world_);
  Observation obs;
  Observation truth;
  try {
    truth = observe(world_.camera, target.pose, sc);
    obs = sc.pixel_noise_sigma > 0.0 ? observe_noisy(world_.camera, target.pose, sc, noise_rng_)
                                     : truth;
  } catch (const BehindCameraError& e) {
    trace_.aborted = true;
    trace_.abort_reason = "target behind the camera at t=" + std::to_string(t);
    done_ = true;
    return false;
  }
  if (obs.out_of_view && config_.strict_fov) {
    trace_.aborted = true;
    trace_.abort_reason = "marker left the field of view at t=" + std::to_string(t);
    done_ = true;
    return false;
  }

  Sample s;
  s.t = t;
  s.e = visual_error(obs.features, desired_);
  s.pixels = obs.pixels;
  s.out_of_view = obs.out_of_view;
  s.camera_position = world_.camera.translation;
  s.camera_orientation = world_.camera.quaternion();
  s.goal_position = desired_camera_pose(target.pose, sc.desired_depth).translation;
  s.feature_rate =
      target_feature_rate(truth.features, target_twist_in_camera(world_.camera, target.twist));

  const ControlGain gain(config_.lambda);
  switch (config_.controller) {
    case ControllerKind::vs:
      s.v = vs_control(s.e, gain, lp_);
      break;
    case ControllerKind::oracle:
      s.v = tracking_control(s.e, gain, lp_, s.feature_rate);
      break;
    case ControllerKind::ilvs: {
      const IlvsCommand cmd = ilvs_command(s.e, gain, lp_, *model_);
      s.v = cmd.twist;
      s.rho_hat = cmd.rho_hat;
      break;
    }
    case ControllerKind::reshaped: {
      const Vector6 rho = model_->predict(lp_ * s.e);
      s.v = reshaped_control(s.e, gain, lp_, Twist::from_vector(rho),
                             vanishing_gain(t, config_.t_cut, config_.tau));
      s.rho_hat = rho;
      break;
    }
  }
  if (!s.v.is_finite()) throw NumericError("controller produced a non-finite twist");
  trace_.samples.push_back(s);

  world_.camera = integrate_twist(world_.camera, s.v, sc.dt);
  ++step_;
  world_.time = static_cast<double>(step_) * sc.dt;
  if (step_ >= num_steps_) done_ = true;
  return !done_;
}

void Episode::run() {
  while (step()) {
  }
}

Trace run_episode(const RunConfig& config, const GmrRegressor* model) {
  Episode ep(config, model);
  ep.run();
  return ep.take_trace();
}

std::string gain_label(double gain) {
  std::ostringstream os;
  os << gain;
  return os.str();
}

std::vector<CompareRow> compare_gains(const Scenario& scenario, const std::vector<double>& gains,
                                      const GmmModel& model, const std::optional<Pose>& initial_pose,
                                      std::uint64_t seed) {
  if (gains.empty()) throw ConfigError("compare_gains: at least one gain is required");
  const GmrRegressor gmr(model);
  RunConfig base;
  base.scenario = scenario;
  base.initial_pose = initial_pose;
  base.seed = seed;

  std::vector<CompareRow> rows;
  std::vector<RunConfig> configs;
  for (double g : gains) {
    rows.push_back({"vs_lambda" + gain_label(g), ControllerKind::vs, g, {}});
  }
  rows.push_back({"ilvs_lambda" + gain_label(model.lambda), ControllerKind::ilvs, model.lambda, {}});
  for (const auto& r : rows) {
    RunConfig cfg = base;
    cfg.controller = r.controller;
    cfg.lambda = r.lambda;
    cfg.validate();
    configs.push_back(cfg);
  }

  // Each episode owns its world state; only the regressor is shared read-only.
  std::vector<std::future<Trace>> futures;
  futures.reserve(configs.size());
  for (const auto& cfg : configs) {
    futures.push_back(std::async(std::launch::async, [&cfg, &gmr] { return run_episode(cfg, &gmr); }));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].trace = futures[i].get();
  return rows;
}

}  // namespace ilvs
