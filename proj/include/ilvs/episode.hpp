#pragma once

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ilvs/control.hpp"
#include "ilvs/gmr.hpp"
#include "ilvs/trace.hpp"
#include "ilvs/world.hpp"

namespace ilvs {

enum class ControllerKind { vs, oracle, ilvs, reshaped };

ControllerKind parse_controller(const std::string& name);
std::string to_string(ControllerKind kind);

// Sudden target displacement applied at the first control step with t ≥ time.
struct Perturbation {
  double time = 0.0;
  Vector3 offset = Vector3::Zero();
};

struct RunConfig {
  Scenario scenario;
  ControllerKind controller = ControllerKind::vs;
  double lambda = 2.0;
  std::string model_path;
  std::optional<Pose> initial_pose;
  std::vector<Perturbation> perturbations;
  std::string output_dir;
  std::uint64_t seed = 0;
  // Abort as soon as any corner leaves the image instead of flagging it.
  bool strict_fov = false;
  // Vanishing term of the reshaped controller.
  double t_cut = 5.0;
  double tau = 1.0;

  // Checks controller/model consistency and λ > 0. Throws ConfigError.
  void validate() const;
};

// Stepwise closed-loop simulation: observe, compute error, command the
// camera twist, integrate the camera, advance time.
class Episode {
 public:
  // `model` must outlive the episode; it is required for ilvs and reshaped.
  Episode(const RunConfig& config, const GmrRegressor* model = nullptr);

  // Runs one control step. Returns false once the episode is finished or aborted.
  bool step();
  void run();

  void displace_target(const Vector3& offset);

  bool finished() const { return done_; }
  std::size_t steps_taken() const { return step_; }
  const WorldState& world() const { return world_; }
  const Trace& trace() const { return trace_; }
  Trace take_trace() { return std::move(trace_); }
  const PseudoInverse& lhat_pinv() const { return lp_; }

 private:
  RunConfig config_;
  const GmrRegressor* model_;
  PseudoInverse lp_;
  FeatureVector desired_;
  WorldState world_;
  std::mt19937_64 noise_rng_;
  std::vector<bool> applied_;
  Trace trace_;
  std::size_t step_ = 0;
  std::size_t num_steps_ = 0;
  bool done_ = false;
};

Trace run_episode(const RunConfig& config, const GmrRegressor* model = nullptr);

struct CompareRow {
  std::string name;
  ControllerKind controller = ControllerKind::vs;
  double lambda = 0.0;
  Trace trace;
};

// Plain VS at each gain plus ILVS at the model gain, run concurrently.
// Rows keep the order of `gains`, with the ILVS row last.
std::vector<CompareRow> compare_gains(const Scenario& scenario, const std::vector<double>& gains,
                                      const GmmModel& model,
                                      const std::optional<Pose>& initial_pose = std::nullopt,
                                      std::uint64_t seed = 0);

// Short decimal label for a gain, e.g. "2" or "0.5".
std::string gain_label(double gain);

}  // namespace ilvs
