// Command-line front end: record demonstrations, train the compensation
// model, run/compare controllers and evaluate traces.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ilvs/config.hpp"
#include "ilvs/demo.hpp"
#include "ilvs/episode.hpp"
#include "ilvs/errors.hpp"
#include "ilvs/gmr.hpp"
#include "ilvs/metrics.hpp"

namespace fs = std::filesystem;
using namespace ilvs;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitAbort = 3;
constexpr int kExitNumeric = 4;

std::vector<double> parse_doubles(const std::string& text, char sep = ',') {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse number '" + item + "' in '" + text + "'");
    }
  }
  return out;
}

Perturbation parse_perturbation(const std::string& text) {
  const auto v = parse_doubles(text);
  if (v.size() != 4) throw ConfigError("--perturb expects t,dx,dy,dz");
  return {v[0], Vector3(v[1], v[2], v[3])};
}

// "1..15" or "1,3,5"
std::vector<int> parse_k_range(const std::string& text) {
  std::vector<int> ks;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const int lo = std::stoi(text.substr(0, dots));
    const int hi = std::stoi(text.substr(dots + 2));
    if (lo < 1 || hi < lo) throw ConfigError("bad K range '" + text + "'");
    for (int k = lo; k <= hi; ++k) ks.push_back(k);
  } else {
    for (double d : parse_doubles(text)) ks.push_back(static_cast<int>(d));
  }
  if (ks.empty()) throw ConfigError("empty K range");
  return ks;
}

Scenario scenario_or_default(const std::string& path) {
  return path.empty() ? default_scenario() : load_scenario(path);
}

void warn_model_mismatch(const GmmModel& model, double lambda, const PseudoInverse& lp) {
  if (model.lambda != lambda) {
    std::clog << "warning: model was trained with lambda=" << model.lambda
              << ", running with lambda=" << lambda << '\n';
  }
  if (model.lhat_pinv.rows() != 6 || model.lhat_pinv.cols() != 8 ||
      (model.lhat_pinv - lp).cwiseAbs().maxCoeff() > 1e-9) {
    std::clog << "warning: model L^+ differs from the scenario's goal L^+\n";
  }
}


int cmd_demo(const std::string& scenario_path, const std::string& poses_path, double lambda,
             const std::string& out) {
  const Scenario sc = scenario_or_default(scenario_path);
  const auto poses = poses_path.empty() ? default_demo_poses(sc) : load_poses(poses_path);
  const PseudoInverse lp = constant_lhat_pinv(sc);
  const DemoSuite suite = collect_suite(sc, poses, ControlGain(lambda), lp);
  save_suite(suite, out);
  for (std::size_t i = 0; i < suite.demos.size(); ++i) {
    const auto px = pixel_errors(suite.demos[i], sc.intrinsics);
    std::cout << "demo_" << i << ".csv: " << suite.demos[i].size() << " samples, final error "
              << (px.empty() ? 0.0 : px.back()) << " px\n";
  }
  return kExitOk;
}

int cmd_train(const std::string& suite_dir, int k, const std::string& grid, int folds,
              const std::string& out, std::uint64_t seed, const EmOptions& base) {
  const DemoSuite suite = load_suite(suite_dir);
  const TrainingSet set = build_training_set(suite);
  EmOptions opt = base;
  opt.k = k;
  opt.seed = seed;
  if (!grid.empty()) {
    const auto gs = model_select_gridsearch(set.joint(), parse_k_range(grid), folds, seed, opt);
    for (std::size_t i = 0; i < gs.candidates.size(); ++i) {
      std::cout << "K=" << gs.candidates[i] << " held-out log-likelihood/sample " << gs.scores[i]
                << '\n';
    }
    if (gs.used_train_fallback) std::cout << "(fewer than 2 folds: train-set likelihood used)\n";
    std::cout << "selected K=" << gs.best_k << '\n';
    opt.k = gs.best_k;
  }
  const GmmModel model = train_model(set, opt, suite.lambda, suite.lhat_pinv);
  save_model(model, out);
  std::cout << "trained K=" << model.mixture.k() << " on " << set.size() << " samples -> " << out
            << '\n';
  return kExitOk;
}

int cmd_run(RunConfig cfg, const std::string& demo_path, bool svg) {
  cfg.validate();
  GmmModel model;
  GmrRegressor gmr;
  if (!cfg.model_path.empty()) {
    model = load_model(cfg.model_path);
    warn_model_mismatch(model, cfg.lambda, constant_lhat_pinv(cfg.scenario));
    gmr = GmrRegressor(model);
  }
  const Trace trace = run_episode(cfg, gmr.empty() ? nullptr : &gmr);
  std::optional<Demonstration> demo;
  if (!demo_path.empty()) demo = read_trace_csv(demo_path);
  const Metrics m = compute_metrics(trace, cfg.scenario.intrinsics, 5.0, demo ? &*demo : nullptr);
  OutputOptions opts;
  opts.svg = svg;
  if (demo) opts.references.push_back(&*demo);
  emit_outputs(trace, m, cfg.scenario, cfg.output_dir, opts);
  std::cout << to_string(cfg.controller) << " lambda=" << cfg.lambda << ": " << trace.size()
            << " steps, final error " << m.final_pixel_error << " px\n";
  if (trace.aborted) {
    std::cerr << "simulation aborted: " << trace.abort_reason << '\n';
    return kExitAbort;
  }
  return kExitOk;
}

int cmd_compare(const Scenario& sc, const std::string& model_path, const std::string& gains_text,
                const std::optional<Pose>& initial_pose, const std::string& out, std::uint64_t seed) {
  const GmmModel model = load_model(model_path);
  const auto gains = parse_doubles(gains_text);
  warn_model_mismatch(model, model.lambda, constant_lhat_pinv(sc));
  const std::vector<CompareRow> rows = compare_gains(sc, gains, model, initial_pose, seed);
  fs::create_directories(out);
  nlohmann::json summary = nlohmann::json::array();
  std::ofstream table(fs::path(out) / "summary.csv", std::ios::binary);
  table << "run,controller,lambda,steady_state_err_px,tracking_phase_entered,aborted\n";
  bool aborted = false;
  for (const auto& row : rows) {
    const Trace& trace = row.trace;
    const Metrics m = compute_metrics(trace, sc.intrinsics);
    emit_outputs(trace, m, sc, (fs::path(out) / row.name).string());
    const double ss = steady_state_error(trace, sc.intrinsics);
    summary.push_back({{"run", row.name},
                       {"controller", to_string(row.controller)},
                       {"lambda", row.lambda},
                       {"steady_state_err_px", ss},
                       {"tracking_phase_entered", m.tracking.entered},
                       {"aborted", trace.aborted}});
    table << row.name << ',' << to_string(row.controller) << ',' << row.lambda
          << ',' << ss << ',' << (m.tracking.entered ? 1 : 0) << ',' << (trace.aborted ? 1 : 0)
          << '\n';
    std::cout << row.name << ": steady-state error " << ss << " px\n";
    aborted = aborted || trace.aborted;
  }
  std::ofstream(fs::path(out) / "summary.json", std::ios::binary) << summary.dump(2) << '\n';
  return aborted ? kExitAbort : kExitOk;
}

int cmd_eval(const std::string& trace_path, const std::string& demo_path, double threshold,
             const std::string& scenario_path, const std::string& out) {
  const Scenario sc = scenario_or_default(scenario_path);
  const Trace trace = read_trace_csv(trace_path);
  std::optional<Demonstration> demo;
  if (!demo_path.empty()) demo = read_trace_csv(demo_path);
  const Metrics m = compute_metrics(trace, sc.intrinsics, threshold, demo ? &*demo : nullptr);
  const std::string text = metrics_json(m);
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out);
    f << text;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Visual servoing with a learned tracking compensation term"};
  app.require_subcommand(1);

  // scenario
  auto* scen = app.add_subcommand("scenario", "Write the default scenario config");
  std::string scen_out = "scenario.json";
  scen->add_option("--out", scen_out, "Output JSON path");

  // demo
  auto* demo = app.add_subcommand("demo", "Record oracle demonstrations");
  std::string demo_scenario, demo_poses, demo_out;
  double demo_lambda = 2.0;
  demo->add_option("--scenario", demo_scenario, "Scenario JSON");
  demo->add_option("--poses", demo_poses, "JSON array of initial camera poses");
  demo->add_option("--lambda", demo_lambda, "Oracle gain")->check(CLI::PositiveNumber);
  demo->add_option("--out", demo_out, "Suite directory")->required();

  // train
  auto* train = app.add_subcommand("train", "Fit the compensation model on a demo suite");
  std::string train_suite, train_out, train_grid;
  int train_k = 11, train_folds = 5;
  std::uint64_t train_seed = 0;
  EmOptions em;
  train->add_option("--suite", train_suite, "Suite directory")->required();
  train->add_option("--k", train_k, "Number of mixture components")->check(CLI::PositiveNumber);
  train->add_option("--grid", train_grid, "Grid-search K range, e.g. 1..15");
  train->add_option("--folds", train_folds, "Cross-validation folds for --grid");
  train->add_option("--out", train_out, "Model JSON path")->required();
  train->add_option("--seed", train_seed, "Seed for k-means++ and fold shuffling");
  train->add_option("--tol", em.tol, "Relative log-likelihood tolerance");
  train->add_option("--max-iter", em.max_iter, "EM iteration cap");
  train->add_option("--reg", em.reg, "Covariance regularization");

  // run
  auto* run = app.add_subcommand("run", "Run one closed-loop episode");
  std::string run_scenario, run_controller = "vs", run_pose, run_demo;
  std::vector<std::string> run_perturb;
  RunConfig rc;
  bool run_no_svg = false;
  std::optional<std::uint64_t> run_seed;
  run->add_option("--scenario", run_scenario, "Scenario JSON");
  run->add_option("--controller", run_controller, "vs|oracle|ilvs|reshaped");
  run->add_option("--lambda", rc.lambda, "Control gain");
  run->add_option("--model", rc.model_path, "Model JSON (ilvs, reshaped)");
  run->add_option("--perturb", run_perturb, "Target displacement t,dx,dy,dz (repeatable)");
  run->add_option("--initial-pose", run_pose, "JSON pose overriding the start camera pose");
  run->add_option("--demo", run_demo, "Demonstration CSV for replay metrics");
  run->add_option("--t-cut", rc.t_cut, "Reshaped: time after which h decays");
  run->add_option("--tau", rc.tau, "Reshaped: decay time constant");
  run->add_flag("--strict-fov", rc.strict_fov, "Abort when a corner leaves the image");
  run->add_flag("--no-svg", run_no_svg, "Skip SVG plots");
  run->add_option("--out", rc.output_dir, "Output directory")->required();
  run->add_option("--seed", run_seed, "Noise seed (defaults to the scenario seed)");

  // compare
  auto* cmp = app.add_subcommand("compare", "Plain VS at several gains vs ILVS");
  std::string cmp_scenario, cmp_model, cmp_gains = "1,2,5", cmp_out, cmp_pose;
  std::optional<std::uint64_t> cmp_seed;
  cmp->add_option("--scenario", cmp_scenario, "Scenario JSON");
  cmp->add_option("--model", cmp_model, "Model JSON")->required();
  cmp->add_option("--gains", cmp_gains, "Comma-separated plain-VS gains");
  cmp->add_option("--initial-pose", cmp_pose, "JSON pose overriding the start camera pose");
  cmp->add_option("--out", cmp_out, "Output directory")->required();
  cmp->add_option("--seed", cmp_seed, "Noise seed");

  // eval
  auto* ev = app.add_subcommand("eval", "Compute metrics for a trace CSV");
  std::string ev_trace, ev_demo, ev_out, ev_scenario;
  double ev_threshold = 5.0;
  ev->add_option("--trace", ev_trace, "Trace CSV")->required();
  ev->add_option("--demo", ev_demo, "Demonstration CSV for replay RMSE");
  ev->add_option("--threshold-px", ev_threshold, "Tracking-phase threshold");
  ev->add_option("--scenario", ev_scenario, "Scenario JSON (intrinsics)");
  ev->add_option("--out", ev_out, "Metrics JSON path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*scen) {
      save_scenario(default_scenario(), scen_out);
      return kExitOk;
    }
    if (*demo) return cmd_demo(demo_scenario, demo_poses, demo_lambda, demo_out);
    if (*train) return cmd_train(train_suite, train_k, train_grid, train_folds, train_out, train_seed, em);
    if (*run) {
      rc.scenario = scenario_or_default(run_scenario);
      rc.controller = parse_controller(run_controller);
      for (const auto& p : run_perturb) rc.perturbations.push_back(parse_perturbation(p));
      if (!run_pose.empty()) rc.initial_pose = load_poses(run_pose).front();
      rc.seed = run_seed.value_or(rc.scenario.seed);
      return cmd_run(rc, run_demo, !run_no_svg);
    }
    if (*cmp) {
      const Scenario sc = scenario_or_default(cmp_scenario);
      std::optional<Pose> pose;
      if (!cmp_pose.empty()) pose = load_poses(cmp_pose).front();
      return cmd_compare(sc, cmp_model, cmp_gains, pose, cmp_out, cmp_seed.value_or(sc.seed));
    }
    if (*ev) return cmd_eval(ev_trace, ev_demo, ev_threshold, ev_scenario, ev_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const FormatError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SimulationAbort& e) {
    std::cerr << "simulation aborted: " << e.what() << '\n';
    return kExitAbort;
  } catch (const BehindCameraError& e) {
    std::cerr << "simulation aborted: " << e.what() << '\n';
    return kExitAbort;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
