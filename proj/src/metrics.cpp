#include "ilvs/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "ilvs/errors.hpp"

namespace ilvs {

double pixel_error(const VisualError& e, const CameraIntrinsics& intr) {
  double sum = 0.0;
  for (int i = 0; i < kNumCorners; ++i) {
    sum += std::hypot(intr.fx * e[2 * i], intr.fy * e[2 * i + 1]);
  }
  return sum / kNumCorners;
}

std::vector<double> pixel_errors(const Trace& trace, const CameraIntrinsics& intr) {
  std::vector<double> out;
  out.reserve(trace.size());
  for (const auto& s : trace.samples) out.push_back(pixel_error(s.e, intr));
  return out;
}

std::vector<double> position_errors(const Trace& trace) {
  std::vector<double> out;
  out.reserve(trace.size());
  for (const auto& s : trace.samples) out.push_back((s.camera_position - s.goal_position).norm());
  return out;
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd r;
  if (values.empty()) return r;
  double sum = 0.0;
  for (double v : values) sum += v;
  r.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - r.mean) * (v - r.mean);
  r.std = std::sqrt(ss / static_cast<double>(values.size()));
  return r;
}

ReplayRmse rmse_vs_demo(const Trace& trace, const Demonstration& demo) {
  if (!trace.empty() && !demo.empty() &&
      std::abs(trace.dt - demo.dt) > 1e-9 * std::max(trace.dt, demo.dt)) {
    throw ConfigError("rmse_vs_demo: trace and demonstration use different time steps");
  }
  const std::size_t n = std::min(trace.size(), demo.size());
  ReplayRmse r;
  r.samples = n;
  std::vector<double> px(8, 0.0), pos(3, 0.0), vel(3, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const Sample& a = trace.samples[k];
    const Sample& b = demo.samples[k];
    for (int i = 0; i < 8; ++i) px[i] += std::pow(a.pixels[i] - b.pixels[i], 2);
    for (int i = 0; i < 3; ++i) {
      pos[i] += std::pow(1e3 * (a.camera_position[i] - b.camera_position[i]), 2);
      vel[i] += std::pow(1e3 * (a.v.linear[i] - b.v.linear[i]), 2);
    }
  }
  auto finish = [n](std::vector<double>& acc) {
    for (double& v : acc) v = n ? std::sqrt(v / static_cast<double>(n)) : 0.0;
  };
  finish(px);
  finish(pos);
  finish(vel);
  r.feature_px = px;
  r.position_mm = pos;
  r.velocity_mmps = vel;
  r.features = mean_std(px);
  r.position = mean_std(pos);
  r.velocity = mean_std(vel);
  return r;
}

TrackingPhase tracking_phase_metrics(const Trace& trace, const CameraIntrinsics& intr,
                                     double threshold_px) {
  TrackingPhase tp;
  const auto px = pixel_errors(trace, intr);
  const auto pos = position_errors(trace);
  std::size_t start = px.size();
  for (std::size_t k = 0; k < px.size(); ++k) {
    if (px[k] < threshold_px) {
      start = k;
      break;
    }
  }
  if (start == px.size()) return tp;
  tp.entered = true;
  tp.entry_time = trace.samples[start].t;
  std::vector<double> phase_px(px.begin() + static_cast<std::ptrdiff_t>(start), px.end());
  std::vector<double> phase_mm;
  for (std::size_t k = start; k < pos.size(); ++k) phase_mm.push_back(1e3 * pos[k]);
  tp.samples = phase_px.size();
  tp.pixel = mean_std(phase_px);
  tp.position_mm = mean_std(phase_mm);
  return tp;
}

double steady_state_error(const Trace& trace, const CameraIntrinsics& intr, double fraction) {
  if (trace.empty()) return 0.0;
  const auto px = pixel_errors(trace, intr);
  const auto n = px.size();
  const auto window = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n))));
  double sum = 0.0;
  for (std::size_t k = n - window; k < n; ++k) sum += px[k];
  return sum / static_cast<double>(window);
}

Metrics compute_metrics(const Trace& trace, const CameraIntrinsics& intr, double threshold_px,
                        const Demonstration* demo) {
  Metrics m;
  m.threshold_px = threshold_px;
  m.samples = trace.size();
  if (trace.empty()) return m;
  m.tracking = tracking_phase_metrics(trace, intr, threshold_px);
  if (m.tracking.entered) m.convergence_time_to_threshold = m.tracking.entry_time;
  m.steady_state_window_err = steady_state_error(trace, intr);
  m.final_pixel_error = pixel_error(trace.samples.back().e, intr);
  if (demo) m.replay = rmse_vs_demo(trace, *demo);
  return m;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string arr(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s + "]";
}

}  // namespace

std::string metrics_json(const Metrics& m) {
  if (m.samples == 0) return "{}\n";
  std::string s = "{\n";
  s += "  \"samples\": " + std::to_string(m.samples) + ",\n";
  s += "  \"threshold_px\": " + num(m.threshold_px) + ",\n";
  s += "  \"final_pixel_error_px\": " + num(m.final_pixel_error) + ",\n";
  s += "  \"steady_state_window_err_px\": " + num(m.steady_state_window_err) + ",\n";
  s += "  \"convergence_time_to_5px\": " +
       (m.convergence_time_to_threshold ? num(*m.convergence_time_to_threshold) : "null") + ",\n";
  s += "  \"tracking_phase_entered\": " + std::string(m.tracking.entered ? "true" : "false") + ",\n";
  if (m.tracking.entered) {
    s += "  \"steady_state_mean_err\": " + num(m.tracking.pixel.mean) + ",\n";
    s += "  \"steady_state_std_err\": " + num(m.tracking.pixel.std) + ",\n";
    s += "  \"tracking_position_mean_mm\": " + num(m.tracking.position_mm.mean) + ",\n";
    s += "  \"tracking_position_std_mm\": " + num(m.tracking.position_mm.std) + ",\n";
  } else {
    s += "  \"steady_state_mean_err\": null,\n  \"steady_state_std_err\": null,\n";
    s += "  \"tracking_position_mean_mm\": null,\n  \"tracking_position_std_mm\": null,\n";
  }
  if (m.replay) {
    const auto& r = *m.replay;
    s += "  \"rmse_features\": " + num(r.features.mean) + ",\n";
    s += "  \"rmse_features_std\": " + num(r.features.std) + ",\n";
    s += "  \"rmse_position\": " + num(r.position.mean) + ",\n";
    s += "  \"rmse_position_std\": " + num(r.position.std) + ",\n";
    s += "  \"rmse_velocity\": " + num(r.velocity.mean) + ",\n";
    s += "  \"rmse_velocity_std\": " + num(r.velocity.std) + ",\n";
    s += "  \"rmse_features_per_coordinate\": " + arr(r.feature_px) + ",\n";
    s += "  \"rmse_position_per_axis\": " + arr(r.position_mm) + ",\n";
    s += "  \"rmse_velocity_per_axis\": " + arr(r.velocity_mmps) + ",\n";
  }
  s += "  \"units\": {\"features\": \"px\", \"position\": \"mm\", \"velocity\": \"mm/s\"}\n";
  s += "}\n";
  return s;
}

}  // namespace ilvs
