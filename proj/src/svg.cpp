#include "ilvs/svg.hpp"

#include <algorithm>
#include <cstdio>

#include "ilvs/metrics.hpp"

namespace ilvs {

namespace {

const char* kCornerColors[kNumCorners] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string polyline(const std::vector<std::pair<double, double>>& pts, const std::string& style) {
  std::string s = "<polyline fill=\"none\" " + style + " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    s += (i ? " " : "") + fmt(pts[i].first) + "," + fmt(pts[i].second);
  }
  return s + "\"/>\n";
}

std::string header(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(w) + "\" height=\"" + fmt(h) +
         "\" viewBox=\"0 0 " + fmt(w) + " " + fmt(h) + "\">\n";
}

}  // namespace

std::string image_plane_svg(const Trace& trace, const CameraIntrinsics& intr,
                            const Vector8& desired_pixels,
                            const std::vector<const Trace*>& references) {
  std::string s = header(intr.width, intr.height);
  s += "<rect x=\"0\" y=\"0\" width=\"" + fmt(intr.width) + "\" height=\"" + fmt(intr.height) +
       "\" fill=\"white\" stroke=\"black\"/>\n";
  s += "<g class=\"references\">\n";
  for (const Trace* ref : references) {
    for (int c = 0; c < kNumCorners; ++c) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& smp : ref->samples) pts.emplace_back(smp.pixels[2 * c], smp.pixels[2 * c + 1]);
      s += "<path class=\"reference\" fill=\"none\" stroke=\"black\" stroke-dasharray=\"2,4\" d=\"";
      for (std::size_t i = 0; i < pts.size(); ++i) {
        s += (i ? " L" : "M") + fmt(pts[i].first) + "," + fmt(pts[i].second);
      }
      s += "\"/>\n";
    }
  }
  s += "</g>\n";
  for (int c = 0; c < kNumCorners; ++c) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& smp : trace.samples) pts.emplace_back(smp.pixels[2 * c], smp.pixels[2 * c + 1]);
    s += polyline(pts, std::string("class=\"feature\" stroke=\"") + kCornerColors[c] +
                           "\" stroke-width=\"2\"");
  }
  if (!trace.empty()) {
    const auto& first = trace.samples.front().pixels;
    for (int c = 0; c < kNumCorners; ++c) {
      s += "<circle class=\"start\" cx=\"" + fmt(first[2 * c]) + "\" cy=\"" + fmt(first[2 * c + 1]) +
           "\" r=\"8\" fill=\"red\"/>\n";
    }
  }
  for (int c = 0; c < kNumCorners; ++c) {
    const double x = desired_pixels[2 * c], y = desired_pixels[2 * c + 1];
    s += "<path class=\"goal\" stroke=\"green\" stroke-width=\"3\" d=\"M" + fmt(x - 10) + "," +
         fmt(y - 10) + " L" + fmt(x + 10) + "," + fmt(y + 10) + " M" + fmt(x - 10) + "," +
         fmt(y + 10) + " L" + fmt(x + 10) + "," + fmt(y - 10) + "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string error_vs_time_svg(const Trace& trace, const CameraIntrinsics& intr) {
  const double w = 800.0, h = 400.0, margin = 40.0;
  std::string s = header(w, h);
  s += "<rect x=\"0\" y=\"0\" width=\"" + fmt(w) + "\" height=\"" + fmt(h) + "\" fill=\"white\"/>\n";
  if (trace.empty()) return s + "</svg>\n";
  std::vector<std::vector<double>> corner(kNumCorners);
  double max_err = 1e-9;
  for (const auto& smp : trace.samples) {
    for (int c = 0; c < kNumCorners; ++c) {
      const double err = std::hypot(intr.fx * smp.e[2 * c], intr.fy * smp.e[2 * c + 1]);
      corner[c].push_back(err);
      max_err = std::max(max_err, err);
    }
  }
  const double t0 = trace.samples.front().t;
  const double t1 = std::max(trace.samples.back().t, t0 + 1e-9);
  auto to_xy = [&](double t, double err) {
    return std::make_pair(margin + (t - t0) / (t1 - t0) * (w - 2 * margin),
                          h - margin - err / max_err * (h - 2 * margin));
  };
  for (int c = 0; c < kNumCorners; ++c) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < trace.size(); ++k) pts.push_back(to_xy(trace.samples[k].t, corner[c][k]));
    s += polyline(pts, "class=\"corner-error\" stroke=\"#4a7bd0\" stroke-width=\"1\"");
  }
  std::vector<std::pair<double, double>> avg;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    avg.push_back(to_xy(trace.samples[k].t, pixel_error(trace.samples[k].e, intr)));
  }
  s += polyline(avg, "class=\"mean-error\" stroke=\"black\" stroke-width=\"2\"");
  s += "<text x=\"" + fmt(margin) + "\" y=\"" + fmt(margin - 10) + "\" font-size=\"12\">max " +
       fmt(max_err) + " px</text>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace ilvs
