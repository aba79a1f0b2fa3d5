#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ilvs/errors.hpp"
#include "ilvs/trace.hpp"

namespace ilvs {

namespace {

constexpr int kBaseColumns = 30;
constexpr int kAllColumns = kBaseColumns + 6 + 3 + 1 + 8;

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw FormatError("trace CSV line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

void put(std::string& row, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  if (!row.empty()) row += ',';
  row += buf;
}

}  // namespace

void check_uniform_time(const Trace& trace, double rel_tol) {
  const auto& s = trace.samples;
  for (std::size_t n = 1; n < s.size(); ++n) {
    const double step = s[n].t - s[n - 1].t;
    if (!(step > 0.0) || std::abs(step - trace.dt) > rel_tol * std::max(1.0, trace.dt) + 1e-12) {
      throw FormatError("trace timestamps are not uniformly spaced at dt");
    }
  }
}

std::string trace_csv_header() {
  std::string h = "t";
  for (int i = 0; i < 8; ++i) h += ",e" + std::to_string(i);
  h += ",vx,vy,vz,wx,wy,wz";
  for (int i = 0; i < 4; ++i) h += ",u" + std::to_string(i) + ",v" + std::to_string(i);
  h += ",px,py,pz,qw,qx,qy,qz";
  for (int i = 0; i < 6; ++i) h += ",r" + std::to_string(i);
  h += ",gx,gy,gz,oov";
  for (int i = 0; i < 8; ++i) h += ",f" + std::to_string(i);
  return h;
}

void write_trace_csv(const Trace& trace, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open trace file for writing: " + path);
  f << trace_csv_header() << '\n';
  for (const Sample& s : trace.samples) {
    std::string row;
    put(row, s.t);
    for (int i = 0; i < 8; ++i) put(row, s.e[i]);
    for (int i = 0; i < 3; ++i) put(row, s.v.linear[i]);
    for (int i = 0; i < 3; ++i) put(row, s.v.angular[i]);
    for (int i = 0; i < 8; ++i) put(row, s.pixels[i]);
    for (int i = 0; i < 3; ++i) put(row, s.camera_position[i]);
    put(row, s.camera_orientation.w());
    put(row, s.camera_orientation.x());
    put(row, s.camera_orientation.y());
    put(row, s.camera_orientation.z());
    for (int i = 0; i < 6; ++i) put(row, s.rho_hat[i]);
    for (int i = 0; i < 3; ++i) put(row, s.goal_position[i]);
    row += s.out_of_view ? ",1" : ",0";
    for (int i = 0; i < 8; ++i) put(row, s.feature_rate[i]);
    f << row << '\n';
  }
  if (!f) throw std::runtime_error("failed writing trace file: " + path);
}

Trace read_trace_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open trace file: " + path);
  std::string line;
  if (!std::getline(f, line)) throw FormatError("trace file is empty: " + path);
  const auto header = split(line);
  const std::string full = trace_csv_header();
  const auto full_cols = split(full);
  const bool extended = static_cast<int>(header.size()) == kAllColumns;
  if (!extended && static_cast<int>(header.size()) != kBaseColumns) {
    throw FormatError("trace file has an unexpected header: " + path);
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] != full_cols[i]) throw FormatError("trace file header mismatch at '" + header[i] + "'");
  }

  Trace trace;
  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw FormatError("trace CSV line " + std::to_string(line_no) + " has " +
                        std::to_string(cells.size()) + " columns");
    }
    std::size_t c = 0;
    auto next = [&] { return parse_number(cells[c++], line_no); };
    Sample s;
    s.t = next();
    for (int i = 0; i < 8; ++i) s.e[i] = next();
    for (int i = 0; i < 3; ++i) s.v.linear[i] = next();
    for (int i = 0; i < 3; ++i) s.v.angular[i] = next();
    for (int i = 0; i < 8; ++i) s.pixels[i] = next();
    for (int i = 0; i < 3; ++i) s.camera_position[i] = next();
    const double qw = next(), qx = next(), qy = next(), qz = next();
    s.camera_orientation = Eigen::Quaterniond(qw, qx, qy, qz);
    if (extended) {
      for (int i = 0; i < 6; ++i) s.rho_hat[i] = next();
      for (int i = 0; i < 3; ++i) s.goal_position[i] = next();
      s.out_of_view = next() != 0.0;
      for (int i = 0; i < 8; ++i) s.feature_rate[i] = next();
    }
    trace.samples.push_back(s);
  }
  if (trace.samples.size() >= 2) {
    trace.dt = trace.samples[1].t - trace.samples[0].t;
    check_uniform_time(trace);
  }
  return trace;
}

}  // namespace ilvs
