#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ilvs/errors.hpp"
#include "ilvs/gmr.hpp"

namespace ilvs {

namespace {

// Floor the EM regularization guarantees on every covariance eigenvalue.
constexpr double kCovarianceFloor = 1e-8;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename Derived>
std::string vec_json(const Eigen::DenseBase<Derived>& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += num(v(i));
  }
  return s + "]";
}

std::string mat_json(const Eigen::MatrixXd& m, const std::string& indent) {
  std::string s = "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    s += r ? ",\n" + indent + " " : "";
    s += vec_json(m.row(r));
  }
  return s + "]";
}

Eigen::VectorXd read_vector(const nlohmann::json& j, std::size_t expected, const char* what) {
  if (!j.is_array() || j.size() != expected) {
    throw FormatError(std::string("model file: '") + what + "' has the wrong length");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(expected));
  for (std::size_t i = 0; i < expected; ++i) {
    if (!j[i].is_number()) throw FormatError(std::string("model file: non-numeric ") + what);
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd read_matrix(const nlohmann::json& j, std::size_t rows, std::size_t cols,
                            const char* what) {
  if (!j.is_array() || j.size() != rows) {
    throw FormatError(std::string("model file: '") + what + "' has the wrong row count");
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) m.row(static_cast<Eigen::Index>(r)) = read_vector(j[r], cols, what);
  return m;
}

}  // namespace

void save_model(const GmmModel& model, const std::string& path) {
  model.validate();
  std::ostringstream out;
  const int k = model.mixture.k();
  out << "{\n";
  out << "  \"k\": " << k << ",\n";
  out << "  \"dim_in\": " << model.dim_in << ",\n";
  out << "  \"dim_out\": " << model.dim_out << ",\n";
  out << "  \"weights\": " << vec_json(model.mixture.weights) << ",\n";
  out << "  \"means\": [";
  for (int i = 0; i < k; ++i) out << (i ? ",\n            " : "") << vec_json(model.mixture.means[i]);
  out << "],\n";
  out << "  \"covariances\": [";
  for (int i = 0; i < k; ++i) {
    out << (i ? ",\n    " : "\n    ") << mat_json(model.mixture.covariances[i], "    ");
  }
  out << "],\n";
  out << "  \"lambda\": " << num(model.lambda) << ",\n";
  out << "  \"lhat_pinv\": " << mat_json(model.lhat_pinv, "               ") << ",\n";
  out << "  \"seed\": " << model.seed << "\n";
  out << "}\n";

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open model file for writing: " + path);
  f << out.str();
  if (!f) throw std::runtime_error("failed writing model file: " + path);
}

GmmModel load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open model file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed model file " + path + ": " + e.what());
  }
  try {
    GmmModel m;
    const auto k = j.at("k").get<int>();
    m.dim_in = j.at("dim_in").get<int>();
    m.dim_out = j.at("dim_out").get<int>();
    if (k < 1 || m.dim_in < 1 || m.dim_out < 1) throw FormatError("model file: bad sizes");
    const auto dim = static_cast<std::size_t>(m.dim_in + m.dim_out);
    const auto kk = static_cast<std::size_t>(k);
    m.mixture.weights = read_vector(j.at("weights"), kk, "weights");
    const auto& means = j.at("means");
    const auto& covs = j.at("covariances");
    if (!means.is_array() || means.size() != kk || !covs.is_array() || covs.size() != kk) {
      throw FormatError("model file: means/covariances do not match k");
    }
    for (std::size_t i = 0; i < kk; ++i) {
      m.mixture.means.push_back(read_vector(means[i], dim, "means"));
      m.mixture.covariances.push_back(read_matrix(covs[i], dim, dim, "covariances"));
    }
    m.lambda = j.at("lambda").get<double>();
    const auto& lp = j.at("lhat_pinv");
    if (!lp.is_array()) throw FormatError("model file: lhat_pinv must be an array");
    if (!lp.empty()) {
      const std::size_t cols = lp[0].is_array() ? lp[0].size() : 0;
      m.lhat_pinv = read_matrix(lp, lp.size(), cols, "lhat_pinv");
    }
    m.seed = j.at("seed").get<std::uint64_t>();
    m.validate();
    m.mixture.validate(kCovarianceFloor);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed model file " + path + ": " + e.what());
  }
}

}  // namespace ilvs
