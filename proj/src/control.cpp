#include "ilvs/control.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "ilvs/errors.hpp"

namespace ilvs {

ControlGain::ControlGain(double value) : value_(value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw ConfigError("control gain must be positive");
}

InteractionMatrix interaction_matrix(const FeatureVector& f) {
  InteractionMatrix l;
  for (int i = 0; i < kNumCorners; ++i) {
    const double x = f.x(i);
    const double y = f.y(i);
    const double z = f.depth[i];
    if (!(z > 0.0)) throw ConfigError("interaction_matrix: depth must be positive");
    const double iz = 1.0 / z;
    l.row(2 * i) << -iz, 0.0, x * iz, x * y, -(1.0 + x * x), y;
    l.row(2 * i + 1) << 0.0, -iz, y * iz, 1.0 + y * y, -x * y, -x;
  }
  return l;
}

Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& m, double rel_cutoff) {
  if (m.size() == 0) return Eigen::MatrixXd::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = rel_cutoff * (s.size() ? s[0] : 0.0);
  Eigen::VectorXd s_inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > cutoff && s[i] > 0.0) s_inv[i] = 1.0 / s[i];
  }
  return svd.matrixV() * s_inv.asDiagonal() * svd.matrixU().transpose();
}

PseudoInverse constant_lhat_pinv(const Scenario& scenario) {
  return pseudoinverse(interaction_matrix(desired_features(scenario)));
}

VisualError visual_error(const FeatureVector& current, const FeatureVector& desired) {
  return current.normalized - desired.normalized;
}

Twist vs_control(const VisualError& e, ControlGain gain, const PseudoInverse& lp) {
  return Twist::from_vector(-gain.value() * (lp * e));
}

Vector8 target_feature_rate(const FeatureVector& f, const Twist& target_in_camera) {
  const Vector3& vt = target_in_camera.linear;
  Vector8 rate;
  for (int i = 0; i < kNumCorners; ++i) {
    const double z = f.depth[i];
    if (!(z > 0.0)) throw ConfigError("target_feature_rate: depth must be positive");
    rate[2 * i] = (vt.x() - f.x(i) * vt.z()) / z;
    rate[2 * i + 1] = (vt.y() - f.y(i) * vt.z()) / z;
  }
  return rate;
}

Twist tracking_control(const VisualError& e, ControlGain gain, const PseudoInverse& lp,
                       const Vector8& de_dt) {
  return Twist::from_vector(-gain.value() * (lp * e) - lp * de_dt);
}

double vanishing_gain(double t, double t_cut, double tau) {
  if (!(tau > 0.0)) throw ConfigError("vanishing_gain: tau must be positive");
  if (t <= t_cut) return 1.0;
  return std::exp(-(t - t_cut) / tau);
}

Twist reshaped_control(const VisualError& e, ControlGain gain, const PseudoInverse& lp,
                       const Twist& rho, double h) {
  return Twist::from_vector(-gain.value() * (lp * e) + h * rho.vector());
}

IlvsCommand ilvs_command(const VisualError& e, ControlGain gain, const PseudoInverse& lp,
                         const GmrRegressor& model) {
  if (model.dim_in() != 6 || model.dim_out() != 6) {
    throw ConfigError("ILVS model must map 6-D inputs to 6-D outputs");
  }
  const Vector6 eps = lp * e;
  const Vector6 rho = model.predict(eps);
  return {Twist::from_vector(-gain.value() * eps + rho), rho};
}

Twist ilvs_control(const VisualError& e, ControlGain gain, const PseudoInverse& lp,
                   const GmrRegressor& model) {
  return ilvs_command(e, gain, lp, model).twist;
}

}  // namespace ilvs
