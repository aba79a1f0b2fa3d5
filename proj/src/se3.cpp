#include "ilvs/se3.hpp"

#include <cmath>

#include "ilvs/errors.hpp"

namespace ilvs {

namespace {
constexpr double kSmallAngle = 1e-8;
}

Pose Pose::from_quaternion(const Eigen::Quaterniond& q, const Vector3& t) {
  const double n = q.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw ConfigError("quaternion has zero or non-finite norm");
  }
  return {q.normalized().toRotationMatrix(), t};
}

Eigen::Quaterniond Pose::quaternion() const {
  Eigen::Quaterniond q(rotation);
  q.normalize();
  // canonical hemisphere so logs are stable
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return q;
}

Pose compose(const Pose& a, const Pose& b) {
  return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

Pose inverse(const Pose& p) {
  const Matrix3 rt = p.rotation.transpose();
  return {rt, -(rt * p.translation)};
}

Vector3 transform_point(const Pose& p, const Vector3& x) { return p.rotation * x + p.translation; }

Matrix3 skew(const Vector3& w) {
  Matrix3 s;
  // clang-format off
  s <<    0.0, -w.z(),  w.y(),
        w.z(),    0.0, -w.x(),
       -w.y(),  w.x(),    0.0;
  // clang-format on
  return s;
}

Matrix3 rot_x(double angle) { return Eigen::AngleAxisd(angle, Vector3::UnitX()).toRotationMatrix(); }
Matrix3 rot_y(double angle) { return Eigen::AngleAxisd(angle, Vector3::UnitY()).toRotationMatrix(); }
Matrix3 rot_z(double angle) { return Eigen::AngleAxisd(angle, Vector3::UnitZ()).toRotationMatrix(); }

Pose se3_exp(const Twist& xi) {
  const Vector3& w = xi.angular;
  const double theta = w.norm();
  const Matrix3 wx = skew(w);
  const Matrix3 wx2 = wx * wx;
  Matrix3 r;
  Matrix3 v;
  if (theta < kSmallAngle) {
    r = Matrix3::Identity() + wx + 0.5 * wx2;
    v = Matrix3::Identity() + 0.5 * wx + wx2 / 6.0;
  } else {
    const double t2 = theta * theta;
    const double a = std::sin(theta) / theta;
    const double b = (1.0 - std::cos(theta)) / t2;
    const double c = (theta - std::sin(theta)) / (t2 * theta);
    r = Matrix3::Identity() + a * wx + b * wx2;
    v = Matrix3::Identity() + b * wx + c * wx2;
  }
  return {r, v * xi.linear};
}

Pose integrate_twist(const Pose& p, const Twist& v, double dt) {
  if (dt < 0.0) throw ConfigError("integrate_twist: dt must be non-negative");
  if (dt == 0.0 || (v.linear.isZero(0.0) && v.angular.isZero(0.0))) return p;
  return compose(p, se3_exp({v.linear * dt, v.angular * dt}));
}

double orthonormality_defect(const Matrix3& r) {
  return (r.transpose() * r - Matrix3::Identity()).norm() + std::abs(r.determinant() - 1.0);
}

}  // namespace ilvs
