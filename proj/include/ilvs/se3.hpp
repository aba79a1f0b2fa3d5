#pragma once

#include <Eigen/Geometry>

#include "ilvs/types.hpp"

namespace ilvs {

// Rigid transform x ↦ R·x + t. Maps points from the child frame to the parent.
struct Pose {
  Matrix3 rotation = Matrix3::Identity();
  Vector3 translation = Vector3::Zero();

  static Pose identity() { return {}; }
  static Pose from_translation(const Vector3& t) { return {Matrix3::Identity(), t}; }
  // Quaternion is normalized before use.
  static Pose from_quaternion(const Eigen::Quaterniond& q, const Vector3& t);

  Eigen::Quaterniond quaternion() const;
};

// Spatial velocity. When used as a camera command it is expressed in the
// camera (body) frame.
struct Twist {
  Vector3 linear = Vector3::Zero();
  Vector3 angular = Vector3::Zero();

  static Twist from_vector(const Vector6& v) { return {v.head<3>(), v.tail<3>()}; }
  Vector6 vector() const {
    Vector6 v;
    v << linear, angular;
    return v;
  }
  bool is_finite() const { return linear.allFinite() && angular.allFinite(); }
};

Pose compose(const Pose& a, const Pose& b);
Pose inverse(const Pose& p);
Vector3 transform_point(const Pose& p, const Vector3& x);

Matrix3 skew(const Vector3& w);
Matrix3 rot_x(double angle);
Matrix3 rot_y(double angle);
Matrix3 rot_z(double angle);

// Closed-form SE(3) exponential of a twist scaled by unit time.
Pose se3_exp(const Twist& xi);

/// Moves `p` by the body-frame twist `v` held constant for `dt` seconds,
/// i.e. p · exp(v·dt). Exact for constant twists.
Pose integrate_twist(const Pose& p, const Twist& v, double dt);

// ‖RᵀR − I‖ (Frobenius) plus |det R − 1|.
double orthonormality_defect(const Matrix3& r);

}  // namespace ilvs
