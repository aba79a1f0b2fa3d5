#pragma once

#include <Eigen/Core>

#include "ilvs/camera.hpp"
#include "ilvs/gmr.hpp"
#include "ilvs/se3.hpp"
#include "ilvs/types.hpp"
#include "ilvs/world.hpp"

namespace ilvs {

// Positive scalar gain λ (1/s).
class ControlGain {
 public:
  explicit ControlGain(double value);
  double value() const { return value_; }

 private:
  double value_;
};

// Point-feature interaction matrix, two rows per corner:
//   [−1/Z, 0, x/Z, xy, −(1+x²), y]
//   [0, −1/Z, y/Z, 1+y², −xy, −x]
InteractionMatrix interaction_matrix(const FeatureVector& features);

// Moore-Penrose pseudoinverse through SVD; singular values below
// rel_cutoff·σ_max are treated as zero.
Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& m, double rel_cutoff = 1e-10);

// L̂⁺ frozen at the goal configuration (all corners at the desired depth).
PseudoInverse constant_lhat_pinv(const Scenario& scenario);

VisualError visual_error(const FeatureVector& current, const FeatureVector& desired);

// v = −λ L̂⁺ e
Twist vs_control(const VisualError& e, ControlGain gain, const PseudoInverse& lp);

// Feature drift ∂e/∂t caused by a translating target, given the target's
// linear velocity in the camera frame. Rotation of the target is ignored.
Vector8 target_feature_rate(const FeatureVector& features, const Twist& target_in_camera);

// v = −λ L̂⁺ e − L̂⁺ ∂e/∂t
Twist tracking_control(const VisualError& e, ControlGain gain, const PseudoInverse& lp,
                       const Vector8& de_dt);

// h(t): 1 up to t_cut, then exp(−(t − t_cut)/τ).
double vanishing_gain(double t, double t_cut, double tau);

// v = −λ L̂⁺ e + h ρ
Twist reshaped_control(const VisualError& e, ControlGain gain, const PseudoInverse& lp,
                       const Twist& rho, double h);

// v = −λ L̂⁺ e + ρ̂(L̂⁺ e). The learned compensation is always active.
Twist ilvs_control(const VisualError& e, ControlGain gain, const PseudoInverse& lp,
                   const GmrRegressor& model);

// Same as ilvs_control, also reporting the compensation estimate used.
struct IlvsCommand {
  Twist twist;
  Vector6 rho_hat;
};
IlvsCommand ilvs_command(const VisualError& e, ControlGain gain, const PseudoInverse& lp,
                         const GmrRegressor& model);

}  // namespace ilvs
