#pragma once

#include <Eigen/Core>

namespace ilvs {

using Vector3 = Eigen::Vector3d;
using Vector6 = Eigen::Matrix<double, 6, 1>;
using Vector8 = Eigen::Matrix<double, 8, 1>;
using Matrix3 = Eigen::Matrix3d;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

// ė = L·v for the four stacked marker corners.
using InteractionMatrix = Eigen::Matrix<double, 8, 6>;
// Constant approximation of L⁺ used by every controller.
using PseudoInverse = Eigen::Matrix<double, 6, 8>;

// Current features minus desired features, normalized image coordinates.
using VisualError = Vector8;

inline constexpr int kFeatureDim = 8;
inline constexpr int kNumCorners = 4;

}  // namespace ilvs
