#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace promind {

// End-effector pose: x, y, z in meters, then roll, pitch, yaw in radians.
using Pose6 = Eigen::Matrix<double, 6, 1>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec2 = Eigen::Vector2d;

inline constexpr int kPoseDims = 6;

// Smallest allowed trajectory interval. Keeps knot spans non-degenerate when
// displacement-based lower bounds collapse to zero.
inline constexpr double kMinInterval = 0.05;

// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

// Representative of `angle` (mod 2*pi) nearest to `reference`.
double unwrap_near(double reference, double angle);

// Linear-system solve failed or produced garbage; carries a condition estimate.
struct SolverError : std::runtime_error {
  SolverError(const std::string& what, double condition_estimate)
      : std::runtime_error(what), condition(condition_estimate) {}
  double condition;
};

// Optimization ended with no feasible individual; carries the best violation seen.
struct InfeasibleError : std::runtime_error {
  InfeasibleError(const std::string& what, double violation)
      : std::runtime_error(what), best_violation(violation) {}
  double best_violation;
};

}  // namespace promind
