#pragma once

#include <vector>

#include "promind/bspline.hpp"
#include "promind/types.hpp"

namespace promind {

// Boundary kinematic conditions at t = 0 and t = t_f. Defaults to rest-to-rest.
struct BoundaryConditions {
  Vec6 velocity_start = Vec6::Zero();
  Vec6 acceleration_start = Vec6::Zero();
  Vec6 jerk_start = Vec6::Zero();
  Vec6 velocity_end = Vec6::Zero();
  Vec6 acceleration_end = Vec6::Zero();
  Vec6 jerk_end = Vec6::Zero();
};

// Ordered waypoints the end-effector must pass through. Angles are wrapped to
// (-pi, pi] on the first waypoint and consecutive angles unwrapped to the
// nearest representative. Consecutive waypoints identical in all six
// coordinates are rejected unless allow_identical is set (their displacement
// contributes nothing to interval lower bounds, which then floor at the
// configured minimum interval).
class WaypointList {
 public:
  explicit WaypointList(std::vector<Pose6> points, bool allow_identical = false);

  int count() const { return static_cast<int>(points_.size()); }
  const Pose6& operator[](int g) const { return points_[static_cast<size_t>(g)]; }
  const std::vector<Pose6>& points() const { return points_; }

 private:
  std::vector<Pose6> points_;
};

// Time intervals between consecutive interpolation points, including the two
// virtual-point legs: W+1 strictly positive entries for W waypoints.
class IntervalVector {
 public:
  explicit IntervalVector(std::vector<double> intervals);

  int size() const { return static_cast<int>(h_.size()); }
  double operator[](int g) const { return h_[static_cast<size_t>(g)]; }
  const std::vector<double>& values() const { return h_; }
  double total() const;

 private:
  std::vector<double> h_;
};

// Clamped knot vector for the given intervals: degree+1 zeros, the cumulative
// sums of all but the last interval (the two virtual-point knots included),
// then degree+1 copies of t_f. For degree 5 this yields W+12 knots and W+6
// control points.
KnotVector build_knots(const IntervalVector& h, int degree = 5);

// Times at which each waypoint is attained: 0, the interior cumulative sums,
// t_f. Size equals h.size() - 1.
std::vector<double> waypoint_times(const IntervalVector& h);

// Square interpolation matrix of the per-dimension linear systems. Depends
// only on h, not on waypoint coordinates.
Eigen::MatrixXd interpolation_matrix(const IntervalVector& h);

// Solves the six per-dimension systems for the control points and returns the
// interpolating quintic trajectory. Requires h.size() == wps.count() + 1 and
// at least two waypoints. Throws SolverError with a condition estimate if the
// solve fails or the residual is not small.
BSplineBundle solve_trajectory(const WaypointList& wps, const IntervalVector& h,
                               const BoundaryConditions& bc = {});

struct TrajectorySample {
  double t;
  Vec6 pose;
  Vec6 velocity;
};

// Samples at 0, dt, 2*dt, ... with the final sample exactly at end_time().
std::vector<TrajectorySample> sample_trajectory(const BSplineBundle& traj, double dt);

}  // namespace promind
