#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "promind/types.hpp"

namespace promind {

// Clamped B-spline knot vector. All indices in this module are 0-based.
// Invariants: non-decreasing; first degree+1 and last degree+1 knots equal;
// interior knots strictly increasing (no degenerate interior spans).
class KnotVector {
 public:
  KnotVector(std::vector<double> knots, int degree);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(knots_.size()); }
  // Number of basis functions / control points this knot vector supports.
  int basis_count() const { return size() - degree_ - 1; }
  double front() const { return knots_.front(); }
  double back() const { return knots_.back(); }
  double operator[](int i) const { return knots_[static_cast<size_t>(i)]; }
  const std::vector<double>& values() const { return knots_; }

  // Span index l with knots[l] <= t < knots[l+1]; t == back() maps to the last
  // non-degenerate span. t outside [front(), back()] (beyond a small relative
  // slack, which is clamped) is a domain error.
  int span(double t) const;

  // Knot vector of the d-th derivative spline: d knots dropped at each end.
  KnotVector derivative_knots(int d) const;

 private:
  std::vector<double> knots_;
  int degree_;
};

// Single basis function N_{k,degree}(t) with the right-endpoint convention:
// the last basis function equals 1 at t == back(). k outside [0, basis_count())
// is a domain error.
double basis(const KnotVector& knots, int k, double t);

// All degree+1 basis values that can be nonzero at t, N_{span-degree..span},
// written to out[0..degree]. Returns the span index.
int basis_nonzero(const KnotVector& knots, double t, double* out);

// Control points of the d-th derivative spline. Rows are dimensions, columns
// are points; each derivative order has one column fewer.
Eigen::MatrixXd derivative_control_points(const Eigen::MatrixXd& points,
                                          const KnotVector& knots, int d);

// Six-dimensional clamped quintic B-spline trajectory over [0, end_time()].
// Derivative-stage control points (orders 1..3) are kept in sync with the
// position control points across mutation.
class BSplineBundle {
 public:
  static constexpr int kDegree = 5;
  static constexpr int kMaxDerivative = 3;

  using ControlMatrix = Eigen::Matrix<double, 6, Eigen::Dynamic>;

  BSplineBundle(KnotVector knots, ControlMatrix control_points);

  const KnotVector& knots() const { return stage_knots_[0]; }
  double start_time() const { return stage_knots_[0].front(); }
  double end_time() const { return stage_knots_[0].back(); }
  int control_count() const { return static_cast<int>(stage_points_[0].cols()); }
  const ControlMatrix& control_points() const { return stage_points_[0]; }

  // order 0 = pose, 1 = velocity, 2 = acceleration, 3 = jerk.
  Vec6 eval(double t, int order = 0) const;

  const ControlMatrix& derivative_points(int order) const;
  const KnotVector& derivative_knots(int order) const;

  // Adds (dx, dy) to the x/y rows of the chosen control points and rebuilds
  // the derivative stages once. Indices must be in range; displacements finite.
  void displace_xy(const std::vector<std::pair<int, Vec2>>& moves);

 private:
  void rebuild_derivatives();

  std::array<KnotVector, kMaxDerivative + 1> stage_knots_;
  std::array<ControlMatrix, kMaxDerivative + 1> stage_points_;
};

}  // namespace promind
