#include "promind/planner.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace promind {
namespace {

constexpr int kDegree = BSplineBundle::kDegree;

// Sparse difference stage as a dense matrix: maps points of the current stage
// to the next derivative's points. `u` is the current stage's knot vector.
Eigen::MatrixXd difference_stage(const std::vector<double>& u, int degree, int count) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(count - 1, count);
  for (int i = 0; i + 1 < count; ++i) {
    const double denom = u[static_cast<size_t>(i + degree + 1)] - u[static_cast<size_t>(i + 1)];
    s(i, i) = -degree / denom;
    s(i, i + 1) = degree / denom;
  }
  return s;
}

double condition_estimate(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const double smin = svd.singularValues().minCoeff();
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return svd.singularValues().maxCoeff() / smin;
}

}  // namespace

WaypointList::WaypointList(std::vector<Pose6> points, bool allow_identical)
    : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw std::invalid_argument("waypoints: at least two waypoints required");
  }
  for (const Pose6& p : points_) {
    if (!p.allFinite()) throw std::invalid_argument("waypoints: non-finite coordinate");
  }
  for (int d = 3; d < kPoseDims; ++d) points_[0](d) = wrap_angle(points_[0](d));
  for (size_t g = 1; g < points_.size(); ++g) {
    for (int d = 3; d < kPoseDims; ++d) {
      points_[g](d) = unwrap_near(points_[g - 1](d), points_[g](d));
    }
    if (!allow_identical && points_[g] == points_[g - 1]) {
      throw std::invalid_argument(
          "waypoints: consecutive waypoints identical in all coordinates "
          "(pass allow_identical to accept)");
    }
  }
}

IntervalVector::IntervalVector(std::vector<double> intervals) : h_(std::move(intervals)) {
  if (h_.size() < 3) {
    throw std::invalid_argument("intervals: need at least three entries (two waypoints)");
  }
  for (double v : h_) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("intervals: entries must be strictly positive and finite");
    }
  }
}

double IntervalVector::total() const {
  double s = 0.0;
  for (double v : h_) s += v;
  return s;
}

KnotVector build_knots(const IntervalVector& h, int degree) {
  const int legs = h.size();
  std::vector<double> knots;
  knots.reserve(static_cast<size_t>(legs - 1 + 2 * (degree + 1)));
  for (int i = 0; i <= degree; ++i) knots.push_back(0.0);
  double acc = 0.0;
  for (int g = 0; g + 1 < legs; ++g) {
    acc += h[g];
    knots.push_back(acc);
  }
  const double t_f = acc + h[legs - 1];
  for (int i = 0; i <= degree; ++i) knots.push_back(t_f);
  return KnotVector(std::move(knots), degree);
}

std::vector<double> waypoint_times(const IntervalVector& h) {
  const int w = h.size() - 1;
  std::vector<double> times(static_cast<size_t>(w));
  times[0] = 0.0;
  double acc = 0.0;
  for (int g = 1; g + 1 < w; ++g) {
    acc = (g == 1) ? h[0] + h[1] : acc + h[g];
    times[static_cast<size_t>(g)] = acc;
  }
  times[static_cast<size_t>(w - 1)] = h.total();
  return times;
}

Eigen::MatrixXd interpolation_matrix(const IntervalVector& h) {
  const int w = h.size() - 1;
  const int n = w + kDegree + 1;  // control point count
  const KnotVector knots = build_knots(h);

  std::vector<double> u = knots.values();
  Eigen::MatrixXd d1 = difference_stage(u, kDegree, n);
  u.erase(u.begin());
  u.pop_back();
  Eigen::MatrixXd d2 = difference_stage(u, kDegree - 1, n - 1) * d1;
  u.erase(u.begin());
  u.pop_back();
  Eigen::MatrixXd d3 = difference_stage(u, kDegree - 2, n - 2) * d2;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  a(0, 0) = 1.0;  // first waypoint pins the first control point
  a.row(1) = d1.row(0);
  a.row(2) = d2.row(0);
  a.row(3) = d3.row(0);
  const std::vector<double> times = waypoint_times(h);
  double values[kDegree + 1];
  for (int g = 1; g + 1 < w; ++g) {
    const int l = basis_nonzero(knots, times[static_cast<size_t>(g)], values);
    for (int r = 0; r <= kDegree; ++r) {
      a(3 + g, l - kDegree + r) = values[r];
    }
  }
  a.row(n - 4) = d3.row(d3.rows() - 1);
  a.row(n - 3) = d2.row(d2.rows() - 1);
  a.row(n - 2) = d1.row(d1.rows() - 1);
  a(n - 1, n - 1) = 1.0;  // last waypoint pins the last control point
  return a;
}

BSplineBundle solve_trajectory(const WaypointList& wps, const IntervalVector& h,
                               const BoundaryConditions& bc) {
  const int w = wps.count();
  if (h.size() != w + 1) {
    throw std::invalid_argument("solve: interval count must be waypoint count + 1");
  }
  const int n = w + kDegree + 1;
  const Eigen::MatrixXd a = interpolation_matrix(h);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);

  BSplineBundle::ControlMatrix control(6, n);
  for (int dim = 0; dim < kPoseDims; ++dim) {
    Eigen::VectorXd b(n);
    b(0) = wps[0](dim);
    b(1) = bc.velocity_start(dim);
    b(2) = bc.acceleration_start(dim);
    b(3) = bc.jerk_start(dim);
    for (int g = 1; g + 1 < w; ++g) b(3 + g) = wps[g](dim);
    b(n - 4) = bc.jerk_end(dim);
    b(n - 3) = bc.acceleration_end(dim);
    b(n - 2) = bc.velocity_end(dim);
    b(n - 1) = wps[w - 1](dim);

    const Eigen::VectorXd theta = lu.solve(b);
    const double residual = (a * theta - b).lpNorm<Eigen::Infinity>();
    const double scale = 1.0 + b.lpNorm<Eigen::Infinity>();
    if (!theta.allFinite() || residual > 1e-7 * scale) {
      throw SolverError("solve: interpolation system is near-singular", condition_estimate(a));
    }
    control.row(dim) = theta.transpose();
  }
  return BSplineBundle(build_knots(h), std::move(control));
}

std::vector<TrajectorySample> sample_trajectory(const BSplineBundle& traj, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::domain_error("sample: dt must be strictly positive");
  }
  const double t_f = traj.end_time();
  std::vector<TrajectorySample> samples;
  samples.reserve(static_cast<size_t>(t_f / dt) + 2);
  const double cutoff = t_f - 1e-12 * std::max(1.0, t_f);
  for (long i = 0; static_cast<double>(i) * dt < cutoff; ++i) {
    const double t = static_cast<double>(i) * dt;
    samples.push_back({t, traj.eval(t, 0), traj.eval(t, 1)});
  }
  samples.push_back({t_f, traj.eval(t_f, 0), traj.eval(t_f, 1)});
  return samples;
}

}  // namespace promind
