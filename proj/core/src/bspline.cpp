#include "promind/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace promind {
namespace {

double relative_slack(const KnotVector& knots) {
  return 1e-9 * std::max(1.0, std::abs(knots.back() - knots.front()));
}

}  // namespace

KnotVector::KnotVector(std::vector<double> knots, int degree)
    : knots_(std::move(knots)), degree_(degree) {
  if (degree_ < 0) throw std::invalid_argument("knot vector: negative degree");
  const int m = static_cast<int>(knots_.size());
  if (m < 2 * (degree_ + 1)) {
    throw std::invalid_argument("knot vector: too few knots for degree");
  }
  for (int i = 0; i + 1 < m; ++i) {
    if (!(knots_[i] <= knots_[i + 1]) || !std::isfinite(knots_[i + 1])) {
      throw std::invalid_argument("knot vector: not non-decreasing");
    }
  }
  for (int i = 1; i <= degree_; ++i) {
    if (knots_[i] != knots_[0] || knots_[m - 1 - i] != knots_[m - 1]) {
      throw std::invalid_argument("knot vector: ends not clamped to multiplicity degree+1");
    }
  }
  for (int i = degree_; i < m - degree_ - 1; ++i) {
    if (!(knots_[i] < knots_[i + 1])) {
      throw std::invalid_argument("knot vector: degenerate interior span");
    }
  }
}

int KnotVector::span(double t) const {
  const double slack = relative_slack(*this);
  if (t < front() - slack || t > back() + slack) {
    throw std::domain_error("knot span: parameter outside knot range");
  }
  t = std::clamp(t, front(), back());
  const int n = basis_count() - 1;
  if (t >= knots_[static_cast<size_t>(n + 1)]) return n;
  int lo = degree_, hi = n + 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (t < knots_[static_cast<size_t>(mid)]) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return lo;
}

KnotVector KnotVector::derivative_knots(int d) const {
  if (d < 0 || d > degree_) throw std::domain_error("derivative knots: order out of range");
  std::vector<double> sub(knots_.begin() + d, knots_.end() - d);
  return KnotVector(std::move(sub), degree_ - d);
}

int basis_nonzero(const KnotVector& knots, double t, double* out) {
  const int p = knots.degree();
  const int l = knots.span(t);
  t = std::clamp(t, knots.front(), knots.back());
  // Triangular scheme: numerically stable, no 0/0 cases on valid spans.
  std::vector<double> left(static_cast<size_t>(p) + 1), right(static_cast<size_t>(p) + 1);
  out[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[static_cast<size_t>(j)] = t - knots[l + 1 - j];
    right[static_cast<size_t>(j)] = knots[l + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = out[r] / (right[static_cast<size_t>(r) + 1] + left[static_cast<size_t>(j - r)]);
      out[r] = saved + right[static_cast<size_t>(r) + 1] * temp;
      saved = left[static_cast<size_t>(j - r)] * temp;
    }
    out[j] = saved;
  }
  return l;
}

double basis(const KnotVector& knots, int k, double t) {
  if (k < 0 || k >= knots.basis_count()) {
    throw std::domain_error("basis: function index out of range");
  }
  const int p = knots.degree();
  std::vector<double> values(static_cast<size_t>(p) + 1);
  const int l = basis_nonzero(knots, t, values.data());
  if (k < l - p || k > l) return 0.0;
  return values[static_cast<size_t>(k - (l - p))];
}

Eigen::MatrixXd derivative_control_points(const Eigen::MatrixXd& points,
                                          const KnotVector& knots, int d) {
  if (d < 0 || d > knots.degree()) {
    throw std::domain_error("derivative control points: order out of range");
  }
  if (points.cols() != knots.basis_count()) {
    throw std::invalid_argument("derivative control points: point count does not match knots");
  }
  Eigen::MatrixXd current = points;
  std::vector<double> u = knots.values();
  int degree = knots.degree();
  for (int step = 0; step < d; ++step) {
    const int count = static_cast<int>(current.cols());
    Eigen::MatrixXd next(current.rows(), count - 1);
    for (int i = 0; i + 1 < count; ++i) {
      const double denom = u[static_cast<size_t>(i + degree + 1)] - u[static_cast<size_t>(i + 1)];
      next.col(i) = degree * (current.col(i + 1) - current.col(i)) / denom;
    }
    current = std::move(next);
    u.erase(u.begin());
    u.pop_back();
    --degree;
  }
  return current;
}

BSplineBundle::BSplineBundle(KnotVector knots, ControlMatrix control_points)
    : stage_knots_{knots, knots.derivative_knots(1), knots.derivative_knots(2),
                   knots.derivative_knots(3)} {
  if (knots.degree() != kDegree) {
    throw std::invalid_argument("trajectory bundle: knot vector degree must be 5");
  }
  if (control_points.cols() != knots.basis_count()) {
    throw std::invalid_argument("trajectory bundle: control point count does not match knots");
  }
  if (!control_points.allFinite()) {
    throw std::invalid_argument("trajectory bundle: non-finite control points");
  }
  stage_points_[0] = std::move(control_points);
  rebuild_derivatives();
}

void BSplineBundle::rebuild_derivatives() {
  for (int d = 1; d <= kMaxDerivative; ++d) {
    stage_points_[static_cast<size_t>(d)] =
        derivative_control_points(stage_points_[static_cast<size_t>(d) - 1],
                                  stage_knots_[static_cast<size_t>(d) - 1], 1);
  }
}

Vec6 BSplineBundle::eval(double t, int order) const {
  if (order < 0 || order > kMaxDerivative) {
    throw std::domain_error("trajectory eval: derivative order out of range");
  }
  const KnotVector& kv = stage_knots_[static_cast<size_t>(order)];
  double values[kDegree + 1];
  const int l = basis_nonzero(kv, t, values);
  const int q = kv.degree();
  Vec6 result = Vec6::Zero();
  const ControlMatrix& pts = stage_points_[static_cast<size_t>(order)];
  for (int r = 0; r <= q; ++r) {
    result += values[r] * pts.col(l - q + r);
  }
  return result;
}

const BSplineBundle::ControlMatrix& BSplineBundle::derivative_points(int order) const {
  if (order < 0 || order > kMaxDerivative) {
    throw std::domain_error("trajectory derivative points: order out of range");
  }
  return stage_points_[static_cast<size_t>(order)];
}

const KnotVector& BSplineBundle::derivative_knots(int order) const {
  if (order < 0 || order > kMaxDerivative) {
    throw std::domain_error("trajectory derivative knots: order out of range");
  }
  return stage_knots_[static_cast<size_t>(order)];
}

void BSplineBundle::displace_xy(const std::vector<std::pair<int, Vec2>>& moves) {
  for (const auto& [index, delta] : moves) {
    if (index < 0 || index >= control_count()) {
      throw std::domain_error("trajectory displace: control point index out of range");
    }
    if (!delta.allFinite()) {
      throw std::invalid_argument("trajectory displace: non-finite displacement");
    }
  }
  for (const auto& [index, delta] : moves) {
    stage_points_[0](0, index) += delta.x();
    stage_points_[0](1, index) += delta.y();
  }
  rebuild_derivatives();
}

}  // namespace promind
