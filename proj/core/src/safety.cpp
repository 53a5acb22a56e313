#include "promind/safety.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "promind/log.hpp"

namespace promind {
namespace {

Vec2 safe_direction(const Vec2& v, const Vec2& fallback) {
  const double n = v.norm();
  if (n > 1e-12) return v / n;
  const double fn = fallback.norm();
  if (fn > 1e-12) return fallback / fn;
  return Vec2(1.0, 0.0);
}

}  // namespace

void SafetyThresholds::validate() const {
  if (!(collision_free > 0.0) || !(collision_free < conservative) ||
      !(conservative < social))
    throw std::invalid_argument("safety: need 0 < collision_free < conservative < social");
  if (!(self_collision > 0.0) || !(reach_max > 0.0))
    throw std::invalid_argument("safety: radii must be strictly positive");
  if (!(beta_threshold > 0.0) || !(beta_threshold < M_PI))
    throw std::invalid_argument("safety: beta threshold must lie in (0, pi)");
}

SafetyZones scale_zones(double attention, double effort, const SafetyThresholds& th) {
  th.validate();
  const double a = std::clamp(attention, 0.0, 1.0);
  const double e = std::clamp(effort, 0.0, 1.0);
  SafetyZones zones;
  zones.physical = th.conservative - a * (th.conservative - th.collision_free);
  zones.cognitive = std::max(zones.physical, th.conservative + e * (th.social - th.conservative));
  return zones;
}

MorphOutcome morph_path(BSplineBundle& traj, double t_now, const Vec2& human_xy,
                        const SafetyZones& zones, const SafetyThresholds& th,
                        const Vec2& base_xy, double rate_limit) {
  th.validate();
  if (!(rate_limit > 0.0)) throw std::invalid_argument("morph: rate limit must be positive");

  const int span = traj.knots().span(t_now);
  const int first = span + 1;
  const int last = traj.control_count() - 5;  // keep the trailing 4 points
  MorphOutcome outcome;
  if (first > last) return outcome;

  std::vector<std::pair<int, Vec2>> moves;
  for (int l = first; l <= last; ++l) {
    const Vec2 point(traj.control_points()(0, l), traj.control_points()(1, l));
    Vec2 target = point;

    const Vec2 from_human = point - human_xy;
    const double d = from_human.norm();
    if (d < zones.cognitive) {
      const Vec2 away = safe_direction(from_human, point - base_xy);
      target = point + (zones.cognitive - d) * away;
    }

    const Vec2 from_base = target - base_xy;
    const double s = from_base.norm();
    if (s < th.self_collision) {
      const Vec2 out = safe_direction(from_base, target - human_xy);
      target += (th.self_collision - s) * out;
    }

    const Vec2 reach = target - base_xy;
    if (reach.norm() > th.reach_max) target = base_xy + th.reach_max * reach.normalized();

    Vec2 delta = target - point;
    const double step = delta.norm();
    if (step <= 0.0) continue;
    if (step > rate_limit) delta *= rate_limit / step;
    moves.emplace_back(l, delta);
    outcome.max_displacement = std::max(outcome.max_displacement, delta.norm());
  }

  if (!moves.empty()) {
    traj.displace_xy(moves);
    outcome.moved_points = static_cast<int>(moves.size());
    PROMIND_DEBUG("morph: moved %d control points, max step %.4f m", outcome.moved_points,
                  outcome.max_displacement);
  }
  return outcome;
}

StopDecision check_stop(const Vec2& ee_xy, const Vec2& ee_velocity_xy, const Vec2& human_xy,
                        double d_physical, double beta_threshold) {
  const Vec2 to_human = human_xy - ee_xy;
  const double d = to_human.norm();
  if (d >= d_physical) return StopDecision::go;
  const double speed = ee_velocity_xy.norm();
  if (speed < 1e-9 || d < 1e-12) return StopDecision::stop;
  const double cosine =
      std::clamp(ee_velocity_xy.dot(to_human) / (speed * d), -1.0, 1.0);
  const double angle = std::acos(cosine);
  return angle < beta_threshold ? StopDecision::stop : StopDecision::go;
}

BSplineBundle replan_trajectory(const ReplanRequest& request,
                                const std::vector<double>& cycle_h, double min_interval) {
  if (request.remaining.empty())
    throw std::invalid_argument("replan: no remaining waypoints");
  if (!(min_interval > 0.0))
    throw std::invalid_argument("replan: min_interval must be positive");
  const int cycle_waypoints = static_cast<int>(cycle_h.size()) - 1;
  const int remaining = static_cast<int>(request.remaining.size());
  if (request.next_waypoint_index < 0 ||
      request.next_waypoint_index + remaining != cycle_waypoints)
    throw std::invalid_argument("replan: remaining waypoints do not line up with the cycle");

  // First segment: reach the next waypoint in its scheduled remaining time,
  // split across the leading virtual leg. Later legs reuse the cycle timing.
  const double first_segment = std::max(2.0 * min_interval, request.time_to_next);
  std::vector<double> h;
  h.push_back(0.5 * first_segment);
  h.push_back(0.5 * first_segment);
  const int g0 = request.next_waypoint_index;
  for (size_t g = static_cast<size_t>(g0) + 1; g + 1 < cycle_h.size(); ++g)
    h.push_back(cycle_h[g]);
  h.push_back(cycle_h.back());

  std::vector<Pose6> points;
  points.push_back(request.current_pose);
  for (const Pose6& p : request.remaining) points.push_back(p);

  // The halt pose may coincide with the next waypoint; that is fine here
  // because the first segment never has a displacement-derived lower bound.
  const WaypointList wps(points, /*allow_identical=*/true);
  return solve_trajectory(wps, IntervalVector(h), BoundaryConditions{});
}

}  // namespace promind
