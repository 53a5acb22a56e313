#pragma once

#include <vector>

#include "promind/bspline.hpp"
#include "promind/planner.hpp"
#include "promind/types.hpp"

namespace promind {

// Separation thresholds and stop-rule parameters. Distances in meters,
// angles in radians.
struct SafetyThresholds {
  double collision_free = 0.25;
  double conservative = 0.40;
  double social = 1.00;
  double self_collision = 0.20;  // keep-out radius around the robot base
  double beta_threshold = M_PI / 3.0;
  double reach_max = 0.855;  // horizontal workspace radius from the base

  void validate() const;
};

// The two live separation zones.
struct SafetyZones {
  double physical;   // in [collision_free, conservative], shrinks with attention
  double cognitive;  // in [physical, social], grows with mental effort
};

// physical = conservative - attention * (conservative - collision_free);
// cognitive = max(physical, conservative + effort * (social - conservative)).
// Inputs are clamped to [0, 1].
SafetyZones scale_zones(double attention, double effort, const SafetyThresholds& th);

struct MorphOutcome {
  int moved_points = 0;
  double max_displacement = 0.0;
};

// Pushes modifiable control points out of the cognitive zone around the
// human, horizontally only. Points covering already-traversed spans and the
// last four points (which pin the endpoint) are never touched. Each moved
// point is then pushed out of the self-collision radius, clamped to the reach
// disc, and rate-limited per call. The curve before the current span's end is
// left exactly unchanged.
MorphOutcome morph_path(BSplineBundle& traj, double t_now, const Vec2& human_xy,
                        const SafetyZones& zones, const SafetyThresholds& th,
                        const Vec2& base_xy, double rate_limit = 0.10);

enum class StopDecision { go, stop };

// Stop when the human is inside the physical zone and the end-effector is
// not clearly diverging: the angle between the horizontal velocity and the
// end-effector-to-human direction must reach beta to keep going. Zero
// velocity inside the zone stops (nothing to diverge with).
StopDecision check_stop(const Vec2& ee_xy, const Vec2& ee_velocity_xy, const Vec2& human_xy,
                        double d_physical, double beta_threshold);

enum class ExecMode { running, stopped, replanning };

// Inputs for a post-stop replan: resume from where the robot halted and pass
// through everything not yet visited.
struct ReplanRequest {
  Pose6 current_pose;
  std::vector<Pose6> remaining;  // untraveled waypoints, in order
  int next_waypoint_index = 0;   // 0-based index of remaining.front() in the cycle
  double time_to_next = 0.0;     // scheduled arrival minus stop time
};

// Builds the resume trajectory: waypoints [current_pose, remaining...], zero
// initial and final kinematics, first segment lasting
// max(2 * min_interval, time_to_next) split across the leading virtual leg,
// later legs copied from the cycle's interval vector.
BSplineBundle replan_trajectory(const ReplanRequest& request,
                                const std::vector<double>& cycle_h,
                                double min_interval = kMinInterval);

}  // namespace promind
