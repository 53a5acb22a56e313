#pragma once

#include <cstdint>
#include <vector>

#include "promind/planner.hpp"
#include "promind/types.hpp"

namespace promind {

// Per-dimension absolute kinematic bounds for the end-effector trajectory.
struct KinematicLimits {
  Vec6 velocity = Vec6::Constant(1.0);
  Vec6 acceleration = Vec6::Constant(5.0);
  Vec6 jerk = Vec6::Constant(50.0);

  void validate() const;
};

// Total-duration objective: pose dimension count times the interval sum.
double time_objective(const IntervalVector& h);

// Integral of squared jerk summed over the six dimensions, via per-span
// Gauss-Legendre quadrature. The integrand is piecewise polynomial of degree
// 4, so 5 nodes per span are exact with margin.
double jerk_objective(const BSplineBundle& traj);

// Per-interval lower bounds: dominant-axis displacement over its velocity
// limit, floored at min_interval. The two virtual legs carry no displacement
// and always get the floor.
std::vector<double> interval_lower_bounds(const WaypointList& wps,
                                          const KinematicLimits& limits,
                                          double min_interval = kMinInterval);

struct LimitCheck {
  bool feasible;
  // Max over all derivative control points of |c| / limit - 1; <= 0 when
  // feasible. The control-point bound is sufficient for the sampled
  // trajectory by the convex hull property, hence conservative.
  double worst_violation;
  int worst_order;      // 1 velocity, 2 acceleration, 3 jerk
  int worst_dimension;  // 0..5
};

LimitCheck check_limits(const BSplineBundle& traj, const KinematicLimits& limits);

struct ParetoEntry {
  std::vector<double> h;
  double f_time;
  double f_jerk;
};

struct OptimizerConfig {
  int population = 90;
  int generations = 200;
  std::uint64_t seed = 1;
  double h_max = 10.0;
  double min_interval = kMinInterval;
  double crossover_probability = 0.9;
  double crossover_eta = 15.0;
  double mutation_eta = 20.0;
  double mutation_probability = -1.0;  // <= 0 selects 1 / gene count

  void validate() const;
};

// Bi-objective time/jerk search over the interval vector with an elitist
// genetic algorithm (non-dominated sorting, crowding distance, binary
// tournament, SBX crossover, polynomial mutation, constrained domination).
// Returns the final feasible non-dominated front, deduplicated and strictly
// mutually non-dominated, sorted by ascending f_time. Deterministic for a
// fixed seed. Throws InfeasibleError when no feasible individual exists.
std::vector<ParetoEntry> optimize_front(const WaypointList& wps,
                                        const BoundaryConditions& bc,
                                        const KinematicLimits& limits,
                                        const OptimizerConfig& cfg);

// Ordered pacing ladder. Index 1 is the slowest, smoothest entry; the last
// index is the fastest. f_time strictly decreases and f_jerk never decreases
// along the index.
class SolutionLadder {
 public:
  explicit SolutionLadder(std::vector<ParetoEntry> entries);

  int size() const { return static_cast<int>(entries_.size()); }
  const ParetoEntry& at(int index) const;  // 1-based
  const std::vector<ParetoEntry>& entries() const { return entries_; }

 private:
  std::vector<ParetoEntry> entries_;
};

// Downsamples a front to n entries with an augmented scalarization sweep:
// objectives are min-max normalized, the weight schedule spans both extremes
// with a mild bias that packs more entries toward the fast end, duplicates
// are replaced by farthest-point fill, and the result is sorted so f_time
// strictly decreases along the ladder index.
SolutionLadder downsample_ladder(const std::vector<ParetoEntry>& front, int n = 15);

}  // namespace promind
