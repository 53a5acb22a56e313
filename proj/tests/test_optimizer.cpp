#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "promind/optimizer.hpp"
#include "promind/planner.hpp"

using namespace promind;

namespace {

Pose6 pose(double x, double y, double z, double a = 0.0, double b = 0.0, double c = 0.0) {
  Pose6 p;
  p << x, y, z, a, b, c;
  return p;
}

WaypointList two_point_task() {
  return WaypointList({pose(0.0, 0.0, 0.3), pose(0.6, 0.4, 0.5)});
}

bool dominates(const ParetoEntry& a, const ParetoEntry& b) {
  return a.f_time <= b.f_time && a.f_jerk <= b.f_jerk &&
         (a.f_time < b.f_time || a.f_jerk < b.f_jerk);
}

}  // namespace

TEST_CASE("time objective is the dimension count times the interval sum") {
  CHECK(time_objective(IntervalVector({1.0, 1.0, 1.0, 1.0})) == doctest::Approx(24.0).epsilon(1e-15));
  CHECK(time_objective(IntervalVector({0.5, 0.5, 0.5})) == doctest::Approx(9.0).epsilon(1e-15));

  oracles::TestRng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> h = oracles::random_intervals(rng, 4);
    double sum = 0.0;
    for (double v : h) sum += v;
    CHECK(time_objective(IntervalVector(h)) == doctest::Approx(6.0 * sum).epsilon(1e-14));
  }
}

TEST_CASE("jerk objective matches a fine trapezoid quadrature") {
  oracles::TestRng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const WaypointList wps(oracles::random_waypoints(rng, 4));
    const IntervalVector h(oracles::random_intervals(rng, 5, 0.5, 1.5));
    const BSplineBundle traj = solve_trajectory(wps, h);

    const double value = jerk_objective(traj);
    const double reference = oracles::trapezoid(
        [&](double t) { return traj.eval(t, 3).squaredNorm(); }, traj.start_time(),
        traj.end_time(), 40000);
    CHECK(value == doctest::Approx(reference).epsilon(1e-6));
  }
}

TEST_CASE("constant trajectory has zero jerk cost") {
  const Pose6 p = pose(0.3, -0.2, 0.5, 0.4, -0.1, 0.2);
  const WaypointList wps({p, p, p}, /*allow_identical=*/true);
  const BSplineBundle traj = solve_trajectory(wps, IntervalVector({1.0, 1.0, 1.0, 1.0}));
  CHECK(jerk_objective(traj) <= 1e-12);
}

TEST_CASE("uniform time dilation scales the jerk cost by the fifth power") {
  oracles::TestRng rng(31);
  for (int trial = 0; trial < 4; ++trial) {
    const WaypointList wps(oracles::random_waypoints(rng, 3));
    std::vector<double> h = oracles::random_intervals(rng, 4, 0.5, 1.2);
    const double base = jerk_objective(solve_trajectory(wps, IntervalVector(h)));

    const double s = 2.0;
    std::vector<double> stretched = h;
    for (double& v : stretched) v *= s;
    const double slow = jerk_objective(solve_trajectory(wps, IntervalVector(stretched)));

    CHECK(slow == doctest::Approx(base / std::pow(s, 5)).epsilon(1e-8));
  }
}

TEST_CASE("interval lower bounds floor at the minimum and scale with displacement") {
  KinematicLimits limits;
  limits.velocity = Vec6::Constant(1.0);

  SUBCASE("identical waypoints produce only the floor") {
    const Pose6 p = pose(0.2, 0.2, 0.4);
    const WaypointList wps({p, p, p}, /*allow_identical=*/true);
    const std::vector<double> lb = interval_lower_bounds(wps, limits);
    REQUIRE(lb.size() == 4);
    for (double b : lb) CHECK(b == doctest::Approx(0.05).epsilon(1e-15));
  }

  SUBCASE("dominant axis displacement over its velocity limit") {
    const WaypointList wps({pose(0.0, 0.0, 0.0), pose(0.5, 0.1, 0.0), pose(0.5, 0.35, 0.0)});
    const std::vector<double> lb = interval_lower_bounds(wps, limits);
    REQUIRE(lb.size() == 4);
    CHECK(lb[0] == doctest::Approx(0.05).epsilon(1e-15));  // leading virtual leg
    CHECK(lb[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(lb[2] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(lb[3] == doctest::Approx(0.05).epsilon(1e-15));  // trailing virtual leg
  }

  SUBCASE("per-dimension velocity limits pick the binding axis") {
    KinematicLimits anisotropic;
    anisotropic.velocity << 1.0, 0.1, 1.0, 1.0, 1.0, 1.0;
    const WaypointList wps({pose(0.0, 0.0, 0.0), pose(0.5, 0.1, 0.0)});
    const std::vector<double> lb = interval_lower_bounds(wps, anisotropic);
    CHECK(lb[1] == doctest::Approx(1.0).epsilon(1e-12));  // 0.1 / 0.1 beats 0.5 / 1.0
  }

  SUBCASE("invalid inputs are rejected") {
    const WaypointList wps({pose(0.0, 0.0, 0.0), pose(0.5, 0.1, 0.0)});
    CHECK_THROWS_AS(interval_lower_bounds(wps, limits, 0.0), std::invalid_argument);
    KinematicLimits bad;
    bad.velocity[2] = 0.0;
    CHECK_THROWS_AS(interval_lower_bounds(wps, bad), std::invalid_argument);
  }
}

TEST_CASE("limit check is conservative: a feasible verdict holds at dense samples") {
  const WaypointList wps({pose(0.0, 0.0, 0.3), pose(0.4, 0.3, 0.5), pose(0.1, 0.6, 0.4)});
  KinematicLimits limits;  // defaults: 1.0 / 5.0 / 50.0

  const BSplineBundle slow = solve_trajectory(wps, IntervalVector({1.0, 2.0, 2.0, 1.0}));
  const LimitCheck verdict = check_limits(slow, limits);
  REQUIRE(verdict.feasible);
  CHECK(verdict.worst_violation <= 0.0);

  const double t0 = slow.start_time();
  const double t1 = slow.end_time();
  for (int i = 0; i <= 1000; ++i) {
    const double t = t0 + (t1 - t0) * static_cast<double>(i) / 1000.0;
    for (int order = 1; order <= 3; ++order) {
      const Vec6 value = slow.eval(t, order);
      const Vec6& bound = order == 1   ? limits.velocity
                          : order == 2 ? limits.acceleration
                                       : limits.jerk;
      for (int d = 0; d < kPoseDims; ++d) CHECK(std::abs(value[d]) <= bound[d] + 1e-9);
    }
  }
}

TEST_CASE("limit check flags an over-aggressive timing with a usable report") {
  const WaypointList wps({pose(0.0, 0.0, 0.0), pose(0.8, 0.0, 0.0)});
  KinematicLimits limits;
  const BSplineBundle fast = solve_trajectory(wps, IntervalVector({0.05, 0.3, 0.05}));
  const LimitCheck verdict = check_limits(fast, limits);
  CHECK_FALSE(verdict.feasible);
  CHECK(verdict.worst_violation > 0.0);
  CHECK(verdict.worst_order >= 1);
  CHECK(verdict.worst_order <= 3);
  CHECK(verdict.worst_dimension == 0);  // all motion is along x
}

TEST_CASE("optimizer returns a feasible, mutually non-dominated front deterministically") {
  const WaypointList wps = two_point_task();
  KinematicLimits limits;
  limits.velocity = Vec6::Constant(1.0);
  limits.acceleration = Vec6::Constant(2.0);
  limits.jerk = Vec6::Constant(10.0);

  OptimizerConfig cfg;
  cfg.population = 32;
  cfg.generations = 60;
  cfg.seed = 7;
  cfg.h_max = 6.0;

  const std::vector<ParetoEntry> front = optimize_front(wps, {}, limits, cfg);
  REQUIRE(front.size() >= 2);

  const std::vector<double> lb = interval_lower_bounds(wps, limits, cfg.min_interval);
  for (const ParetoEntry& entry : front) {
    REQUIRE(entry.h.size() == lb.size());
    for (size_t g = 0; g < lb.size(); ++g) {
      CHECK(entry.h[g] >= lb[g] - 1e-12);
      CHECK(entry.h[g] <= cfg.h_max + 1e-12);
    }
    const BSplineBundle traj = solve_trajectory(wps, IntervalVector(entry.h));
    CHECK(check_limits(traj, limits).feasible);
    CHECK(entry.f_time == doctest::Approx(time_objective(IntervalVector(entry.h))).epsilon(1e-12));
    CHECK(entry.f_jerk == doctest::Approx(jerk_objective(traj)).epsilon(1e-12));
  }

  for (size_t i = 0; i + 1 < front.size(); ++i) {
    CHECK(front[i].f_time < front[i + 1].f_time);
    CHECK(front[i].f_jerk > front[i + 1].f_jerk);
  }
  for (size_t i = 0; i < front.size(); ++i)
    for (size_t j = 0; j < front.size(); ++j)
      if (i != j) CHECK_FALSE(dominates(front[i], front[j]));

  const std::vector<ParetoEntry> again = optimize_front(wps, {}, limits, cfg);
  REQUIRE(again.size() == front.size());
  for (size_t i = 0; i < front.size(); ++i) {
    CHECK(again[i].f_time == front[i].f_time);
    CHECK(again[i].f_jerk == front[i].f_jerk);
    CHECK(again[i].h == front[i].h);
  }
}

TEST_CASE("optimizer minimum time is near the exhaustive grid optimum") {
  const WaypointList wps = two_point_task();
  KinematicLimits limits;
  limits.velocity = Vec6::Constant(1.0);
  limits.acceleration = Vec6::Constant(2.0);
  limits.jerk = Vec6::Constant(10.0);

  OptimizerConfig cfg;
  cfg.population = 40;
  cfg.generations = 80;
  cfg.seed = 19;
  cfg.h_max = 6.0;
  const std::vector<ParetoEntry> front = optimize_front(wps, {}, limits, cfg);

  const std::vector<double> lb = interval_lower_bounds(wps, limits, cfg.min_interval);
  REQUIRE(lb.size() == 3);
  double grid_best = std::numeric_limits<double>::infinity();
  const int steps = 24;
  const double span = 2.0;  // wide enough to bracket the feasibility frontier
  for (int i0 = 0; i0 < steps; ++i0) {
    for (int i1 = 0; i1 < steps; ++i1) {
      for (int i2 = 0; i2 < steps; ++i2) {
        const std::vector<double> h = {
            lb[0] + span * static_cast<double>(i0) / (steps - 1),
            lb[1] + span * static_cast<double>(i1) / (steps - 1),
            lb[2] + span * static_cast<double>(i2) / (steps - 1)};
        try {
          const BSplineBundle traj = solve_trajectory(wps, IntervalVector(h));
          if (check_limits(traj, limits).feasible)
            grid_best = std::min(grid_best, time_objective(IntervalVector(h)));
        } catch (const SolverError&) {
        }
      }
    }
  }
  REQUIRE(std::isfinite(grid_best));
  CHECK(front.front().f_time <= grid_best * 1.05);
}

TEST_CASE("optimizer reports infeasibility with the best violation seen") {
  const WaypointList wps = two_point_task();
  KinematicLimits limits;
  limits.jerk = Vec6::Constant(1e-9);  // nothing satisfies this

  OptimizerConfig cfg;
  cfg.population = 8;
  cfg.generations = 2;
  cfg.h_max = 2.0;

  try {
    optimize_front(wps, {}, limits, cfg);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& err) {
    CHECK(err.best_violation > 0.0);
    CHECK(std::isfinite(err.best_violation));
  }
}

TEST_CASE("optimizer config validation") {
  OptimizerConfig cfg;
  cfg.population = 7;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.generations = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.h_max = 0.01;  // below min_interval
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.crossover_probability = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK_NOTHROW(OptimizerConfig{}.validate());
}

TEST_CASE("ladder constructor enforces the index ordering") {
  auto entry = [](double f_time, double f_jerk) {
    return ParetoEntry{{1.0, 1.0, 1.0}, f_time, f_jerk};
  };
  CHECK_NOTHROW(SolutionLadder({entry(10.0, 1.0), entry(8.0, 2.0), entry(6.0, 2.0)}));
  CHECK_THROWS_AS(SolutionLadder({}), std::invalid_argument);
  CHECK_THROWS_AS(SolutionLadder({entry(8.0, 1.0), entry(10.0, 2.0)}), std::invalid_argument);
  CHECK_THROWS_AS(SolutionLadder({entry(10.0, 2.0), entry(8.0, 1.0)}), std::invalid_argument);

  const SolutionLadder ladder({entry(10.0, 1.0), entry(8.0, 2.0)});
  CHECK(ladder.size() == 2);
  CHECK(ladder.at(1).f_time == 10.0);
  CHECK(ladder.at(2).f_time == 8.0);
  CHECK_THROWS_AS(ladder.at(0), std::out_of_range);
  CHECK_THROWS_AS(ladder.at(3), std::out_of_range);
}

TEST_CASE("downsampling keeps both extremes and spreads the ladder") {
  std::vector<ParetoEntry> front;
  for (int i = 0; i <= 100; ++i) {
    const double s = static_cast<double>(i) / 100.0;
    front.push_back(ParetoEntry{{1.0, 1.0, 1.0}, 1.0 + 9.0 * s, 10.0 - 9.0 * s});
  }
  // Feed in reverse order to prove the ordering is established internally.
  std::reverse(front.begin(), front.end());

  const SolutionLadder ladder = downsample_ladder(front, 15);
  REQUIRE(ladder.size() == 15);

  // Index 1 is the slowest, smoothest entry; index 15 the fastest.
  CHECK(ladder.at(1).f_time == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(ladder.at(1).f_jerk == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ladder.at(15).f_time == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ladder.at(15).f_jerk == doctest::Approx(10.0).epsilon(1e-12));

  for (int i = 1; i < 15; ++i) {
    CHECK(ladder.at(i + 1).f_time < ladder.at(i).f_time);
    CHECK(ladder.at(i + 1).f_jerk > ladder.at(i).f_jerk);
  }

  // Adjacent spacing stays within a small factor of uniform on a linear front.
  double min_gap = std::numeric_limits<double>::infinity();
  double max_gap = 0.0;
  for (int i = 1; i < 15; ++i) {
    const double gap = ladder.at(i).f_time - ladder.at(i + 1).f_time;
    min_gap = std::min(min_gap, gap);
    max_gap = std::max(max_gap, gap);
  }
  CHECK(max_gap / min_gap < 3.0);
}

TEST_CASE("downsampling rejects undersized fronts and degenerate requests") {
  std::vector<ParetoEntry> front;
  for (int i = 0; i < 10; ++i)
    front.push_back(ParetoEntry{{1.0}, 10.0 - i, 1.0 + i});
  CHECK_THROWS_AS(downsample_ladder(front, 15), std::invalid_argument);
  CHECK_THROWS_AS(downsample_ladder(front, 1), std::invalid_argument);
  CHECK_NOTHROW(downsample_ladder(front, 10));

  // Dominated and duplicate entries are stripped before the size check.
  std::vector<ParetoEntry> noisy = front;
  noisy.push_back(ParetoEntry{{1.0}, 10.0, 5.0});  // dominated
  noisy.push_back(ParetoEntry{{1.0}, 10.0, 1.0});  // duplicate objectives
  const SolutionLadder ladder = downsample_ladder(noisy, 10);
  CHECK(ladder.size() == 10);
  CHECK(ladder.at(1).f_time == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(ladder.at(1).f_jerk == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("downsampled ladder from an optimizer front is a valid pacing ladder") {
  const WaypointList wps = two_point_task();
  KinematicLimits limits;
  limits.velocity = Vec6::Constant(1.0);
  limits.acceleration = Vec6::Constant(2.0);
  limits.jerk = Vec6::Constant(10.0);

  OptimizerConfig cfg;
  cfg.population = 48;
  cfg.generations = 80;
  cfg.seed = 3;
  cfg.h_max = 6.0;

  const std::vector<ParetoEntry> front = optimize_front(wps, {}, limits, cfg);
  if (static_cast<int>(front.size()) < 15) {
    WARN("front smaller than ladder; skipping downsample round trip");
    return;
  }
  const SolutionLadder ladder = downsample_ladder(front, 15);
  CHECK(ladder.size() == 15);
  CHECK(ladder.at(15).f_time == doctest::Approx(front.front().f_time).epsilon(1e-12));
  CHECK(ladder.at(1).f_time == doctest::Approx(front.back().f_time).epsilon(1e-12));
}
