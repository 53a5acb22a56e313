#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "promind/optimizer.hpp"
#include "promind/planner.hpp"
#include "promind/safety.hpp"
#include "promind/sim.hpp"
#include "promind/trace.hpp"

using namespace promind;

namespace {

WaypointList ring_waypoints(int count) {
  std::vector<Pose6> points;
  for (int i = 0; i < count; ++i) {
    const double angle = 2.0 * M_PI * i / count;
    Pose6 p;
    p << 0.45 + 0.10 * std::cos(angle), 0.10 * std::sin(angle), 0.35 + 0.01 * i, 0.0, 0.0,
        0.02 * i;
    points.push_back(p);
  }
  return WaypointList(std::move(points));
}

IntervalVector even_intervals(int waypoints, double leg) {
  return IntervalVector(std::vector<double>(static_cast<std::size_t>(waypoints) + 1, leg));
}

const BSplineBundle& solved_bundle() {
  static const BSplineBundle bundle =
      solve_trajectory(ring_waypoints(8), even_intervals(8, 0.8));
  return bundle;
}

void BM_BasisEval(benchmark::State& state) {
  const KnotVector knots = build_knots(even_intervals(8, 0.8));
  double t = 0.0;
  const double end = knots.values().back();
  double out[6];
  for (auto _ : state) {
    t += 0.0137;
    if (t >= end) t -= end;
    benchmark::DoNotOptimize(basis_nonzero(knots, t, out));
  }
}
BENCHMARK(BM_BasisEval);

void BM_BundleEval(benchmark::State& state) {
  const BSplineBundle& bundle = solved_bundle();
  const int order = static_cast<int>(state.range(0));
  double t = 0.0;
  for (auto _ : state) {
    t += 0.0137;
    if (t >= bundle.end_time()) t -= bundle.end_time();
    benchmark::DoNotOptimize(bundle.eval(t, order));
  }
}
BENCHMARK(BM_BundleEval)->Arg(0)->Arg(1)->Arg(3);

void BM_SolveTrajectory(benchmark::State& state) {
  const int W = static_cast<int>(state.range(0));
  const WaypointList wps = ring_waypoints(W);
  const IntervalVector h = even_intervals(W, 0.8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_trajectory(wps, h));
  }
}
BENCHMARK(BM_SolveTrajectory)->Arg(4)->Arg(8)->Arg(16);

void BM_JerkObjective(benchmark::State& state) {
  const int W = static_cast<int>(state.range(0));
  const WaypointList wps = ring_waypoints(W);
  const IntervalVector h = even_intervals(W, 0.8);
  for (auto _ : state) {
    const BSplineBundle bundle = solve_trajectory(wps, h);
    benchmark::DoNotOptimize(jerk_objective(bundle));
  }
}
BENCHMARK(BM_JerkObjective)->Arg(4)->Arg(8);

void BM_MorphPath(benchmark::State& state) {
  const SafetyThresholds th;
  const SafetyZones zones{0.32, 0.70};
  const Vec2 base = Vec2::Zero();
  const Vec2 human(0.52, 0.08);  // inside the cognitive zone of the ring
  for (auto _ : state) {
    state.PauseTiming();
    BSplineBundle bundle = solved_bundle();
    state.ResumeTiming();
    benchmark::DoNotOptimize(morph_path(bundle, 0.2, human, zones, th, base, 0.10));
  }
}
BENCHMARK(BM_MorphPath);

void BM_OptimizeFront(benchmark::State& state) {
  const WaypointList wps = ring_waypoints(4);
  OptimizerConfig cfg;
  cfg.population = 24;
  cfg.generations = 20;
  cfg.seed = 3;
  cfg.h_max = 4.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize_front(wps, BoundaryConditions{}, KinematicLimits{}, cfg));
  }
}
BENCHMARK(BM_OptimizeFront)->Unit(benchmark::kMillisecond);

void BM_Episode(benchmark::State& state) {
  Scenario sc;
  sc.cycles.push_back(ring_waypoints(6));
  sc.optimizer.population = 32;
  sc.optimizer.generations = 40;
  sc.optimizer.seed = 5;
  sc.optimizer.h_max = 4.0;
  const ScenarioSolution sol = optimize_scenario(sc);
  const Trace trace = generate_trace(TraceProfile::intrusive, 120.0, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_episode(sc, sol, trace, Strategy::promind));
  }
}
BENCHMARK(BM_Episode)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
