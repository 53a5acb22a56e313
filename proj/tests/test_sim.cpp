#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "promind/sim.hpp"
#include "promind/trace.hpp"

using namespace promind;

namespace {

// Six waypoints on a small arc around the workspace center. Generous limits,
// small optimizer budget: enough to produce a full 15-entry ladder fast.
Scenario test_scenario() {
  Scenario sc;
  const Vec2 center(0.45, 0.0);
  std::vector<Pose6> points;
  const int W = 6;
  for (int i = 0; i < W; ++i) {
    const double angle = 0.4 + 0.9 * i;
    Pose6 p;
    p << center.x() + 0.10 * std::cos(angle), center.y() + 0.10 * std::sin(angle),
        0.35 + 0.01 * i, 0.0, 0.0, 0.05 * i;
    points.push_back(p);
  }
  sc.cycles.emplace_back(std::move(points));
  sc.optimizer.population = 36;
  sc.optimizer.generations = 50;
  sc.optimizer.seed = 5;
  sc.optimizer.h_max = 4.0;
  sc.sim.max_duration = 600.0;
  return sc;
}

const Scenario& shared_scenario() {
  static const Scenario sc = test_scenario();
  return sc;
}

const ScenarioSolution& shared_solution() {
  static const ScenarioSolution sol = optimize_scenario(shared_scenario());
  return sol;
}

// Human parked at a fixed spot, RR attached to every row so calibration and
// pacing have data. No gaze channels.
Trace parked_trace(const Vec2& where, double duration, double dt = 0.1) {
  std::vector<TraceSample> rows;
  for (double t = 0.0; t <= duration + 1e-9; t += dt) {
    TraceSample s;
    s.t = t;
    s.human_xy = where;
    s.human_z = 1.35;
    s.rr = 0.85;
    rows.push_back(s);
  }
  return Trace(std::move(rows));
}

// Human far away for the whole episode.
Trace distant_trace(double duration) { return parked_trace(Vec2(3.0, 2.5), duration); }

// Far, then a dash to `target` during [t_in, t_in + 1], a dwell, a retreat at
// t_out over one second, far again.
Trace lunge_trace(const Vec2& target, double t_in, double t_out, double duration,
                  double dt = 0.05) {
  const Vec2 far(2.5, 2.0);
  std::vector<TraceSample> rows;
  for (double t = 0.0; t <= duration + 1e-9; t += dt) {
    TraceSample s;
    s.t = t;
    if (t < t_in) {
      s.human_xy = far;
    } else if (t < t_in + 1.0) {
      s.human_xy = far + (target - far) * (t - t_in);
    } else if (t < t_out) {
      s.human_xy = target;
    } else if (t < t_out + 1.0) {
      s.human_xy = target + (far - target) * (t - t_out);
    } else {
      s.human_xy = far;
    }
    s.human_z = 1.35;
    s.rr = 0.85;
    rows.push_back(s);
  }
  return Trace(std::move(rows));
}

std::string ticks_to_string(const EpisodeResult& r) {
  std::ostringstream out;
  for (const TickRecord& rec : r.ticks) {
    out << rec.t << '|' << rec.pose.transpose() << '|' << rec.speed << '|' << rec.d << '|'
        << to_string(rec.mode) << '|' << rec.ladder_index << '|' << rec.moved_points << '|'
        << rec.event << '\n';
  }
  return out.str();
}

}  // namespace

TEST_CASE("velocity scaling cap follows the raised-cosine ramp") {
  SafetyThresholds th;
  CHECK(vs_speed_cap(0.0, th) == 0.0);
  CHECK(vs_speed_cap(th.collision_free, th) == 0.0);
  CHECK(vs_speed_cap(th.social, th) == doctest::Approx(0.250).epsilon(1e-12));
  CHECK(vs_speed_cap(2.0, th) == 0.250);
  const double mid = 0.5 * (th.collision_free + th.social);
  CHECK(vs_speed_cap(mid, th) == doctest::Approx(0.125).epsilon(1e-12));

  double prev = -1.0;
  for (double d = 0.0; d <= 1.2; d += 0.004) {
    const double v = vs_speed_cap(d, th);
    CHECK(v >= prev - 1e-15);
    CHECK(v >= 0.0);
    CHECK(v <= 0.250);
    prev = v;
  }
  // The crawl region: caps below 5 mm/s reach out to roughly d = 0.318.
  CHECK(vs_speed_cap(0.31, th) < 0.005);
  CHECK(vs_speed_cap(0.33, th) > 0.005);
  CHECK_THROWS_AS(vs_speed_cap(std::nan(""), th), std::invalid_argument);
}

TEST_CASE("involuntary-motion cap is a clamped linear ramp") {
  CHECK(emu_speed_cap(0.25, 0.5) == 0.0);
  CHECK(emu_speed_cap(0.10, 0.5) == 0.0);
  CHECK(emu_speed_cap(0.85, 0.5) == doctest::Approx(0.30).epsilon(1e-12));
  CHECK(emu_speed_cap(1.25, 0.5) == doctest::Approx(0.50).epsilon(1e-12));
  CHECK(emu_speed_cap(0.85, 0.2) == doctest::Approx(0.12).epsilon(1e-12));
  CHECK_THROWS_AS(emu_speed_cap(0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(emu_speed_cap(0.5, -1.0), std::invalid_argument);
}

TEST_CASE("speed scale caps the nominal rate and handles rest instants") {
  CHECK(speed_scale(0.1, 0.2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(speed_scale(0.5, 0.2) == 1.0);
  CHECK(speed_scale(0.0, 0.2) == 0.0);
  CHECK(speed_scale(0.2, 0.0) == 1.0);  // at rest with a positive cap: advance
  CHECK(speed_scale(0.0, 0.0) == 0.0);  // at rest inside the frozen region: hold
  CHECK_THROWS_AS(speed_scale(-0.1, 0.2), std::invalid_argument);
}

TEST_CASE("metrics accumulator reproduces the worked example") {
  MetricsAccumulator acc(0.02, 0.005);
  acc.add_tick(0.0, 1.0, true);
  acc.add_tick(0.0, 0.9, true);
  acc.add_tick(1.0, 0.8, true);
  acc.add_tick(1.0, 0.85, true);
  const EpisodeMetrics m = acc.snapshot();
  CHECK(m.v_mean == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(m.idle_percent == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(m.d_min == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(m.ticks == 4);
  CHECK(m.duration == doctest::Approx(0.08).epsilon(1e-12));
}

TEST_CASE("metrics accumulator covers the degenerate cases") {
  SUBCASE("fully stopped episode is all idle") {
    MetricsAccumulator acc(0.02, 0.005);
    for (int i = 0; i < 100; ++i) acc.add_tick(0.0, 0.5, true);
    const EpisodeMetrics m = acc.snapshot();
    CHECK(m.idle_percent == 100.0);
    CHECK(m.v_mean == 0.0);
  }
  SUBCASE("non-pending ticks do not count toward idle") {
    MetricsAccumulator acc(0.02, 0.005);
    acc.add_tick(0.0, 0.5, false);
    acc.add_tick(1.0, 0.5, true);
    CHECK(MetricsAccumulator(acc).snapshot().idle_percent == 0.0);
  }
  SUBCASE("separation observations fold into the minimum") {
    MetricsAccumulator acc(0.02, 0.005);
    acc.add_tick(1.0, 0.5, true);
    acc.observe_separation(0.21);
    CHECK(acc.snapshot().d_min == doctest::Approx(0.21).epsilon(1e-15));
  }
  SUBCASE("empty accumulator yields zeros") {
    MetricsAccumulator acc(0.02, 0.005);
    const EpisodeMetrics m = acc.snapshot();
    CHECK(m.duration == 0.0);
    CHECK(m.v_mean == 0.0);
    CHECK(m.idle_percent == 0.0);
    CHECK(m.d_min == 0.0);
  }
}

TEST_CASE("scenario JSON round trip and strict key checking") {
  const Scenario sc = shared_scenario();
  const std::string text = scenario_to_json(sc);
  const Scenario back = scenario_from_json(text);
  CHECK(back.cycles.size() == sc.cycles.size());
  CHECK(back.cycles[0].count() == sc.cycles[0].count());
  for (int g = 0; g < sc.cycles[0].count(); ++g) {
    CHECK((back.cycles[0][g] - sc.cycles[0][g]).norm() == doctest::Approx(0.0).epsilon(1e-15));
  }
  CHECK(back.optimizer.population == sc.optimizer.population);
  CHECK(back.pacing.ladder_size == sc.pacing.ladder_size);
  CHECK(back.sim.tick_rate == sc.sim.tick_rate);
  CHECK(back.strategy == sc.strategy);

  SUBCASE("unknown keys are rejected") {
    CHECK_THROWS_AS(scenario_from_json(R"({"cycles": [[[0,0,0,0,0,0],[1,0,0,0,0,0]]],
                                          "velocity": 1.0})"),
                    std::invalid_argument);
  }
  SUBCASE("waypoints must have six coordinates") {
    CHECK_THROWS_AS(scenario_from_json(R"({"cycles": [[[0,0,0],[1,0,0]]]})"),
                    std::invalid_argument);
  }
  SUBCASE("plain waypoint arrays and scalar limits are accepted") {
    const Scenario s = scenario_from_json(
        R"({"cycles": [[[0.4,0,0.3,0,0,0],[0.5,0.1,0.3,0,0,0]]], "limits": {"velocity": 0.7}})");
    CHECK(s.cycles[0].count() == 2);
    CHECK(s.limits.velocity[3] == doctest::Approx(0.7).epsilon(1e-15));
  }
  SUBCASE("empty cycle list is rejected") {
    CHECK_THROWS_AS(scenario_from_json(R"({"cycles": []})"), std::invalid_argument);
  }
}

TEST_CASE("solution JSON and ladder CSV round trips") {
  const ScenarioSolution& sol = shared_solution();
  const std::string text = solution_to_json(sol);
  const ScenarioSolution back = solution_from_json(text);
  REQUIRE(back.cycles.size() == sol.cycles.size());
  REQUIRE(back.cycles[0].ladder.size() == sol.cycles[0].ladder.size());
  for (int i = 1; i <= sol.cycles[0].ladder.size(); ++i) {
    const ParetoEntry& a = sol.cycles[0].ladder.at(i);
    const ParetoEntry& b = back.cycles[0].ladder.at(i);
    CHECK(a.f_time == b.f_time);
    CHECK(a.f_jerk == b.f_jerk);
    REQUIRE(a.h.size() == b.h.size());
    for (std::size_t g = 0; g < a.h.size(); ++g) CHECK(a.h[g] == b.h[g]);
  }
  CHECK(back.cycles[0].front.size() == sol.cycles[0].front.size());

  std::stringstream csv;
  write_ladder_csv(sol.cycles[0].ladder, csv);
  std::string line;
  REQUIRE(std::getline(csv, line));
  // 6 waypoints: index, f_time, f_jerk, then 7 interval columns.
  CHECK(line == "index,f_time,f_jerk,h_1,h_2,h_3,h_4,h_5,h_6,h_7");
  int rows = 0;
  while (std::getline(csv, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == sol.cycles[0].ladder.size());
}

TEST_CASE("optimized scenario ladders honor the pacing ladder size") {
  const ScenarioSolution& sol = shared_solution();
  REQUIRE(sol.cycles.size() == 1);
  CHECK(sol.cycles[0].ladder.size() == shared_scenario().pacing.ladder_size);
  CHECK(static_cast<int>(sol.cycles[0].ladder.at(1).h.size()) ==
        shared_scenario().cycles[0].count() + 1);
  CHECK(sol.cycles[0].front.size() >= 15);
}

TEST_CASE("no-human episode runs the nominal entry to completion") {
  const Scenario& sc = shared_scenario();
  const ScenarioSolution& sol = shared_solution();
  const Trace trace = distant_trace(60.0);
  const EpisodeResult r = run_episode(sc, sol, trace, Strategy::no_human);

  REQUIRE(r.metrics.completed);
  CHECK(r.metrics.stops == 0);
  CHECK(r.metrics.morphs == 0);
  CHECK(r.metrics.replans == 0);
  REQUIRE(r.metrics.cycle_durations.size() == 1);

  // The nominal entry is the pacing start index (8 with the defaults).
  const double expected = sol.cycles[0].ladder.at(8).f_time / 6.0;
  CHECK(r.metrics.duration >= expected - 1e-9);
  CHECK(r.metrics.duration <= expected + 1.0 / sc.sim.tick_rate + 1e-9);
  CHECK(r.metrics.cycle_durations[0] == doctest::Approx(r.metrics.duration).epsilon(1e-12));

  // Ends exactly on the final waypoint.
  const Pose6& last = sc.cycles[0][sc.cycles[0].count() - 1];
  CHECK((r.ticks.back().pose - last).norm() < 1e-6);
  CHECK(r.ticks.back().event == "complete");
  CHECK(r.ticks.front().event == "dispatch");

  // Speed stays within the global bound.
  const double cap = std::sqrt(3.0) * sc.limits.velocity.maxCoeff();
  for (const TickRecord& rec : r.ticks) CHECK(rec.speed <= cap + 1e-9);

  // The human never mattered but the counterfactual separation is recorded.
  CHECK(r.metrics.d_min > 1.5);
  CHECK(r.pacing.empty());
}

TEST_CASE("fixed strategies pick the ladder ends") {
  const Scenario& sc = shared_scenario();
  const ScenarioSolution& sol = shared_solution();
  const Trace trace = distant_trace(60.0);
  const EpisodeResult fast = run_episode(sc, sol, trace, Strategy::fixed_min_time);
  const EpisodeResult slow = run_episode(sc, sol, trace, Strategy::fixed_min_jerk);
  REQUIRE(fast.metrics.completed);
  REQUIRE(slow.metrics.completed);
  CHECK(fast.ticks.front().ladder_index == sc.pacing.ladder_size);
  CHECK(slow.ticks.front().ladder_index == 1);
  CHECK(fast.metrics.duration < slow.metrics.duration);
  const double fastest = sol.cycles[0].ladder.at(sc.pacing.ladder_size).f_time / 6.0;
  CHECK(fast.metrics.duration <= fastest + 1.0 / sc.sim.tick_rate + 1e-9);
}

TEST_CASE("episodes are deterministic") {
  const Scenario& sc = shared_scenario();
  const ScenarioSolution& sol = shared_solution();
  const Trace trace = generate_trace(TraceProfile::stressed, 120.0, 99);
  const EpisodeResult a = run_episode(sc, sol, trace, Strategy::promind);
  const EpisodeResult b = run_episode(sc, sol, trace, Strategy::promind);
  CHECK(ticks_to_string(a) == ticks_to_string(b));
  CHECK(a.metrics.duration == b.metrics.duration);
  CHECK(a.metrics.d_min == b.metrics.d_min);
  CHECK(a.metrics.v_mean == b.metrics.v_mean);
  CHECK(a.pacing.size() == b.pacing.size());
}

TEST_CASE("distant human leaves the pacing strategy at the nominal timing") {
  const Scenario& sc = shared_scenario();
  const ScenarioSolution& sol = shared_solution();
  const Trace trace = distant_trace(60.0);
  const EpisodeResult pm = run_episode(sc, sol, trace, Strategy::promind);
  const EpisodeResult nh = run_episode(sc, sol, trace, Strategy::no_human);
  REQUIRE(pm.metrics.completed);
  CHECK(pm.metrics.stops == 0);
  CHECK(pm.metrics.morphs == 0);
  // Flat RR: no ladder steps, identical dispatch timing.
  CHECK(pm.metrics.duration == doctest::Approx(nh.metrics.duration).epsilon(1e-12));
}

TEST_CASE("velocity scaling freezes below the collision-free distance") {
  Scenario sc = shared_scenario();
  sc.sim.max_duration = 20.0;
  const ScenarioSolution& sol = shared_solution();
  // Parked right on the corridor: separation from the start pose is below
  // the collision-free threshold, so the scale factor is pinned at zero.
  const Vec2 on_path(0.45 + 0.10 * std::cos(1.3), 0.10 * std::sin(1.3));
  const Trace trace = parked_trace(on_path, 30.0);
  const EpisodeResult r = run_episode(sc, sol, trace, Strategy::vs);
  CHECK_FALSE(r.metrics.completed);
  CHECK(r.ticks.back().event == "timeout");
  CHECK(r.metrics.v_mean == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.metrics.idle_percent == doctest::Approx(100.0).epsilon(1e-12));
  for (const TickRecord& rec : r.ticks) CHECK(rec.speed <= 1e-12);
}

TEST_CASE("a parked human inside the physical zone stops the pacing strategy") {
  Scenario sc = shared_scenario();
  sc.sim.max_duration = 20.0;
  const ScenarioSolution& sol = shared_solution();
  const Vec2 near_start(0.45 + 0.10 * std::cos(0.4), 0.10 * std::sin(0.4) + 0.05);
  const Trace trace = parked_trace(near_start, 30.0);
  const EpisodeResult r = run_episode(sc, sol, trace, Strategy::promind);
  CHECK_FALSE(r.metrics.completed);
  CHECK(r.metrics.stops == 1);
  CHECK(r.metrics.replans == 0);
  CHECK(r.metrics.idle_percent > 99.0);
  // Stopped from the first tick on.
  for (std::size_t i = 1; i < r.ticks.size(); ++i) {
    CHECK(r.ticks[i].mode == ExecMode::stopped);
  }
}

TEST_CASE("a transient lunge forces a stop, a replan, and a clean finish") {
  const Scenario& sc = shared_scenario();
  const ScenarioSolution& sol = shared_solution();
  const double nominal = sol.cycles[0].ladder.at(8).f_time / 6.0;
  // Park just past the fifth waypoint while the end-effector is still en
  // route toward it, so the approach is frontal and the stop rule must fire.
  const std::vector<double> times =
      waypoint_times(IntervalVector(sol.cycles[0].ladder.at(8).h));
  const Vec2 wp_xy(0.45 + 0.10 * std::cos(0.4 + 0.9 * 4), 0.10 * std::sin(0.4 + 0.9 * 4));
  const Vec2 target = wp_xy + 0.04 * (wp_xy - Vec2(0.45, 0.0)).normalized();
  const double park = times[3] + 0.25 * (times[4] - times[3]);
  const Trace trace = lunge_trace(target, std::max(0.05, park - 1.0),
                                  times[4] + 0.3 * nominal, 3.0 * nominal + 30.0);
  const EpisodeResult r = run_episode(sc, sol, trace, Strategy::promind);

  REQUIRE(r.metrics.completed);
  CHECK(r.metrics.stops >= 1);
  CHECK(r.metrics.replans >= 1);
  CHECK(r.metrics.duration > nominal);

  // Every waypoint still gets reached: the episode ends at the final pose.
  const Pose6& last = sc.cycles[0][sc.cycles[0].count() - 1];
  CHECK((r.ticks.back().pose - last).norm() < 1e-6);

  // Replay the stop rule from the records: a running tick never moves toward
  // a human inside the physical zone.
  for (const TickRecord& rec : r.ticks) {
    if (rec.mode != ExecMode::running) continue;
    if (rec.event == "complete" || rec.event == "timeout") continue;
    CHECK(check_stop(Vec2(rec.pose[0], rec.pose[1]), rec.velocity_xy, rec.human_xy,
                     rec.d_physical, sc.safety.beta_threshold) == StopDecision::go);
  }

  // Stop and replan events appear in the log.
  bool saw_stop = false, saw_replan = false;
  for (const TickRecord& rec : r.ticks) {
    if (rec.event.find("stop") != std::string::npos) saw_stop = true;
    if (rec.event.find("replan") != std::string::npos) saw_replan = true;
  }
  CHECK(saw_stop);
  CHECK(saw_replan);
}

TEST_CASE("mismatched inputs are rejected before the loop") {
  const Scenario& sc = shared_scenario();
  const ScenarioSolution& sol = shared_solution();
  SUBCASE("pacing strategy without RR data") {
    std::vector<TraceSample> rows(3);
    rows[0].t = 0.0;
    rows[1].t = 0.5;
    rows[2].t = 1.0;
    for (TraceSample& s : rows) s.human_xy = Vec2(3.0, 3.0);
    const Trace trace(std::move(rows));
    CHECK_THROWS_AS(run_episode(sc, sol, trace, Strategy::promind), std::invalid_argument);
    CHECK_NOTHROW(run_episode(sc, sol, trace, Strategy::no_human));
  }
  SUBCASE("solution cycle count mismatch") {
    ScenarioSolution wrong;
    CHECK_THROWS_AS(run_episode(sc, wrong, distant_trace(10.0), Strategy::no_human),
                    std::invalid_argument);
  }
  SUBCASE("ladder size mismatch") {
    Scenario other = sc;
    other.pacing.ladder_size = 10;
    CHECK_THROWS_AS(run_episode(other, sol, distant_trace(10.0), Strategy::no_human),
                    std::invalid_argument);
  }
  SUBCASE("discontinuous repeat") {
    Scenario other = sc;  // open arc: end != start, so repeat 2 must fail
    other.sim.repeat = 2;
    CHECK_THROWS_AS(run_episode(other, sol, distant_trace(10.0), Strategy::no_human),
                    std::invalid_argument);
  }
  SUBCASE("calibrated baseline below the stress reference") {
    Scenario other = sc;
    other.pacing.rr_rest = 0.90;    // configured values are consistent...
    other.pacing.rr_stress = 0.86;  // ...but the measured 0.85 undercuts the reference
    const Trace trace = parked_trace(Vec2(3.0, 3.0), 30.0);
    CHECK_THROWS_AS(run_episode(other, sol, trace, Strategy::promind), std::invalid_argument);
  }
}

TEST_CASE("closed cycles support repeated dispatch") {
  Scenario sc;
  const Vec2 center(0.45, 0.0);
  std::vector<Pose6> points;
  for (int i = 0; i < 5; ++i) {
    const double angle = 2.0 * M_PI * i / 4.0;  // last equals first
    Pose6 p;
    p << center.x() + 0.08 * std::cos(angle), center.y() + 0.08 * std::sin(angle), 0.35, 0.0,
        0.0, 0.0;
    points.push_back(p);
  }
  sc.cycles.emplace_back(std::move(points));
  sc.optimizer.population = 32;
  sc.optimizer.generations = 40;
  sc.optimizer.seed = 21;
  sc.optimizer.h_max = 3.0;
  sc.sim.repeat = 3;
  const ScenarioSolution sol = optimize_scenario(sc);
  const EpisodeResult r = run_episode(sc, sol, distant_trace(60.0), Strategy::no_human);
  REQUIRE(r.metrics.completed);
  CHECK(r.metrics.cycle_durations.size() == 3);
  const double one = sol.cycles[0].ladder.at(8).f_time / 6.0;
  CHECK(r.metrics.duration >= 3.0 * one - 1e-9);
  CHECK(r.metrics.duration <= 3.0 * one + 3.0 / sc.sim.tick_rate + 1e-9);
}

TEST_CASE("comparison table is stable and annotates the motion-model baseline") {
  const Scenario& sc = shared_scenario();
  const ScenarioSolution& sol = shared_solution();
  std::vector<Trace> traces;
  traces.push_back(generate_trace(TraceProfile::calm, 60.0, 1));
  traces.push_back(generate_trace(TraceProfile::calm, 60.0, 2));
  const std::vector<Strategy> strategies = {Strategy::no_human, Strategy::emu};
  const auto a = compare_strategies(sc, sol, traces, strategies);
  const auto b = compare_strategies(sc, sol, traces, strategies);
  REQUIRE(a.size() == 2);
  CHECK(a[0].episodes == 2);
  CHECK(a[0].notes.empty());
  CHECK(a[1].notes.find("k_emu") != std::string::npos);
  std::stringstream sa, sb;
  write_compare_csv(a, sa);
  write_compare_csv(b, sb);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().find("no-human") != std::string::npos);
  const std::string js = compare_to_json(a);
  CHECK(js.find("T_mean") != std::string::npos);
}

TEST_CASE("run directory round trip and plot data") {
  namespace fs = std::filesystem;
  const Scenario& sc = shared_scenario();
  const ScenarioSolution& sol = shared_solution();
  const Trace trace = generate_trace(TraceProfile::stressed, 90.0, 5);
  const EpisodeResult r = run_episode(sc, sol, trace, Strategy::promind);

  const fs::path dir = fs::temp_directory_path() / "promind_test_run";
  fs::remove_all(dir);
  write_run_dir(r, dir.string());
  CHECK(fs::exists(dir / "metrics.json"));
  CHECK(fs::exists(dir / "ticks.csv"));
  CHECK(fs::exists(dir / "safety.jsonl"));
  CHECK(fs::exists(dir / "pacing.csv"));

  const RunData run = load_run_dir(dir.string());
  CHECK(run.metrics.duration == r.metrics.duration);
  CHECK(run.metrics.stops == r.metrics.stops);
  CHECK(run.metrics.completed == r.metrics.completed);
  REQUIRE(run.ticks.size() == r.ticks.size());
  const std::size_t mid = run.ticks.size() / 2;
  CHECK(run.ticks[mid].t == r.ticks[mid].t);
  CHECK(run.ticks[mid].d == r.ticks[mid].d);
  CHECK(run.ticks[mid].mode == r.ticks[mid].mode);
  REQUIRE(run.pacing.size() == r.pacing.size());
  if (!run.pacing.empty()) {
    CHECK(run.pacing.back().index == r.pacing.back().index);
    CHECK(run.pacing.back().rr == r.pacing.back().rr);
  }

  const fs::path plots = dir / "plots";
  write_plot_data(run, plots.string());
  for (const char* name : {"position.csv", "speed.csv", "separation.csv", "mode.csv",
                           "events.csv", "pacing.csv", "metrics.csv"}) {
    CHECK(fs::exists(plots / name));
  }
  fs::remove_all(dir);
}

TEST_CASE("strategy and mode names round trip") {
  for (const char* name :
       {"promind", "vs", "emu", "fixed-min-time", "fixed-min-jerk", "no-human"}) {
    CHECK(to_string(parse_strategy(name)) == name);
  }
  CHECK_THROWS_AS(parse_strategy("touchdown"), std::invalid_argument);
  for (const char* name : {"running", "stopped", "replanning"}) {
    CHECK(to_string(parse_exec_mode(name)) == name);
  }
  CHECK_THROWS_AS(parse_exec_mode("paused"), std::invalid_argument);
}
