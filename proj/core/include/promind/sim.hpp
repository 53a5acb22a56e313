#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "promind/human_monitor.hpp"
#include "promind/optimizer.hpp"
#include "promind/pacing.hpp"
#include "promind/planner.hpp"
#include "promind/safety.hpp"
#include "promind/trace.hpp"
#include "promind/types.hpp"

namespace promind {

enum class Strategy {
  promind,         // pacing + zone scaling + morphing + stop/replan
  vs,              // velocity scaling against the static zone pair
  emu,             // involuntary-motion-model speed limit
  fixed_min_time,  // fastest ladder entry, no human response
  fixed_min_jerk,  // smoothest ladder entry, no human response
  no_human,        // nominal entry, no human response
};

Strategy parse_strategy(const std::string& name);
std::string to_string(Strategy strategy);
std::string to_string(ExecMode mode);
ExecMode parse_exec_mode(const std::string& name);

// Safe speed ceiling from ISO 10218-1 used by the velocity-scaling baseline.
inline constexpr double kIsoSpeedCap = 0.250;
// The involuntary-motion model measures separation to the torso center, so
// the box half-extent is folded in as a fixed offset.
inline constexpr double kEmuOffset = 0.25;

// Speed cap of the velocity-scaling baseline: zero at or below the
// collision-free distance, the ISO cap at or beyond the social distance, and
// a raised-cosine ramp in between.
double vs_speed_cap(double d, const SafetyThresholds& th);

// Speed cap of the involuntary-motion baseline: a linear ramp from zero at
// the offset distance, never negative.
double emu_speed_cap(double d, double k_emu);

// Time-scaling factor applied to the nominal trajectory so the executed speed
// stays at or below cap. A rest instant (zero nominal speed) advances freely
// unless the cap itself is zero.
double speed_scale(double cap, double nominal_speed);

struct SimConfig {
  double tick_rate = 50.0;          // control ticks per second
  double v_idle = 0.005;            // below this realized speed a tick is idle
  double k_emu = 0.5;               // involuntary-motion ramp slope, 1/s
  double morph_rate_limit = 0.10;   // per-tick control point displacement cap
  double resume_margin = 0.05;      // clearance above the physical zone to resume
  double resume_hold = 0.3;         // seconds the clearance must persist
  double max_duration = 1800.0;     // hard wall-clock cap per episode
  bool calibrate_rr = true;         // take the rest baseline from the trace head
  double calibration_duration = 60.0;
  int repeat = 1;                   // times the cycle list is executed

  void validate() const;
};

struct Scenario {
  std::vector<WaypointList> cycles;
  KinematicLimits limits;
  SafetyThresholds safety;
  PacingConfig pacing;
  OptimizerConfig optimizer;
  RoIGeometry roi_task;
  RoIGeometry roi_instructions;
  RoIGeometry roi_cobot;
  EffortConfig effort;
  Vec2 base_xy = Vec2::Zero();
  SimConfig sim;
  Strategy strategy = Strategy::promind;

  void validate() const;
};

Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& scenario);
Scenario load_scenario(const std::string& path);

// Optimization result for one waypoint cycle: the full non-dominated front
// and the pacing ladder downsampled from it.
struct CycleSolution {
  std::vector<ParetoEntry> front;
  SolutionLadder ladder;
};

struct ScenarioSolution {
  std::vector<CycleSolution> cycles;
};

// Runs the bi-objective search and ladder downsampling for every cycle. The
// ladder size follows the scenario's pacing configuration.
ScenarioSolution optimize_scenario(const Scenario& scenario);

std::string solution_to_json(const ScenarioSolution& solution);
ScenarioSolution solution_from_json(const std::string& text);
ScenarioSolution load_solution(const std::string& path);

// Ladder CSV: one row per entry with columns index, f_time, f_jerk,
// h_1 .. h_{W+1}.
void write_ladder_csv(const SolutionLadder& ladder, std::ostream& out);

struct EpisodeMetrics {
  double duration = 0.0;      // wall time until the last dispatched point, s
  double idle_percent = 0.0;  // ticks below v_idle while work was pending
  double d_min = 0.0;         // horizontal human separation minimum, m
  double v_mean = 0.0;        // path length over duration, m/s
  int stops = 0;
  int morphs = 0;             // ticks on which morphing moved at least one point
  int replans = 0;
  std::vector<double> cycle_durations;  // wall time per dispatched cycle
  bool completed = false;
  long ticks = 0;
};

// Tick-level accumulation behind EpisodeMetrics, separated out so the
// arithmetic is testable without running an episode.
class MetricsAccumulator {
 public:
  MetricsAccumulator(double dt, double v_idle);

  void add_tick(double realized_speed, double separation, bool pending);
  void observe_separation(double separation);
  EpisodeMetrics snapshot() const;  // duration, idle, d_min, v_mean, ticks

 private:
  double dt_;
  double v_idle_;
  long ticks_ = 0;
  long pending_ticks_ = 0;
  long idle_ticks_ = 0;
  double path_length_ = 0.0;
  double d_min_;
};

// State of one control tick as the strategy saw it, before integration. The
// final record of an episode carries the landing state instead.
struct TickRecord {
  double t = 0.0;
  Pose6 pose = Pose6::Zero();
  Vec2 velocity_xy = Vec2::Zero();  // nominal horizontal velocity at the tick
  double speed = 0.0;               // realized speed over the interval ending here
  Vec2 human_xy = Vec2::Zero();
  double d = 0.0;
  double d_physical = 0.0;
  double d_cognitive = 0.0;
  ExecMode mode = ExecMode::running;
  int ladder_index = 0;
  int moved_points = 0;
  std::string event;  // dispatch, stop, replan, complete, timeout; empty otherwise
};

struct EpisodeResult {
  EpisodeMetrics metrics;
  std::vector<TickRecord> ticks;
  std::vector<PacingRecord> pacing;
};

// Runs one episode of the scenario against the trace. Deterministic for a
// fixed (scenario, solution, trace, strategy) tuple. Throws on scenario/trace
// mismatches (such as a pacing strategy with no RR data) before the loop.
EpisodeResult run_episode(const Scenario& scenario, const ScenarioSolution& solution,
                          const Trace& trace, Strategy strategy);

struct StrategySummary {
  Strategy strategy = Strategy::promind;
  int episodes = 0;
  bool all_completed = true;
  double t_mean = 0.0, t_std = 0.0;
  double idle_mean = 0.0, idle_std = 0.0;
  double d_min_mean = 0.0, d_min_std = 0.0;
  double v_mean_mean = 0.0, v_mean_std = 0.0;
  std::string notes;
};

// Runs every strategy over the shared trace set and aggregates the fluency
// metrics (mean and sample standard deviation).
std::vector<StrategySummary> compare_strategies(const Scenario& scenario,
                                                const ScenarioSolution& solution,
                                                const std::vector<Trace>& traces,
                                                const std::vector<Strategy>& strategies);

void write_compare_csv(const std::vector<StrategySummary>& summaries, std::ostream& out);
std::string compare_to_json(const std::vector<StrategySummary>& summaries);

// Episode artifacts on disk: metrics.json, ticks.csv, safety.jsonl, and (for
// the pacing strategy) pacing.csv inside the directory.
void write_run_dir(const EpisodeResult& result, const std::string& dir);

struct RunData {
  EpisodeMetrics metrics;
  std::vector<TickRecord> ticks;
  std::vector<PacingRecord> pacing;
};

RunData load_run_dir(const std::string& dir);

// Tidy per-signal CSV files (position, speed, separation, mode, events,
// pacing, metrics) ready for external plotting.
void write_plot_data(const RunData& run, const std::string& dir);

}  // namespace promind
