#include <algorithm>
#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "promind/log.hpp"
#include "promind/sim.hpp"
#include "text_format.hpp"

namespace promind {

namespace {

using detail::fmt;
using detail::parse_double;
using nlohmann::json;

constexpr double kTimeEps = 1e-9;

// The interval vector is recoverable from any clamped knot vector as the
// differences of the degree..(size-degree-1) breakpoint run.
std::vector<double> intervals_from_knots(const KnotVector& kv) {
  std::vector<double> h;
  const int degree = kv.degree();
  for (int i = degree; i < kv.size() - degree - 1; ++i) h.push_back(kv[i + 1] - kv[i]);
  return h;
}

}  // namespace

double vs_speed_cap(double d, const SafetyThresholds& th) {
  if (!std::isfinite(d)) throw std::invalid_argument("vs cap: separation is not finite");
  if (d <= th.collision_free) return 0.0;
  if (d >= th.social) return kIsoSpeedCap;
  const double phase = (d - th.collision_free) * M_PI / (th.social - th.collision_free);
  const double v = 0.5 * kIsoSpeedCap * (1.0 - std::cos(phase));
  return std::clamp(v, 0.0, kIsoSpeedCap);
}

double emu_speed_cap(double d, double k_emu) {
  if (!std::isfinite(d)) throw std::invalid_argument("emu cap: separation is not finite");
  if (!(k_emu > 0.0)) throw std::invalid_argument("emu cap: slope must be positive");
  return std::max(0.0, k_emu * (d - kEmuOffset));
}

double speed_scale(double cap, double nominal_speed) {
  if (cap < 0.0 || !std::isfinite(cap)) throw std::invalid_argument("speed scale: bad cap");
  if (nominal_speed < 1e-12) return cap > 0.0 ? 1.0 : 0.0;
  return std::min(1.0, cap / nominal_speed);
}

MetricsAccumulator::MetricsAccumulator(double dt, double v_idle)
    : dt_(dt), v_idle_(v_idle), d_min_(std::numeric_limits<double>::infinity()) {
  if (!(dt > 0.0)) throw std::invalid_argument("metrics: dt must be positive");
  if (v_idle < 0.0) throw std::invalid_argument("metrics: v_idle must be >= 0");
}

void MetricsAccumulator::add_tick(double realized_speed, double separation, bool pending) {
  ++ticks_;
  path_length_ += realized_speed * dt_;
  if (pending) {
    ++pending_ticks_;
    if (realized_speed < v_idle_) ++idle_ticks_;
  }
  observe_separation(separation);
}

void MetricsAccumulator::observe_separation(double separation) {
  if (std::isfinite(separation)) d_min_ = std::min(d_min_, separation);
}

EpisodeMetrics MetricsAccumulator::snapshot() const {
  EpisodeMetrics m;
  m.ticks = ticks_;
  m.duration = static_cast<double>(ticks_) * dt_;
  m.v_mean = ticks_ > 0 ? path_length_ / m.duration : 0.0;
  m.idle_percent = pending_ticks_ > 0
                       ? 100.0 * static_cast<double>(idle_ticks_) /
                             static_cast<double>(pending_ticks_)
                       : 0.0;
  m.d_min = std::isfinite(d_min_) ? d_min_ : 0.0;
  return m;
}

namespace {

struct Segment {
  BSplineBundle traj;
  std::vector<Pose6> waypoints;
  std::vector<double> times;  // segment-clock instants at which waypoints are met
  std::vector<double> h;
  int cycle = 0;
  int ladder_index = 0;
  double dispatch_wall = 0.0;  // episode clock at the original cycle dispatch
  bool replanned = false;
};

Segment make_cycle_segment(const Scenario& sc, const ScenarioSolution& sol, int cycle,
                           int index, double wall) {
  const ParetoEntry& entry = sol.cycles[static_cast<std::size_t>(cycle)].ladder.at(index);
  IntervalVector h(entry.h);
  Segment seg{solve_trajectory(sc.cycles[static_cast<std::size_t>(cycle)], h, {}),
              sc.cycles[static_cast<std::size_t>(cycle)].points(),
              waypoint_times(h),
              entry.h,
              cycle,
              index,
              wall,
              false};
  return seg;
}

int dispatch_index(Strategy strategy, const PacingController* pacer, int ladder_size,
                   int nominal) {
  switch (strategy) {
    case Strategy::promind: return pacer->index();
    case Strategy::fixed_min_time: return ladder_size;
    case Strategy::fixed_min_jerk: return 1;
    case Strategy::vs:
    case Strategy::emu:
    case Strategy::no_human: return nominal;
  }
  throw std::logic_error("unhandled strategy");
}

void append_event(std::string& events, const char* name) {
  if (!events.empty()) events += '+';
  events += name;
}

}  // namespace

EpisodeResult run_episode(const Scenario& scenario, const ScenarioSolution& solution,
                          const Trace& trace, Strategy strategy) {
  scenario.validate();
  if (solution.cycles.size() != scenario.cycles.size()) {
    throw std::invalid_argument("solution cycle count does not match the scenario");
  }
  for (std::size_t c = 0; c < solution.cycles.size(); ++c) {
    const SolutionLadder& ladder = solution.cycles[c].ladder;
    if (ladder.size() != scenario.pacing.ladder_size) {
      throw std::invalid_argument("ladder size does not match the pacing configuration");
    }
    for (int i = 1; i <= ladder.size(); ++i) {
      if (static_cast<int>(ladder.at(i).h.size()) != scenario.cycles[c].count() + 1) {
        throw std::invalid_argument("ladder interval count does not match the cycle waypoints");
      }
    }
  }
  if (strategy == Strategy::promind && trace.rr_count() == 0) {
    throw std::invalid_argument("the pacing strategy needs RR samples in the trace");
  }
  // Consecutive dispatches chain end to start; a gap would teleport the
  // end-effector and corrupt the fluency metrics.
  const std::size_t n_cycles = scenario.cycles.size();
  const std::size_t dispatches = n_cycles * static_cast<std::size_t>(scenario.sim.repeat);
  for (std::size_t i = 0; i + 1 < dispatches; ++i) {
    const Pose6& tail = scenario.cycles[i % n_cycles].points().back();
    const Pose6& head = scenario.cycles[(i + 1) % n_cycles].points().front();
    bool continuous = (tail.head<3>() - head.head<3>()).norm() <= 1e-6;
    for (int a = 3; a < 6 && continuous; ++a) {
      continuous = std::abs(wrap_angle(tail[a] - head[a])) <= 1e-6;
    }
    if (!continuous) {
      throw std::invalid_argument(
          "consecutive dispatches are discontinuous: a cycle ends away from the next start");
    }
  }

  const SimConfig& sim = scenario.sim;
  const SafetyThresholds& th = scenario.safety;
  const double dt = 1.0 / sim.tick_rate;

  // Rest baseline calibration from the head of the trace.
  PacingConfig pcfg = scenario.pacing;
  if (strategy == Strategy::promind && sim.calibrate_rr && sim.calibration_duration > 0.0) {
    const double mean = trace.rr_mean_until(sim.calibration_duration);
    if (std::isfinite(mean)) {
      if (mean <= pcfg.rr_stress) {
        throw std::invalid_argument(
            "calibrated rest baseline does not exceed the stress reference");
      }
      pcfg.rr_rest = mean;
      PROMIND_INFO("calibrated rest baseline: %.4f s over the first %.0f s", mean,
                   sim.calibration_duration);
    } else {
      PROMIND_WARN("no RR samples in the calibration segment; keeping the configured baseline");
    }
  }
  pcfg.validate();

  TracePlayer player(trace);
  HumanMonitor monitor(scenario.roi_task, scenario.roi_instructions, scenario.roi_cobot,
                       scenario.effort);
  RRStream rr_stream(pcfg.window);
  PacingController pacer(pcfg, 0.0);
  const int nominal_index = std::clamp(initial_index(pcfg), 1, pcfg.ladder_size);

  std::deque<int> queue;
  for (int rep = 0; rep < sim.repeat; ++rep) {
    for (std::size_t c = 0; c < scenario.cycles.size(); ++c) queue.push_back(static_cast<int>(c));
  }

  EpisodeResult result;
  MetricsAccumulator acc(dt, sim.v_idle);
  int stops = 0, morph_ticks = 0, replans = 0;
  std::vector<double> cycle_durations;

  auto next_segment = [&](double wall) {
    const int cycle = queue.front();
    queue.pop_front();
    const int index = dispatch_index(strategy, &pacer, pcfg.ladder_size, nominal_index);
    return make_cycle_segment(scenario, solution, cycle, index, wall);
  };

  Segment current = next_segment(0.0);
  double tau = 0.0;
  ExecMode mode = ExecMode::running;
  bool resume_armed = false;
  double resume_since = 0.0;
  double last_rr_value = pcfg.rr_rest;
  double last_realized = 0.0;
  std::string pending_event = "dispatch";
  bool done = false;

  for (long k = 0; !done; ++k) {
    const double t = static_cast<double>(k) * dt;
    std::string events;
    std::swap(events, pending_event);

    // Human channels first: everything recorded up to this instant is known.
    for (const TraceSample& row : player.advance_until(t)) {
      MonitorInput input;
      input.t = row.t;
      input.task = row.task;
      input.instructions = row.instructions;
      input.cobot = row.cobot;
      input.instruction_update = row.instruction_update;
      monitor.advance(input);
      if (row.rr) rr_stream.push(row.t, *row.rr);
      if (strategy == Strategy::promind) pacer.observe_stress(row.t, camera_stress(row.rho));
    }
    const Vec2 human_xy = player.latest().human_xy;

    // Live zones, then any pacing windows that closed by now.
    const double attention = monitor.started() ? monitor.attention_cobot() : 0.0;
    const double effort = monitor.started() ? monitor.effort().score : 0.0;
    const SafetyZones zones = scale_zones(attention, effort, th);
    if (strategy == Strategy::promind) {
      while (pacer.window_end() <= t + kTimeEps) {
        const double boundary = pacer.window_end();
        const RRStream::WindowMean wm = rr_stream.mean_at(boundary);
        const double value = std::isfinite(wm.value) ? wm.value : last_rr_value;
        pacer.end_window(boundary, value);
        last_rr_value = value;
      }
    }

    const Pose6 pose = current.traj.eval(tau);
    const Vec6 vel6 = current.traj.eval(tau, 1);
    const Vec2 ee_xy(pose[0], pose[1]);
    const Vec2 vel_xy = vel6.head<2>();
    const double d = (ee_xy - human_xy).norm();

    // Strategy response.
    int moved = 0;
    double scale = 1.0;
    switch (strategy) {
      case Strategy::promind: {
        if (mode == ExecMode::replanning) mode = ExecMode::running;
        if (mode == ExecMode::running) {
          const MorphOutcome mo = morph_path(current.traj, tau, human_xy, zones, th,
                                             scenario.base_xy, sim.morph_rate_limit);
          moved = mo.moved_points;
          if (moved > 0) ++morph_ticks;
          if (check_stop(ee_xy, vel_xy, human_xy, zones.physical, th.beta_threshold) ==
              StopDecision::stop) {
            mode = ExecMode::stopped;
            resume_armed = false;
            ++stops;
            append_event(events, "stop");
          }
        } else if (mode == ExecMode::stopped) {
          if (d >= zones.physical + sim.resume_margin - 1e-12) {
            if (!resume_armed) {
              resume_armed = true;
              resume_since = t;
            }
            if (t - resume_since >= sim.resume_hold - kTimeEps) {
              // Build the resume trajectory through everything not yet visited.
              std::size_t g0 = 0;
              while (g0 < current.times.size() && current.times[g0] <= tau + kTimeEps) ++g0;
              if (g0 == current.times.size()) {
                throw std::logic_error("stopped past the final waypoint");
              }
              ReplanRequest request;
              request.current_pose = pose;
              request.remaining.assign(current.waypoints.begin() + static_cast<long>(g0),
                                       current.waypoints.end());
              request.next_waypoint_index = static_cast<int>(g0);
              request.time_to_next = current.times[g0] - tau;
              BSplineBundle traj =
                  replan_trajectory(request, current.h, scenario.optimizer.min_interval);
              std::vector<double> new_h = intervals_from_knots(traj.knots());
              Segment seg{std::move(traj),
                          {},
                          {},
                          std::move(new_h),
                          current.cycle,
                          current.ladder_index,
                          current.dispatch_wall,
                          true};
              seg.waypoints.reserve(request.remaining.size() + 1);
              seg.waypoints.push_back(request.current_pose);
              seg.waypoints.insert(seg.waypoints.end(), request.remaining.begin(),
                                   request.remaining.end());
              seg.times = waypoint_times(IntervalVector(seg.h));
              current = std::move(seg);
              tau = 0.0;
              mode = ExecMode::replanning;
              ++replans;
              append_event(events, "replan");
            }
          } else {
            resume_armed = false;
          }
        }
        scale = mode == ExecMode::running ? 1.0 : 0.0;
        break;
      }
      case Strategy::vs:
        scale = speed_scale(vs_speed_cap(d, th), vel6.head<3>().norm());
        break;
      case Strategy::emu:
        scale = speed_scale(emu_speed_cap(d, sim.k_emu), vel6.head<3>().norm());
        break;
      case Strategy::fixed_min_time:
      case Strategy::fixed_min_jerk:
      case Strategy::no_human: scale = 1.0; break;
    }

    TickRecord rec;
    rec.t = t;
    rec.pose = pose;
    rec.velocity_xy = vel_xy;
    rec.speed = last_realized;
    rec.human_xy = human_xy;
    rec.d = d;
    rec.d_physical = zones.physical;
    rec.d_cognitive = zones.cognitive;
    rec.mode = strategy == Strategy::promind ? mode : ExecMode::running;
    rec.ladder_index = current.ladder_index;
    rec.moved_points = moved;
    rec.event = events;
    result.ticks.push_back(std::move(rec));

    // Integrate the segment clock; roll over completed dispatches.
    const double wall_next = static_cast<double>(k + 1) * dt;
    double tau_next = tau + scale * dt;
    bool completed_now = false;
    std::string landing_event;
    while (tau_next >= current.traj.end_time() - kTimeEps) {
      const double leftover = tau_next - current.traj.end_time();
      cycle_durations.push_back(wall_next - current.dispatch_wall);
      if (queue.empty()) {
        completed_now = true;
        tau_next = current.traj.end_time();
        landing_event = "complete";
        break;
      }
      current = next_segment(wall_next);
      append_event(pending_event, "dispatch");
      tau_next = std::max(0.0, leftover);
    }
    tau = tau_next;

    const Pose6 new_pose = current.traj.eval(tau);
    const double realized = (new_pose - pose).head<3>().norm() / dt;
    acc.add_tick(realized, d, true);
    acc.observe_separation((new_pose.head<2>() - human_xy).norm());
    last_realized = realized;

    if (!completed_now && wall_next > sim.max_duration + kTimeEps) {
      landing_event = "timeout";
      done = true;
    }
    if (completed_now) done = true;

    if (done) {
      TickRecord final_rec;
      final_rec.t = wall_next;
      final_rec.pose = new_pose;
      final_rec.velocity_xy = Vec2::Zero();
      final_rec.speed = realized;
      final_rec.human_xy = human_xy;
      final_rec.d = (new_pose.head<2>() - human_xy).norm();
      final_rec.d_physical = zones.physical;
      final_rec.d_cognitive = zones.cognitive;
      final_rec.mode = strategy == Strategy::promind ? mode : ExecMode::running;
      final_rec.ladder_index = current.ladder_index;
      final_rec.moved_points = 0;
      final_rec.event = landing_event;
      result.ticks.push_back(std::move(final_rec));
      result.metrics = acc.snapshot();
      result.metrics.completed = completed_now;
      result.metrics.stops = stops;
      result.metrics.morphs = morph_ticks;
      result.metrics.replans = replans;
      result.metrics.cycle_durations = std::move(cycle_durations);
    }
  }
  result.pacing = pacer.history();
  return result;
}

namespace {

double sample_std(const std::vector<double>& values, double mean) {
  if (values.size() < 2) return 0.0;
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

double mean_of(const std::vector<double>& values) {
  double acc = 0.0;
  for (double v : values) acc += v;
  return values.empty() ? 0.0 : acc / static_cast<double>(values.size());
}

}  // namespace

std::vector<StrategySummary> compare_strategies(const Scenario& scenario,
                                                const ScenarioSolution& solution,
                                                const std::vector<Trace>& traces,
                                                const std::vector<Strategy>& strategies) {
  if (traces.empty()) throw std::invalid_argument("compare: no traces");
  if (strategies.empty()) throw std::invalid_argument("compare: no strategies");
  std::vector<StrategySummary> out;
  for (Strategy strategy : strategies) {
    StrategySummary s;
    s.strategy = strategy;
    s.episodes = static_cast<int>(traces.size());
    std::vector<double> t_v, idle_v, dmin_v, vmean_v;
    for (const Trace& trace : traces) {
      const EpisodeResult r = run_episode(scenario, solution, trace, strategy);
      t_v.push_back(r.metrics.duration);
      idle_v.push_back(r.metrics.idle_percent);
      dmin_v.push_back(r.metrics.d_min);
      vmean_v.push_back(r.metrics.v_mean);
      s.all_completed = s.all_completed && r.metrics.completed;
    }
    s.t_mean = mean_of(t_v);
    s.t_std = sample_std(t_v, s.t_mean);
    s.idle_mean = mean_of(idle_v);
    s.idle_std = sample_std(idle_v, s.idle_mean);
    s.d_min_mean = mean_of(dmin_v);
    s.d_min_std = sample_std(dmin_v, s.d_min_mean);
    s.v_mean_mean = mean_of(vmean_v);
    s.v_mean_std = sample_std(vmean_v, s.v_mean_mean);
    if (strategy == Strategy::emu) {
      s.notes = "model-parameter-dependent (k_emu=" + fmt(scenario.sim.k_emu) + ")";
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_compare_csv(const std::vector<StrategySummary>& summaries, std::ostream& out) {
  out << "strategy,episodes,all_completed,T_mean,T_std,idle_percent_mean,idle_percent_std,"
         "d_min_mean,d_min_std,v_mean_mean,v_mean_std,notes\n";
  for (const StrategySummary& s : summaries) {
    std::string row = to_string(s.strategy);
    row += ',';
    row += fmt(s.episodes);
    row += ',';
    row += s.all_completed ? '1' : '0';
    row += ',';
    row += fmt(s.t_mean);
    row += ',';
    row += fmt(s.t_std);
    row += ',';
    row += fmt(s.idle_mean);
    row += ',';
    row += fmt(s.idle_std);
    row += ',';
    row += fmt(s.d_min_mean);
    row += ',';
    row += fmt(s.d_min_std);
    row += ',';
    row += fmt(s.v_mean_mean);
    row += ',';
    row += fmt(s.v_mean_std);
    row += ',';
    row += s.notes;
    row += '\n';
    out << row;
  }
}

std::string compare_to_json(const std::vector<StrategySummary>& summaries) {
  json rows = json::array();
  for (const StrategySummary& s : summaries) {
    rows.push_back({{"strategy", to_string(s.strategy)},
                    {"episodes", s.episodes},
                    {"all_completed", s.all_completed},
                    {"T_mean", s.t_mean},
                    {"T_std", s.t_std},
                    {"idle_percent_mean", s.idle_mean},
                    {"idle_percent_std", s.idle_std},
                    {"d_min_mean", s.d_min_mean},
                    {"d_min_std", s.d_min_std},
                    {"v_mean_mean", s.v_mean_mean},
                    {"v_mean_std", s.v_mean_std},
                    {"notes", s.notes}});
  }
  return rows.dump(2);
}

namespace {

json metrics_to_json(const EpisodeMetrics& m) {
  json cycles = json::array();
  for (double v : m.cycle_durations) cycles.push_back(v);
  return {{"T", m.duration},
          {"idle_percent", m.idle_percent},
          {"d_min", m.d_min},
          {"v_mean", m.v_mean},
          {"stops", m.stops},
          {"morphs", m.morphs},
          {"replans", m.replans},
          {"cycle_durations", std::move(cycles)},
          {"completed", m.completed},
          {"ticks", m.ticks}};
}

EpisodeMetrics metrics_from_json(const json& j) {
  EpisodeMetrics m;
  m.duration = j.at("T").get<double>();
  m.idle_percent = j.at("idle_percent").get<double>();
  m.d_min = j.at("d_min").get<double>();
  m.v_mean = j.at("v_mean").get<double>();
  m.stops = j.at("stops").get<int>();
  m.morphs = j.at("morphs").get<int>();
  m.replans = j.at("replans").get<int>();
  for (const json& v : j.at("cycle_durations")) m.cycle_durations.push_back(v.get<double>());
  m.completed = j.at("completed").get<bool>();
  m.ticks = j.at("ticks").get<long>();
  return m;
}

constexpr const char* kTicksHeader =
    "t,x,y,z,roll,pitch,yaw,vx,vy,speed,human_x,human_y,d,d_physical,d_cognitive,"
    "mode,index,moved_points,event";

constexpr const char* kPacingHeader = "t,rr,branch,delta_rr,delta_camera,delta,index";

void write_ticks_csv(const std::vector<TickRecord>& ticks, std::ostream& out) {
  out << kTicksHeader << '\n';
  std::string row;
  for (const TickRecord& r : ticks) {
    row.clear();
    row += fmt(r.t);
    for (int i = 0; i < 6; ++i) {
      row += ',';
      row += fmt(r.pose[i]);
    }
    row += ',';
    row += fmt(r.velocity_xy.x());
    row += ',';
    row += fmt(r.velocity_xy.y());
    row += ',';
    row += fmt(r.speed);
    row += ',';
    row += fmt(r.human_xy.x());
    row += ',';
    row += fmt(r.human_xy.y());
    row += ',';
    row += fmt(r.d);
    row += ',';
    row += fmt(r.d_physical);
    row += ',';
    row += fmt(r.d_cognitive);
    row += ',';
    row += to_string(r.mode);
    row += ',';
    row += fmt(r.ladder_index);
    row += ',';
    row += fmt(r.moved_points);
    row += ',';
    row += r.event;
    row += '\n';
    out << row;
  }
}

void write_safety_jsonl(const std::vector<TickRecord>& ticks, std::ostream& out) {
  for (const TickRecord& r : ticks) {
    json j = {{"t", r.t},
              {"mode", to_string(r.mode)},
              {"d", r.d},
              {"d_physical", r.d_physical},
              {"d_cognitive", r.d_cognitive},
              {"morphed_points", r.moved_points}};
    if (!r.event.empty()) j["event"] = r.event;
    out << j.dump() << '\n';
  }
}

void write_pacing_csv(const std::vector<PacingRecord>& records, std::ostream& out) {
  out << kPacingHeader << '\n';
  std::string row;
  for (const PacingRecord& r : records) {
    row.clear();
    row += fmt(r.t);
    row += ',';
    row += fmt(r.rr);
    row += ',';
    row += r.branch;
    row += ',';
    row += fmt(r.delta_rr);
    row += ',';
    row += fmt(r.delta_camera);
    row += ',';
    row += fmt(r.delta);
    row += ',';
    row += fmt(r.index);
    row += '\n';
    out << row;
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

}  // namespace

void write_run_dir(const EpisodeResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    auto out = open_out(fs::path(dir) / "metrics.json");
    out << metrics_to_json(result.metrics).dump(2) << '\n';
  }
  {
    auto out = open_out(fs::path(dir) / "ticks.csv");
    write_ticks_csv(result.ticks, out);
  }
  {
    auto out = open_out(fs::path(dir) / "safety.jsonl");
    write_safety_jsonl(result.ticks, out);
  }
  {
    auto out = open_out(fs::path(dir) / "pacing.csv");
    write_pacing_csv(result.pacing, out);
  }
}

RunData load_run_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  RunData run;
  {
    std::ifstream in(fs::path(dir) / "metrics.json");
    if (!in) throw std::invalid_argument("cannot open metrics.json in " + dir);
    json j;
    try {
      in >> j;
      run.metrics = metrics_from_json(j);
    } catch (const json::exception& e) {
      throw std::invalid_argument(std::string("metrics.json: ") + e.what());
    }
  }
  {
    std::ifstream in(fs::path(dir) / "ticks.csv");
    if (!in) throw std::invalid_argument("cannot open ticks.csv in " + dir);
    std::string line;
    if (!std::getline(in, line) || line != kTicksHeader) {
      throw std::invalid_argument("ticks.csv has an unexpected header");
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto cells = split_line(line);
      if (cells.size() != 19) throw std::invalid_argument("ticks.csv row has wrong cell count");
      TickRecord r;
      r.t = parse_double(cells[0], "t");
      for (int i = 0; i < 6; ++i) {
        r.pose[i] = parse_double(cells[static_cast<std::size_t>(1 + i)], "pose");
      }
      r.velocity_xy.x() = parse_double(cells[7], "vx");
      r.velocity_xy.y() = parse_double(cells[8], "vy");
      r.speed = parse_double(cells[9], "speed");
      r.human_xy.x() = parse_double(cells[10], "human_x");
      r.human_xy.y() = parse_double(cells[11], "human_y");
      r.d = parse_double(cells[12], "d");
      r.d_physical = parse_double(cells[13], "d_physical");
      r.d_cognitive = parse_double(cells[14], "d_cognitive");
      r.mode = parse_exec_mode(cells[15]);
      r.ladder_index = static_cast<int>(parse_double(cells[16], "index"));
      r.moved_points = static_cast<int>(parse_double(cells[17], "moved_points"));
      r.event = cells[18];
      run.ticks.push_back(std::move(r));
    }
  }
  {
    std::ifstream in(fs::path(dir) / "pacing.csv");
    if (in) {
      std::string line;
      if (!std::getline(in, line) || line != kPacingHeader) {
        throw std::invalid_argument("pacing.csv has an unexpected header");
      }
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != 7) throw std::invalid_argument("pacing.csv row has wrong cell count");
        PacingRecord r;
        r.t = parse_double(cells[0], "t");
        r.rr = parse_double(cells[1], "rr");
        if (cells[2].size() != 1) throw std::invalid_argument("pacing.csv branch must be a char");
        r.branch = cells[2][0];
        r.delta_rr = parse_double(cells[3], "delta_rr");
        r.delta_camera = static_cast<int>(parse_double(cells[4], "delta_camera"));
        r.delta = static_cast<int>(parse_double(cells[5], "delta"));
        r.index = static_cast<int>(parse_double(cells[6], "index"));
        run.pacing.push_back(r);
      }
    }
  }
  return run;
}

void write_plot_data(const RunData& run, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    auto out = open_out(fs::path(dir) / "position.csv");
    out << "t,x,y,z\n";
    for (const TickRecord& r : run.ticks) {
      out << fmt(r.t) << ',' << fmt(r.pose[0]) << ',' << fmt(r.pose[1]) << ','
          << fmt(r.pose[2]) << '\n';
    }
  }
  {
    auto out = open_out(fs::path(dir) / "speed.csv");
    out << "t,speed\n";
    for (const TickRecord& r : run.ticks) out << fmt(r.t) << ',' << fmt(r.speed) << '\n';
  }
  {
    auto out = open_out(fs::path(dir) / "separation.csv");
    out << "t,d,d_physical,d_cognitive\n";
    for (const TickRecord& r : run.ticks) {
      out << fmt(r.t) << ',' << fmt(r.d) << ',' << fmt(r.d_physical) << ','
          << fmt(r.d_cognitive) << '\n';
    }
  }
  {
    auto out = open_out(fs::path(dir) / "mode.csv");
    out << "t,mode,index,moved_points\n";
    for (const TickRecord& r : run.ticks) {
      out << fmt(r.t) << ',' << to_string(r.mode) << ',' << fmt(r.ladder_index) << ','
          << fmt(r.moved_points) << '\n';
    }
  }
  {
    auto out = open_out(fs::path(dir) / "events.csv");
    out << "t,event\n";
    for (const TickRecord& r : run.ticks) {
      if (!r.event.empty()) out << fmt(r.t) << ',' << r.event << '\n';
    }
  }
  {
    auto out = open_out(fs::path(dir) / "pacing.csv");
    write_pacing_csv(run.pacing, out);
  }
  {
    auto out = open_out(fs::path(dir) / "metrics.csv");
    out << "metric,value\n";
    const EpisodeMetrics& m = run.metrics;
    out << "T," << fmt(m.duration) << '\n';
    out << "idle_percent," << fmt(m.idle_percent) << '\n';
    out << "d_min," << fmt(m.d_min) << '\n';
    out << "v_mean," << fmt(m.v_mean) << '\n';
    out << "stops," << fmt(m.stops) << '\n';
    out << "morphs," << fmt(m.morphs) << '\n';
    out << "replans," << fmt(m.replans) << '\n';
    out << "completed," << (m.completed ? '1' : '0') << '\n';
    out << "ticks," << fmt(m.ticks) << '\n';
    for (std::size_t i = 0; i < m.cycle_durations.size(); ++i) {
      out << "cycle_" << fmt(static_cast<int>(i + 1)) << "_duration,"
          << fmt(m.cycle_durations[i]) << '\n';
    }
  }
}

}  // namespace promind
