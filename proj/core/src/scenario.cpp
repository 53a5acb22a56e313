#include <cmath>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "promind/log.hpp"
#include "promind/sim.hpp"
#include "text_format.hpp"

namespace promind {

namespace {

using detail::fmt;
using nlohmann::json;

void check_keys(const json& j, const char* what, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw std::invalid_argument(std::string(what) + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument(std::string(what) + ": unknown key '" + it.key() + "'");
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

Vec6 parse_vec6(const json& j, const char* what) {
  if (j.is_number()) return Vec6::Constant(j.get<double>());
  if (j.is_array() && j.size() == 6) {
    Vec6 v;
    for (int i = 0; i < 6; ++i) v[i] = j[static_cast<std::size_t>(i)].get<double>();
    return v;
  }
  throw std::invalid_argument(std::string(what) + " must be a number or an array of 6");
}

json vec6_to_json(const Vec6& v) {
  json out = json::array();
  for (int i = 0; i < 6; ++i) out.push_back(v[i]);
  return out;
}

RoIGeometry parse_roi(const json& j, const char* what) {
  check_keys(j, what, {"width", "height", "gamma"});
  RoIGeometry roi;
  read(j, "width", roi.width);
  read(j, "height", roi.height);
  read(j, "gamma", roi.gamma);
  return roi;
}

json roi_to_json(const RoIGeometry& roi) {
  return {{"width", roi.width}, {"height", roi.height}, {"gamma", roi.gamma}};
}

ParetoEntry entry_from_json(const json& j, const char* what) {
  check_keys(j, what, {"index", "f_time", "f_jerk", "h"});
  ParetoEntry e;
  e.f_time = j.at("f_time").get<double>();
  e.f_jerk = j.at("f_jerk").get<double>();
  const json& h = j.at("h");
  if (!h.is_array() || h.empty()) {
    throw std::invalid_argument(std::string(what) + ": h must be a non-empty array");
  }
  for (const json& v : h) e.h.push_back(v.get<double>());
  return e;
}

json entry_to_json(const ParetoEntry& e) {
  json h = json::array();
  for (double v : e.h) h.push_back(v);
  return {{"f_time", e.f_time}, {"f_jerk", e.f_jerk}, {"h", std::move(h)}};
}

}  // namespace

Strategy parse_strategy(const std::string& name) {
  if (name == "promind") return Strategy::promind;
  if (name == "vs") return Strategy::vs;
  if (name == "emu") return Strategy::emu;
  if (name == "fixed-min-time") return Strategy::fixed_min_time;
  if (name == "fixed-min-jerk") return Strategy::fixed_min_jerk;
  if (name == "no-human") return Strategy::no_human;
  throw std::invalid_argument("unknown strategy '" + name +
                              "' (expected promind, vs, emu, fixed-min-time, "
                              "fixed-min-jerk, or no-human)");
}

std::string to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::promind: return "promind";
    case Strategy::vs: return "vs";
    case Strategy::emu: return "emu";
    case Strategy::fixed_min_time: return "fixed-min-time";
    case Strategy::fixed_min_jerk: return "fixed-min-jerk";
    case Strategy::no_human: return "no-human";
  }
  throw std::logic_error("unhandled strategy");
}

std::string to_string(ExecMode mode) {
  switch (mode) {
    case ExecMode::running: return "running";
    case ExecMode::stopped: return "stopped";
    case ExecMode::replanning: return "replanning";
  }
  throw std::logic_error("unhandled execution mode");
}

ExecMode parse_exec_mode(const std::string& name) {
  if (name == "running") return ExecMode::running;
  if (name == "stopped") return ExecMode::stopped;
  if (name == "replanning") return ExecMode::replanning;
  throw std::invalid_argument("unknown execution mode '" + name + "'");
}

void SimConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  auto at_least_zero = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!positive(tick_rate)) throw std::invalid_argument("sim: tick_rate must be positive");
  if (!at_least_zero(v_idle)) throw std::invalid_argument("sim: v_idle must be >= 0");
  if (!positive(k_emu)) throw std::invalid_argument("sim: k_emu must be positive");
  if (!positive(morph_rate_limit)) {
    throw std::invalid_argument("sim: morph_rate_limit must be positive");
  }
  if (!at_least_zero(resume_margin)) {
    throw std::invalid_argument("sim: resume_margin must be >= 0");
  }
  if (!at_least_zero(resume_hold)) throw std::invalid_argument("sim: resume_hold must be >= 0");
  if (!positive(max_duration)) throw std::invalid_argument("sim: max_duration must be positive");
  if (!at_least_zero(calibration_duration)) {
    throw std::invalid_argument("sim: calibration_duration must be >= 0");
  }
  if (repeat < 1) throw std::invalid_argument("sim: repeat must be >= 1");
}

void Scenario::validate() const {
  if (cycles.empty()) throw std::invalid_argument("scenario: no waypoint cycles");
  for (const WaypointList& cycle : cycles) {
    if (cycle.count() < 2) {
      throw std::invalid_argument("scenario: every cycle needs at least two waypoints");
    }
  }
  limits.validate();
  safety.validate();
  pacing.validate();
  optimizer.validate();
  roi_task.validate();
  roi_instructions.validate();
  roi_cobot.validate();
  effort.validate();
  sim.validate();
  if (!base_xy.allFinite()) throw std::invalid_argument("scenario: base position is not finite");
  for (const WaypointList& cycle : cycles) {
    for (const Pose6& p : cycle.points()) {
      const double r = (Vec2(p[0], p[1]) - base_xy).norm();
      if (r > safety.reach_max + 1e-9) {
        PROMIND_WARN("scenario: waypoint at horizontal radius %.3f exceeds reach %.3f", r,
                     safety.reach_max);
      }
    }
  }
}

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario: ") + e.what());
  }
  try {
    check_keys(j, "scenario",
               {"cycles", "limits", "safety", "pacing", "optimizer", "roi", "effort", "base",
                "sim", "strategy"});
    Scenario sc;
    const json& jc = j.at("cycles");
    if (!jc.is_array() || jc.empty()) {
      throw std::invalid_argument("scenario: cycles must be a non-empty array");
    }
    for (const json& e : jc) {
      const json* wps = &e;
      if (e.is_object()) {
        check_keys(e, "cycle", {"waypoints"});
        wps = &e.at("waypoints");
      }
      if (!wps->is_array() || wps->size() < 2) {
        throw std::invalid_argument("scenario: a cycle needs at least two waypoints");
      }
      std::vector<Pose6> points;
      for (const json& p : *wps) {
        if (!p.is_array() || p.size() != 6) {
          throw std::invalid_argument("scenario: waypoints must be arrays of 6");
        }
        Pose6 pose;
        for (int i = 0; i < 6; ++i) pose[i] = p[static_cast<std::size_t>(i)].get<double>();
        points.push_back(pose);
      }
      sc.cycles.emplace_back(std::move(points));
    }
    if (j.contains("limits")) {
      const json& jl = j.at("limits");
      check_keys(jl, "limits", {"velocity", "acceleration", "jerk"});
      if (jl.contains("velocity")) sc.limits.velocity = parse_vec6(jl.at("velocity"), "velocity");
      if (jl.contains("acceleration")) {
        sc.limits.acceleration = parse_vec6(jl.at("acceleration"), "acceleration");
      }
      if (jl.contains("jerk")) sc.limits.jerk = parse_vec6(jl.at("jerk"), "jerk");
    }
    if (j.contains("safety")) {
      const json& js = j.at("safety");
      check_keys(js, "safety",
                 {"collision_free", "conservative", "social", "self_collision",
                  "beta_threshold", "reach_max"});
      read(js, "collision_free", sc.safety.collision_free);
      read(js, "conservative", sc.safety.conservative);
      read(js, "social", sc.safety.social);
      read(js, "self_collision", sc.safety.self_collision);
      read(js, "beta_threshold", sc.safety.beta_threshold);
      read(js, "reach_max", sc.safety.reach_max);
    }
    if (j.contains("pacing")) {
      const json& jp = j.at("pacing");
      check_keys(jp, "pacing",
                 {"delta_rest_to_stress", "delta_stress_to_rest", "rho_threshold", "rr_rest",
                  "rr_stress", "sigma_rest", "sigma_stress", "rr_guard", "ladder_size",
                  "window", "camera_cutoff"});
      read(jp, "delta_rest_to_stress", sc.pacing.delta_rest_to_stress);
      read(jp, "delta_stress_to_rest", sc.pacing.delta_stress_to_rest);
      read(jp, "rho_threshold", sc.pacing.rho_threshold);
      read(jp, "rr_rest", sc.pacing.rr_rest);
      read(jp, "rr_stress", sc.pacing.rr_stress);
      read(jp, "sigma_rest", sc.pacing.sigma_rest);
      read(jp, "sigma_stress", sc.pacing.sigma_stress);
      if (jp.contains("rr_guard") && !jp.at("rr_guard").is_null()) {
        sc.pacing.rr_guard = jp.at("rr_guard").get<double>();
      }
      read(jp, "ladder_size", sc.pacing.ladder_size);
      read(jp, "window", sc.pacing.window);
      read(jp, "camera_cutoff", sc.pacing.camera_cutoff);
    }
    if (j.contains("optimizer")) {
      const json& jo = j.at("optimizer");
      check_keys(jo, "optimizer",
                 {"population", "generations", "seed", "h_max", "min_interval",
                  "crossover_probability", "crossover_eta", "mutation_eta",
                  "mutation_probability"});
      read(jo, "population", sc.optimizer.population);
      read(jo, "generations", sc.optimizer.generations);
      read(jo, "seed", sc.optimizer.seed);
      read(jo, "h_max", sc.optimizer.h_max);
      read(jo, "min_interval", sc.optimizer.min_interval);
      read(jo, "crossover_probability", sc.optimizer.crossover_probability);
      read(jo, "crossover_eta", sc.optimizer.crossover_eta);
      read(jo, "mutation_eta", sc.optimizer.mutation_eta);
      read(jo, "mutation_probability", sc.optimizer.mutation_probability);
    }
    if (j.contains("roi")) {
      const json& jr = j.at("roi");
      check_keys(jr, "roi", {"task", "instructions", "cobot"});
      if (jr.contains("task")) sc.roi_task = parse_roi(jr.at("task"), "roi.task");
      if (jr.contains("instructions")) {
        sc.roi_instructions = parse_roi(jr.at("instructions"), "roi.instructions");
      }
      if (jr.contains("cobot")) sc.roi_cobot = parse_roi(jr.at("cobot"), "roi.cobot");
    }
    if (j.contains("effort")) {
      const json& je = j.at("effort");
      check_keys(je, "effort",
                 {"wariness_norm", "learning_norm", "instruction_norm", "wariness_weight",
                  "learning_weight", "instruction_weight", "check_threshold", "check_debounce",
                  "instruction_exclusion", "focus_floor", "gaze_hold", "gaze_decay"});
      read(je, "wariness_norm", sc.effort.wariness_norm);
      read(je, "learning_norm", sc.effort.learning_norm);
      read(je, "instruction_norm", sc.effort.instruction_norm);
      read(je, "wariness_weight", sc.effort.wariness_weight);
      read(je, "learning_weight", sc.effort.learning_weight);
      read(je, "instruction_weight", sc.effort.instruction_weight);
      read(je, "check_threshold", sc.effort.check_threshold);
      read(je, "check_debounce", sc.effort.check_debounce);
      read(je, "instruction_exclusion", sc.effort.instruction_exclusion);
      read(je, "focus_floor", sc.effort.focus_floor);
      read(je, "gaze_hold", sc.effort.gaze_hold);
      read(je, "gaze_decay", sc.effort.gaze_decay);
    }
    if (j.contains("base")) {
      const json& jb = j.at("base");
      if (!jb.is_array() || jb.size() != 2) {
        throw std::invalid_argument("scenario: base must be an array of 2");
      }
      sc.base_xy.x() = jb[0].get<double>();
      sc.base_xy.y() = jb[1].get<double>();
    }
    if (j.contains("sim")) {
      const json& js = j.at("sim");
      check_keys(js, "sim",
                 {"tick_rate", "v_idle", "k_emu", "morph_rate_limit", "resume_margin",
                  "resume_hold", "max_duration", "calibrate_rr", "calibration_duration",
                  "repeat"});
      read(js, "tick_rate", sc.sim.tick_rate);
      read(js, "v_idle", sc.sim.v_idle);
      read(js, "k_emu", sc.sim.k_emu);
      read(js, "morph_rate_limit", sc.sim.morph_rate_limit);
      read(js, "resume_margin", sc.sim.resume_margin);
      read(js, "resume_hold", sc.sim.resume_hold);
      read(js, "max_duration", sc.sim.max_duration);
      read(js, "calibrate_rr", sc.sim.calibrate_rr);
      read(js, "calibration_duration", sc.sim.calibration_duration);
      read(js, "repeat", sc.sim.repeat);
    }
    if (j.contains("strategy")) sc.strategy = parse_strategy(j.at("strategy").get<std::string>());
    sc.validate();
    return sc;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scenario: ") + e.what());
  }
}

std::string scenario_to_json(const Scenario& scenario) {
  json j;
  json cycles = json::array();
  for (const WaypointList& cycle : scenario.cycles) {
    json wps = json::array();
    for (const Pose6& p : cycle.points()) wps.push_back(vec6_to_json(p));
    cycles.push_back({{"waypoints", std::move(wps)}});
  }
  j["cycles"] = std::move(cycles);
  j["limits"] = {{"velocity", vec6_to_json(scenario.limits.velocity)},
                 {"acceleration", vec6_to_json(scenario.limits.acceleration)},
                 {"jerk", vec6_to_json(scenario.limits.jerk)}};
  j["safety"] = {{"collision_free", scenario.safety.collision_free},
                 {"conservative", scenario.safety.conservative},
                 {"social", scenario.safety.social},
                 {"self_collision", scenario.safety.self_collision},
                 {"beta_threshold", scenario.safety.beta_threshold},
                 {"reach_max", scenario.safety.reach_max}};
  j["pacing"] = {{"delta_rest_to_stress", scenario.pacing.delta_rest_to_stress},
                 {"delta_stress_to_rest", scenario.pacing.delta_stress_to_rest},
                 {"rho_threshold", scenario.pacing.rho_threshold},
                 {"rr_rest", scenario.pacing.rr_rest},
                 {"rr_stress", scenario.pacing.rr_stress},
                 {"sigma_rest", scenario.pacing.sigma_rest},
                 {"sigma_stress", scenario.pacing.sigma_stress},
                 {"rr_guard", scenario.pacing.rr_guard < 0.0 ? json(nullptr)
                                                             : json(scenario.pacing.rr_guard)},
                 {"ladder_size", scenario.pacing.ladder_size},
                 {"window", scenario.pacing.window},
                 {"camera_cutoff", scenario.pacing.camera_cutoff}};
  j["optimizer"] = {{"population", scenario.optimizer.population},
                    {"generations", scenario.optimizer.generations},
                    {"seed", scenario.optimizer.seed},
                    {"h_max", scenario.optimizer.h_max},
                    {"min_interval", scenario.optimizer.min_interval},
                    {"crossover_probability", scenario.optimizer.crossover_probability},
                    {"crossover_eta", scenario.optimizer.crossover_eta},
                    {"mutation_eta", scenario.optimizer.mutation_eta},
                    {"mutation_probability", scenario.optimizer.mutation_probability}};
  j["roi"] = {{"task", roi_to_json(scenario.roi_task)},
              {"instructions", roi_to_json(scenario.roi_instructions)},
              {"cobot", roi_to_json(scenario.roi_cobot)}};
  j["effort"] = {{"wariness_norm", scenario.effort.wariness_norm},
                 {"learning_norm", scenario.effort.learning_norm},
                 {"instruction_norm", scenario.effort.instruction_norm},
                 {"wariness_weight", scenario.effort.wariness_weight},
                 {"learning_weight", scenario.effort.learning_weight},
                 {"instruction_weight", scenario.effort.instruction_weight},
                 {"check_threshold", scenario.effort.check_threshold},
                 {"check_debounce", scenario.effort.check_debounce},
                 {"instruction_exclusion", scenario.effort.instruction_exclusion},
                 {"focus_floor", scenario.effort.focus_floor},
                 {"gaze_hold", scenario.effort.gaze_hold},
                 {"gaze_decay", scenario.effort.gaze_decay}};
  j["base"] = {scenario.base_xy.x(), scenario.base_xy.y()};
  j["sim"] = {{"tick_rate", scenario.sim.tick_rate},
              {"v_idle", scenario.sim.v_idle},
              {"k_emu", scenario.sim.k_emu},
              {"morph_rate_limit", scenario.sim.morph_rate_limit},
              {"resume_margin", scenario.sim.resume_margin},
              {"resume_hold", scenario.sim.resume_hold},
              {"max_duration", scenario.sim.max_duration},
              {"calibrate_rr", scenario.sim.calibrate_rr},
              {"calibration_duration", scenario.sim.calibration_duration},
              {"repeat", scenario.sim.repeat}};
  j["strategy"] = to_string(scenario.strategy);
  return j.dump(2);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

ScenarioSolution optimize_scenario(const Scenario& scenario) {
  scenario.validate();
  ScenarioSolution solution;
  for (std::size_t c = 0; c < scenario.cycles.size(); ++c) {
    OptimizerConfig cfg = scenario.optimizer;
    // Decorrelate cycles while keeping the whole solution a pure function of
    // the scenario seed.
    cfg.seed = scenario.optimizer.seed + 1000003ULL * c;
    std::vector<ParetoEntry> front =
        optimize_front(scenario.cycles[c], BoundaryConditions{}, scenario.limits, cfg);
    SolutionLadder ladder = downsample_ladder(front, scenario.pacing.ladder_size);
    solution.cycles.push_back(CycleSolution{std::move(front), std::move(ladder)});
  }
  return solution;
}

std::string solution_to_json(const ScenarioSolution& solution) {
  json cycles = json::array();
  for (const CycleSolution& cs : solution.cycles) {
    json front = json::array();
    for (const ParetoEntry& e : cs.front) front.push_back(entry_to_json(e));
    json ladder = json::array();
    for (int i = 1; i <= cs.ladder.size(); ++i) {
      json e = entry_to_json(cs.ladder.at(i));
      e["index"] = i;
      ladder.push_back(std::move(e));
    }
    cycles.push_back({{"front", std::move(front)}, {"ladder", std::move(ladder)}});
  }
  return json{{"cycles", std::move(cycles)}}.dump(2);
}

ScenarioSolution solution_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("solution: ") + e.what());
  }
  try {
    check_keys(j, "solution", {"cycles"});
    const json& jc = j.at("cycles");
    if (!jc.is_array() || jc.empty()) {
      throw std::invalid_argument("solution: cycles must be a non-empty array");
    }
    ScenarioSolution solution;
    for (const json& c : jc) {
      check_keys(c, "solution cycle", {"front", "ladder"});
      std::vector<ParetoEntry> front;
      for (const json& e : c.at("front")) front.push_back(entry_from_json(e, "front entry"));
      std::vector<ParetoEntry> entries;
      int expected = 1;
      for (const json& e : c.at("ladder")) {
        if (e.contains("index") && e.at("index").get<int>() != expected) {
          throw std::invalid_argument("solution: ladder indices must be 1..n in order");
        }
        ++expected;
        entries.push_back(entry_from_json(e, "ladder entry"));
      }
      solution.cycles.push_back(
          CycleSolution{std::move(front), SolutionLadder(std::move(entries))});
    }
    return solution;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("solution: ") + e.what());
  }
}

ScenarioSolution load_solution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open solution file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return solution_from_json(buf.str());
}

void write_ladder_csv(const SolutionLadder& ladder, std::ostream& out) {
  const std::size_t legs = ladder.at(1).h.size();
  std::string header = "index,f_time,f_jerk";
  for (std::size_t g = 1; g <= legs; ++g) {
    header += ",h_";
    header += fmt(static_cast<int>(g));
  }
  out << header << '\n';
  for (int i = 1; i <= ladder.size(); ++i) {
    const ParetoEntry& e = ladder.at(i);
    if (e.h.size() != legs) {
      throw std::invalid_argument("ladder entries disagree on interval count");
    }
    std::string row = fmt(i);
    row += ',';
    row += fmt(e.f_time);
    row += ',';
    row += fmt(e.f_jerk);
    for (double v : e.h) {
      row += ',';
      row += fmt(v);
    }
    out << row << '\n';
  }
}

}  // namespace promind
