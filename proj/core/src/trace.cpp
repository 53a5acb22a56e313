#include "promind/trace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "text_format.hpp"

namespace promind {

namespace {

using detail::DetRng;
using detail::fmt;
using detail::parse_double;
using nlohmann::json;

constexpr const char* kCsvHeader =
    "t, human_x, human_y, human_z, theta_task, phi_task, r_task, "
    "theta_instr, phi_instr, r_instr, theta_cobot, phi_cobot, r_cobot, "
    "rr, rho, instr_update";

const std::array<const char*, 16> kCsvColumns = {
    "t",          "human_x",   "human_y",    "human_z",
    "theta_task", "phi_task",  "r_task",     "theta_instr",
    "phi_instr",  "r_instr",   "theta_cobot", "phi_cobot",
    "r_cobot",    "rr",        "rho",        "instr_update"};

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

void require_finite(double v, const char* what, int line_no) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " is not finite at trace line " +
                                fmt(line_no));
  }
}

std::optional<GazeSample> parse_gaze_cells(const std::string& theta, const std::string& phi,
                                           const std::string& r, const char* region,
                                           int line_no) {
  const bool e0 = theta.empty(), e1 = phi.empty(), e2 = r.empty();
  if (e0 && e1 && e2) return std::nullopt;
  if (e0 || e1 || e2) {
    throw std::invalid_argument(std::string("gaze fields for ") + region +
                                " must be all present or all empty at trace line " +
                                fmt(line_no));
  }
  GazeSample g;
  g.azimuth = parse_double(theta, region);
  g.elevation = parse_double(phi, region);
  g.distance = parse_double(r, region);
  return g;
}

void append_gaze_cells(std::string& out, const std::optional<GazeSample>& gaze) {
  if (gaze) {
    out += fmt(gaze->azimuth);
    out += ',';
    out += fmt(gaze->elevation);
    out += ',';
    out += fmt(gaze->distance);
  } else {
    out += ",,";
  }
}

json gaze_to_json(const std::optional<GazeSample>& gaze) {
  if (!gaze) return nullptr;
  return json::array({gaze->azimuth, gaze->elevation, gaze->distance});
}

std::optional<GazeSample> gaze_from_json(const json& j, const char* region, int line_no) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_array() || j.size() != 3) {
    throw std::invalid_argument(std::string(region) +
                                " must be null or an array of 3 at trace line " +
                                fmt(line_no));
  }
  GazeSample g;
  g.azimuth = j[0].get<double>();
  g.elevation = j[1].get<double>();
  g.distance = j[2].get<double>();
  return g;
}

}  // namespace

Trace::Trace(std::vector<TraceSample> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) throw std::invalid_argument("trace has no samples");
  if (samples_.front().t < 0.0) throw std::invalid_argument("trace starts before t = 0");
  double prev = -1.0;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const TraceSample& s = samples_[i];
    if (!std::isfinite(s.t) || (i > 0 && s.t <= prev)) {
      throw std::invalid_argument("trace timestamps must be finite and strictly increasing");
    }
    prev = s.t;
    if (!s.human_xy.allFinite() || !std::isfinite(s.human_z)) {
      throw std::invalid_argument("trace human position is not finite");
    }
    if (s.rr) {
      if (!(*s.rr > 0.0) || !std::isfinite(*s.rr)) {
        throw std::invalid_argument("trace RR values must be positive and finite");
      }
      ++rr_count_;
    }
    if (!std::isfinite(s.rho)) throw std::invalid_argument("trace rho is not finite");
  }
}

double Trace::rr_mean_until(double t_end) const {
  double sum = 0.0;
  int n = 0;
  for (const TraceSample& s : samples_) {
    if (s.t > t_end) break;
    if (s.rr) {
      sum += *s.rr;
      ++n;
    }
  }
  return n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

TracePlayer::TracePlayer(const Trace& trace) : trace_(trace) {
  const auto& rows = trace_.samples();
  const double span = rows.back().t - rows.front().t;
  const double mean_gap =
      rows.size() > 1 ? span / static_cast<double>(rows.size() - 1) : 1.0;
  period_ = span + std::max(mean_gap, 1e-6);
  latest_ = rows.front();
}

std::vector<TraceSample> TracePlayer::advance_until(double t) {
  std::vector<TraceSample> out;
  const auto& rows = trace_.samples();
  while (true) {
    if (cursor_ == rows.size()) {
      cursor_ = 0;
      offset_ += period_;
    }
    TraceSample s = rows[cursor_];
    s.t += offset_;
    if (s.t > t) break;
    out.push_back(s);
    latest_ = s;
    ++cursor_;
  }
  return out;
}

Trace read_trace_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  do {
    if (!std::getline(in, line)) throw std::invalid_argument("trace CSV is empty");
    ++line_no;
    line = trim(line);
  } while (line.empty());

  const auto header = split_csv(line);
  if (header.size() != kCsvColumns.size()) {
    throw std::invalid_argument("trace CSV header has " + fmt(static_cast<int>(header.size())) +
                                " columns, expected 16");
  }
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
    if (header[i] != kCsvColumns[i]) {
      throw std::invalid_argument("trace CSV column " + fmt(static_cast<int>(i + 1)) +
                                  " is '" + header[i] + "', expected '" + kCsvColumns[i] + "'");
    }
  }

  std::vector<TraceSample> samples;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto cells = split_csv(stripped);
    if (cells.size() != kCsvColumns.size()) {
      throw std::invalid_argument("trace line " + fmt(line_no) + " has " +
                                  fmt(static_cast<int>(cells.size())) + " cells, expected 16");
    }
    TraceSample s;
    s.t = parse_double(cells[0], "t");
    s.human_xy.x() = parse_double(cells[1], "human_x");
    s.human_xy.y() = parse_double(cells[2], "human_y");
    s.human_z = parse_double(cells[3], "human_z");
    require_finite(s.t, "t", line_no);
    s.task = parse_gaze_cells(cells[4], cells[5], cells[6], "task", line_no);
    s.instructions = parse_gaze_cells(cells[7], cells[8], cells[9], "instructions", line_no);
    s.cobot = parse_gaze_cells(cells[10], cells[11], cells[12], "cobot", line_no);
    if (!cells[13].empty()) s.rr = parse_double(cells[13], "rr");
    s.rho = cells[14].empty() ? 0.0 : parse_double(cells[14], "rho");
    if (!cells[15].empty()) {
      if (cells[15] != "0" && cells[15] != "1") {
        throw std::invalid_argument("instr_update must be 0 or 1 at trace line " + fmt(line_no));
      }
      s.instruction_update = cells[15] == "1";
    }
    samples.push_back(std::move(s));
  }
  return Trace(std::move(samples));
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
  out << kCsvHeader << '\n';
  std::string row;
  for (const TraceSample& s : trace.samples()) {
    row.clear();
    row += fmt(s.t);
    row += ',';
    row += fmt(s.human_xy.x());
    row += ',';
    row += fmt(s.human_xy.y());
    row += ',';
    row += fmt(s.human_z);
    row += ',';
    append_gaze_cells(row, s.task);
    row += ',';
    append_gaze_cells(row, s.instructions);
    row += ',';
    append_gaze_cells(row, s.cobot);
    row += ',';
    if (s.rr) row += fmt(*s.rr);
    row += ',';
    row += fmt(s.rho);
    row += ',';
    row += s.instruction_update ? '1' : '0';
    row += '\n';
    out << row;
  }
}

Trace read_trace_jsonl(std::istream& in) {
  std::vector<TraceSample> samples;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    json j;
    try {
      j = json::parse(stripped);
    } catch (const json::parse_error& e) {
      throw std::invalid_argument("trace line " + fmt(line_no) + ": " + e.what());
    }
    if (!j.is_object()) {
      throw std::invalid_argument("trace line " + fmt(line_no) + " is not an object");
    }
    TraceSample s;
    if (!j.contains("t") || !j.contains("human")) {
      throw std::invalid_argument("trace line " + fmt(line_no) + " lacks t or human");
    }
    s.t = j["t"].get<double>();
    const json& h = j["human"];
    if (!h.is_array() || h.size() != 3) {
      throw std::invalid_argument("human must be an array of 3 at trace line " + fmt(line_no));
    }
    s.human_xy.x() = h[0].get<double>();
    s.human_xy.y() = h[1].get<double>();
    s.human_z = h[2].get<double>();
    s.task = gaze_from_json(j.value("task", json()), "task", line_no);
    s.instructions = gaze_from_json(j.value("instr", json()), "instr", line_no);
    s.cobot = gaze_from_json(j.value("cobot", json()), "cobot", line_no);
    if (j.contains("rr") && !j["rr"].is_null()) s.rr = j["rr"].get<double>();
    s.rho = j.value("rho", 0.0);
    const json& u = j.value("instr_update", json(0));
    s.instruction_update = u.is_boolean() ? u.get<bool>() : u.get<int>() != 0;
    samples.push_back(std::move(s));
  }
  return Trace(std::move(samples));
}

void write_trace_jsonl(const Trace& trace, std::ostream& out) {
  for (const TraceSample& s : trace.samples()) {
    json j;
    j["t"] = s.t;
    j["human"] = {s.human_xy.x(), s.human_xy.y(), s.human_z};
    j["task"] = gaze_to_json(s.task);
    j["instr"] = gaze_to_json(s.instructions);
    j["cobot"] = gaze_to_json(s.cobot);
    j["rr"] = s.rr ? json(*s.rr) : json(nullptr);
    j["rho"] = s.rho;
    j["instr_update"] = s.instruction_update ? 1 : 0;
    out << j.dump() << '\n';
  }
}

namespace {

bool is_jsonl_path(const std::string& path) {
  const auto ext = std::filesystem::path(path).extension().string();
  return ext == ".jsonl" || ext == ".ndjson";
}

}  // namespace

Trace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open trace file " + path);
  return is_jsonl_path(path) ? read_trace_jsonl(in) : read_trace_csv(in);
}

void save_trace(const Trace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write trace file " + path);
  if (is_jsonl_path(path)) {
    write_trace_jsonl(trace, out);
  } else {
    write_trace_csv(trace, out);
  }
  if (!out.good()) throw std::runtime_error("failed writing trace file " + path);
}

TraceProfile parse_trace_profile(const std::string& name) {
  if (name == "calm") return TraceProfile::calm;
  if (name == "intrusive") return TraceProfile::intrusive;
  if (name == "stressed") return TraceProfile::stressed;
  throw std::invalid_argument("unknown trace profile '" + name +
                              "' (expected calm, intrusive, or stressed)");
}

std::string to_string(TraceProfile profile) {
  switch (profile) {
    case TraceProfile::calm: return "calm";
    case TraceProfile::intrusive: return "intrusive";
    case TraceProfile::stressed: return "stressed";
  }
  throw std::logic_error("unhandled trace profile");
}

namespace {

// Half-open [start, end) activity windows, e.g. glances or camera spikes.
struct Window {
  double start;
  double end;
  double value = 0.0;

  bool contains(double t) const { return t >= start && t < end; }
};

std::vector<Window> schedule_windows(DetRng& rng, double duration, double first_lo,
                                     double first_hi, double gap_lo, double gap_hi,
                                     double len_lo, double len_hi) {
  std::vector<Window> out;
  double t = rng.uniform(first_lo, first_hi);
  while (t < duration) {
    const double len = rng.uniform(len_lo, len_hi);
    out.push_back({t, t + len, 0.0});
    t += len + rng.uniform(gap_lo, gap_hi);
  }
  return out;
}

const Window* active_window(const std::vector<Window>& windows, double t) {
  for (const Window& w : windows) {
    if (w.contains(t)) return &w;
  }
  return nullptr;
}

// Small deterministic angular jitter so the gaze is never perfectly still.
struct Jitter {
  double a1, w1, p1, a2, w2, p2;

  static Jitter draw(DetRng& rng, double amplitude) {
    return {amplitude * rng.uniform(0.6, 1.0), 2.0 * M_PI / rng.uniform(1.3, 2.4),
            rng.uniform(0.0, 2.0 * M_PI),      amplitude * rng.uniform(0.3, 0.6),
            2.0 * M_PI / rng.uniform(0.5, 0.9), rng.uniform(0.0, 2.0 * M_PI)};
  }

  double at(double t) const { return a1 * std::sin(w1 * t + p1) + a2 * std::sin(w2 * t + p2); }
};

struct GazeSynth {
  Jitter az_on, el_on, az_off, el_off;
  double off_azimuth, off_elevation;

  static GazeSynth draw(DetRng& rng) {
    GazeSynth g;
    g.az_on = Jitter::draw(rng, 0.02);
    g.el_on = Jitter::draw(rng, 0.015);
    g.az_off = Jitter::draw(rng, 0.06);
    g.el_off = Jitter::draw(rng, 0.04);
    g.off_azimuth = rng.uniform(0.4, 0.6) * (rng.u01() < 0.5 ? -1.0 : 1.0);
    g.off_elevation = rng.uniform(0.25, 0.4) * (rng.u01() < 0.5 ? -1.0 : 1.0);
    return g;
  }

  GazeSample at(double t, bool focused, double distance) const {
    GazeSample s;
    if (focused) {
      s.azimuth = az_on.at(t);
      s.elevation = el_on.at(t);
    } else {
      s.azimuth = off_azimuth + az_off.at(t);
      s.elevation = off_elevation + el_off.at(t);
    }
    s.distance = distance;
    return s;
  }
};

double smoothstep(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * (3.0 - 2.0 * s);
}

enum class Focused { task, instructions, cobot };

struct ProfileState {
  // Radial human motion around the workspace center.
  double theta0 = 0.0, theta_amp = 0.0, theta_period = 1.0, theta_phase = 0.0;
  double radius_base = 1.0, radius_amp = 0.0, radius_period = 1.0, radius_phase = 0.0;
  GazeSynth task_gaze, instr_gaze, cobot_gaze;
  double z_base = 1.35, z_phase = 0.0;

  Vec2 position(double t, const Vec2& center, double radius_override) const {
    const double theta =
        theta0 + theta_amp * std::sin(2.0 * M_PI * t / theta_period + theta_phase);
    const double r = radius_override > 0.0
                         ? radius_override
                         : radius_base +
                               radius_amp * std::sin(2.0 * M_PI * t / radius_period + radius_phase);
    return center + r * Vec2(std::cos(theta), std::sin(theta));
  }

  double away_radius(double t) const {
    return radius_base + radius_amp * std::sin(2.0 * M_PI * t / radius_period + radius_phase);
  }
};

ProfileState draw_state(DetRng& rng, double radius_base, double radius_amp) {
  ProfileState st;
  st.theta0 = rng.uniform(0.0, 2.0 * M_PI);
  st.theta_amp = rng.uniform(0.25, 0.45);
  st.theta_period = rng.uniform(55.0, 80.0);
  st.theta_phase = rng.uniform(0.0, 2.0 * M_PI);
  st.radius_base = radius_base;
  st.radius_amp = radius_amp;
  st.radius_period = rng.uniform(29.0, 47.0);
  st.radius_phase = rng.uniform(0.0, 2.0 * M_PI);
  st.task_gaze = GazeSynth::draw(rng);
  st.instr_gaze = GazeSynth::draw(rng);
  st.cobot_gaze = GazeSynth::draw(rng);
  st.z_base = rng.uniform(1.3, 1.45);
  st.z_phase = rng.uniform(0.0, 2.0 * M_PI);
  return st;
}

void fill_gaze(TraceSample& s, const ProfileState& st, Focused focus, double t,
               const Vec2& center) {
  const double d_cobot = std::max(0.3, (s.human_xy - center).norm());
  s.task = st.task_gaze.at(t, focus == Focused::task, 0.9);
  s.instructions = st.instr_gaze.at(t, focus == Focused::instructions, 0.75);
  s.cobot = st.cobot_gaze.at(t, focus == Focused::cobot, d_cobot);
}

}  // namespace

Trace generate_trace(TraceProfile profile, double duration, std::uint64_t seed,
                     const TraceGenConfig& cfg) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw std::invalid_argument("trace duration must be positive");
  }
  if (!(cfg.sample_rate > 0.0) || !(cfg.rr_baseline > 0.2)) {
    throw std::invalid_argument("trace generator config is invalid");
  }
  DetRng rng(seed);
  const double dt = 1.0 / cfg.sample_rate;
  const int rows = static_cast<int>(std::floor(duration / dt)) + 1;

  // Profile-specific schedules, all drawn up front so the per-row loop is pure.
  std::vector<Window> intrusions;   // value = intrusion target radius
  std::vector<Window> instr_looks;  // non-task glances toward the instructions
  std::vector<Window> cobot_looks;
  std::vector<Window> rho_spikes;  // value = spike magnitude
  std::vector<Window> rr_dips;     // value = dip depth
  std::vector<double> updates;     // instruction update instants
  std::vector<Window> dropouts;

  ProfileState st;
  const double approach = 3.0, retreat = 3.0;
  switch (profile) {
    case TraceProfile::calm: {
      st = draw_state(rng, rng.uniform(1.9, 2.1), 0.15);
      instr_looks = schedule_windows(rng, duration, 8.0, 15.0, 18.0, 28.0, 1.5, 2.5);
      cobot_looks = schedule_windows(rng, duration, 20.0, 30.0, 32.0, 48.0, 0.8, 1.2);
      for (double t = rng.uniform(40.0, 55.0); t < duration; t += rng.uniform(45.0, 60.0)) {
        updates.push_back(t);
      }
      dropouts = schedule_windows(rng, duration, 5.0, 15.0, 14.0, 30.0, dt, dt);
      break;
    }
    case TraceProfile::intrusive: {
      st = draw_state(rng, rng.uniform(1.1, 1.2), 0.12);
      double t = rng.uniform(6.0, 10.0);
      while (t + approach + retreat + 6.0 < duration) {
        const double dwell = rng.uniform(4.0, 6.0);
        Window w{t, t + approach + dwell + retreat, rng.uniform(0.365, 0.395)};
        intrusions.push_back(w);
        t = w.end + rng.uniform(9.0, 13.0);
      }
      for (double u = rng.uniform(55.0, 70.0); u < duration; u += rng.uniform(55.0, 70.0)) {
        updates.push_back(u);
      }
      dropouts = schedule_windows(rng, duration, 10.0, 20.0, 18.0, 35.0, dt, dt);
      break;
    }
    case TraceProfile::stressed: {
      st = draw_state(rng, rng.uniform(0.9, 1.0), 0.10);
      cobot_looks = schedule_windows(rng, duration, 6.0, 10.0, 8.0, 13.0, 1.0, 1.4);
      instr_looks = schedule_windows(rng, duration, 4.0, 8.0, 3.5, 7.5, 2.0, 4.5);
      double t = 75.0 + rng.uniform(0.0, 15.0);
      while (t + 40.0 < duration) {
        Window w{t, t + 55.0, rng.uniform(0.05, 0.09)};
        rr_dips.push_back(w);
        const int spikes = rng.uniform_int(1, 2);
        for (int k = 0; k < spikes; ++k) {
          const double s = rng.uniform(w.start + 5.0, w.end - 8.0);
          rho_spikes.push_back({s, s + rng.uniform(2.0, 4.0), rng.uniform(0.65, 0.9)});
        }
        t = w.end + rng.uniform(20.0, 40.0);
      }
      for (double u = rng.uniform(35.0, 50.0); u < duration; u += rng.uniform(40.0, 55.0)) {
        updates.push_back(u);
      }
      dropouts = schedule_windows(rng, duration, 4.0, 10.0, 8.0, 20.0, dt, dt);
      break;
    }
  }

  // RR value at a given instant: baseline plus trapezoidal dips with a small
  // lasting residual, plus a mild slow oscillation in the calm profile.
  const double rr_osc_phase = rng.uniform(0.0, 2.0 * M_PI);
  const double rr_osc2_phase = rng.uniform(0.0, 2.0 * M_PI);
  auto rr_at = [&](double t) {
    double rr = cfg.rr_baseline;
    if (profile == TraceProfile::calm) {
      rr += 0.008 * std::sin(2.0 * M_PI * t / 57.0 + rr_osc_phase) +
            0.004 * std::sin(2.0 * M_PI * t / 13.0 + rr_osc2_phase);
    }
    for (const Window& dip : rr_dips) {
      const double ramp = 15.0, hold_end = dip.end - dip.start - 15.0;
      double level;
      if (t < dip.start) {
        level = 0.0;
      } else if (t < dip.start + ramp) {
        level = smoothstep((t - dip.start) / ramp);
      } else if (t < dip.start + hold_end) {
        level = 1.0;
      } else if (t < dip.end) {
        level = 1.0 - 0.7 * smoothstep((t - dip.start - hold_end) / 15.0);
      } else {
        level = 0.3;  // incomplete recovery
      }
      rr -= dip.value * level;
    }
    return rr;
  };

  std::vector<TraceSample> samples;
  samples.reserve(static_cast<std::size_t>(rows));
  double next_beat = 0.0;
  for (int i = 0; i < rows; ++i) {
    const double t = i * dt;
    TraceSample s;
    s.t = t;

    // Position: radial profile, overridden during intrusions by an eased
    // approach to the target radius.
    double radius_override = -1.0;
    Focused focus = Focused::task;
    if (const Window* w = active_window(intrusions, t)) {
      const double r_far = st.away_radius(w->start);
      const double dwell_end = w->end - retreat;
      double blend;
      if (t < w->start + approach) {
        blend = smoothstep((t - w->start) / approach);
      } else if (t < dwell_end) {
        blend = 1.0;
      } else {
        blend = 1.0 - smoothstep((t - dwell_end) / retreat);
      }
      radius_override = r_far + (w->value - r_far) * blend;
      focus = Focused::cobot;
    } else if (active_window(cobot_looks, t)) {
      focus = Focused::cobot;
    } else if (active_window(instr_looks, t)) {
      focus = Focused::instructions;
    }
    s.human_xy = st.position(t, cfg.workspace_center, radius_override);
    s.human_z = st.z_base + 0.02 * std::sin(2.0 * M_PI * t / 11.0 + st.z_phase);

    if (active_window(dropouts, t)) {
      // Tracker dropout: all gaze channels missing for this row.
    } else {
      fill_gaze(s, st, focus, t, cfg.workspace_center);
    }

    if (next_beat <= t + 1e-12) {
      const double rr = std::max(0.3, rr_at(next_beat));
      s.rr = rr;
      next_beat += rr;
    }

    double rho = profile == TraceProfile::stressed ? 0.05 : 0.0;
    if (const Window* w = active_window(rho_spikes, t)) rho = w->value;
    s.rho = rho;

    for (double u : updates) {
      if (u >= t && u < t + dt) s.instruction_update = true;
    }
    samples.push_back(std::move(s));
  }
  return Trace(std::move(samples));
}

}  // namespace promind
