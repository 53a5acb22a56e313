#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "promind/human_monitor.hpp"
#include "promind/types.hpp"

namespace promind {

// One recorded instant of the human channels: torso position, gaze relative
// to the three regions of interest, heart inter-beat interval (present only
// on beat rows), camera stress score, and the instruction-update flag.
struct TraceSample {
  double t = 0.0;
  Vec2 human_xy = Vec2::Zero();
  double human_z = 0.0;
  std::optional<GazeSample> task;
  std::optional<GazeSample> instructions;
  std::optional<GazeSample> cobot;
  std::optional<double> rr;
  double rho = 0.0;
  bool instruction_update = false;
};

// Validated, time-ordered human trace. Timestamps strictly increase and start
// at or after zero; RR values are strictly positive where present.
class Trace {
 public:
  explicit Trace(std::vector<TraceSample> samples);

  const std::vector<TraceSample>& samples() const { return samples_; }
  int size() const { return static_cast<int>(samples_.size()); }
  double duration() const { return samples_.back().t - samples_.front().t; }
  int rr_count() const { return rr_count_; }

  // Mean RR over samples with t <= t_end; NaN when there are none.
  double rr_mean_until(double t_end) const;

 private:
  std::vector<TraceSample> samples_;
  int rr_count_ = 0;
};

// Replays a trace against a simulation clock, looping past the end with a
// fixed period of duration plus one mean sample gap so timestamps keep
// strictly increasing across the seam.
class TracePlayer {
 public:
  explicit TracePlayer(const Trace& trace);

  // Emits, in order, every sample with (possibly loop-shifted) timestamp at or
  // before t. Each returned sample's t field carries the shifted time.
  std::vector<TraceSample> advance_until(double t);

  const TraceSample& latest() const { return latest_; }

 private:
  const Trace& trace_;
  std::size_t cursor_ = 0;
  double offset_ = 0.0;
  double period_;
  TraceSample latest_;
};

// CSV column layout, fixed:
//   t, human_x, human_y, human_z, theta_task, phi_task, r_task,
//   theta_instr, phi_instr, r_instr, theta_cobot, phi_cobot, r_cobot,
//   rr, rho, instr_update
// A region's three gaze fields are either all present or all empty (missing
// frame); rr is empty except on beat rows; instr_update is 0 or 1.
Trace read_trace_csv(std::istream& in);
void write_trace_csv(const Trace& trace, std::ostream& out);

// JSON-lines alternative: one object per line with keys t, human (array of
// 3), task/instr/cobot (array of 3 or null), rr (number or null), rho,
// instr_update (0/1).
Trace read_trace_jsonl(std::istream& in);
void write_trace_jsonl(const Trace& trace, std::ostream& out);

// Dispatches on extension: .jsonl/.ndjson read as JSON lines, anything else
// as CSV.
Trace load_trace(const std::string& path);
void save_trace(const Trace& trace, const std::string& path);

enum class TraceProfile { calm, intrusive, stressed };

TraceProfile parse_trace_profile(const std::string& name);
std::string to_string(TraceProfile profile);

struct TraceGenConfig {
  double sample_rate = 50.0;        // rows per second
  Vec2 workspace_center{0.45, 0.0};  // where the robot task happens
  double rr_baseline = 0.85;         // resting inter-beat interval, seconds
};

// Deterministic synthetic trace for the given profile. calm keeps the human
// away with steady heart rate; intrusive adds repeated close approaches with
// gaze on the robot and a flat heart rate; stressed keeps mid distance but
// drifts RR down in episodes with camera stress spikes and frequent
// task/instruction gaze switching.
Trace generate_trace(TraceProfile profile, double duration, std::uint64_t seed,
                     const TraceGenConfig& cfg = {});

}  // namespace promind
