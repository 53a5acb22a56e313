#pragma once

#include <array>
#include <optional>
#include <vector>

#include "promind/types.hpp"

namespace promind {

// Rectangular region of interest the human may look at, described by its
// physical extent and a tolerance span for the attention falloff band.
struct RoIGeometry {
  double width = 0.20;   // meters
  double height = 0.20;  // meters
  double gamma = 0.40;   // dimensionless, in (0, 1)

  void validate() const;
};

// Gaze direction toward one region, in spherical coordinates relative to the
// head: azimuth and elevation in radians, distance in meters.
struct GazeSample {
  double azimuth = 0.0;
  double elevation = 0.0;
  double distance = 1.0;
};

// Raised-cosine attention indicator for one angular axis: 1 inside the flat
// region, smooth falloff to 0 across the tolerance band, 0 beyond it.
double attention_component(double angle, double extent, double distance, double gamma);

// Product of the azimuth indicator (against width) and the elevation
// indicator (against height). In [0, 1].
double attention_level(const GazeSample& gaze, const RoIGeometry& roi);

struct EffortConfig {
  // Normalization constants and weights for the three factors.
  double wariness_norm = 2.0;
  double learning_norm = 0.8;
  double instruction_norm = 1.0;
  double wariness_weight = 1.0 / 3.0;
  double learning_weight = 1.0 / 3.0;
  double instruction_weight = 1.0 / 3.0;
  // Event detection.
  double check_threshold = 0.5;      // robot-attention level that counts as a check
  double check_debounce = 0.1;       // seconds the level must stay up
  double instruction_exclusion = 3.0;  // seconds after an update during which
                                       // task/instruction switches are expected
  double focus_floor = 0.1;          // minimum level for any region to hold focus
  // Missing-gaze policy: hold the last level, then decay linearly to zero.
  double gaze_hold = 0.5;
  double gaze_decay = 1.0;

  void validate() const;
};

struct EffortBreakdown {
  double wariness = 0.0;     // sum of check instants over elapsed time
  double learning = 0.0;     // task dwell over elapsed time
  double instruction = 0.0;  // sum of unexpected switch instants over elapsed time
  double score = 0.0;        // weighted, per-factor capped, clamped to [0, 1]
};

// The literal scoring formulas over an extracted event log. Instants are
// measured from the episode start. Throws on non-positive elapsed time.
EffortBreakdown effort_score(const std::vector<double>& check_instants, double task_dwell,
                             const std::vector<double>& switch_instants, double elapsed,
                             const EffortConfig& cfg);

enum class Roi { task = 0, instructions = 1, cobot = 2 };

struct MonitorInput {
  double t = 0.0;
  std::optional<GazeSample> task;
  std::optional<GazeSample> instructions;
  std::optional<GazeSample> cobot;
  bool instruction_update = false;
};

// Stateful accumulator over a time-ordered gaze stream. Tracks per-region
// attention with the missing-frame hold/decay policy, detects robot checks,
// task dwell, and task/instruction switches, and scores mental effort.
class HumanMonitor {
 public:
  HumanMonitor(RoIGeometry task, RoIGeometry instructions, RoIGeometry cobot,
               EffortConfig cfg = {});

  // Timestamps must be strictly increasing.
  void advance(const MonitorInput& input);

  bool started() const { return started_; }
  double now() const { return now_; }
  double attention(Roi roi) const;
  double attention_cobot() const { return attention(Roi::cobot); }

  // Current focused region, if any level reaches the focus floor.
  std::optional<Roi> focus() const { return focus_; }

  EffortBreakdown effort() const;

  const std::vector<double>& check_instants() const { return checks_; }
  const std::vector<double>& switch_instants() const { return switches_; }
  double task_dwell() const { return task_dwell_; }

 private:
  struct Channel {
    double level = 0.0;
    double last_seen = -1.0;
    double held_level = 0.0;
    bool ever_seen = false;
  };

  void update_channel(Channel& ch, const std::optional<GazeSample>& gaze,
                      const RoIGeometry& roi, double t);

  std::array<RoIGeometry, 3> rois_;
  EffortConfig cfg_;
  std::array<Channel, 3> channels_;
  bool started_ = false;
  double start_ = 0.0;
  double now_ = 0.0;
  std::optional<Roi> focus_;
  double task_dwell_ = 0.0;
  std::vector<double> checks_;
  std::vector<double> switches_;
  double last_instruction_update_ = -1.0;
  bool check_candidate_ = false;
  bool check_committed_ = false;
  double check_rise_ = 0.0;
};

// Sliding-window mean over timestamped RR interval samples.
class RRStream {
 public:
  explicit RRStream(double window = 30.0);

  // rr in seconds per beat, strictly positive; t non-decreasing.
  void push(double t, double rr);

  struct WindowMean {
    double value;  // mean over [t - window, t]; previous mean when empty; NaN
                   // if no window ever had samples
    bool gap;      // true when the current window held no samples
  };
  WindowMean mean_at(double t);

  // Mean over [t0, t1]; NaN when empty. Used for baseline calibration.
  double mean_between(double t0, double t1) const;

  int sample_count() const { return static_cast<int>(times_.size()); }

 private:
  double window_;
  std::vector<double> times_;
  std::vector<double> values_;
  double last_mean_;
};

// Clamp a camera stress score to [0, 1]; non-finite values collapse to 0.
double camera_stress(double raw);

}  // namespace promind
