#pragma once

#include <vector>

#include "promind/types.hpp"

namespace promind {

// Stress-driven ladder stepping parameters. RR quantities in seconds.
struct PacingConfig {
  double delta_rest_to_stress = 0.02;  // minimum RR drop that signals stress
  double delta_stress_to_rest = 0.01;  // RR rise granularity toward faster pacing
  double rho_threshold = 0.5;          // camera stress trigger level
  double rr_rest = 0.85;
  double rr_stress = 0.75;
  double sigma_rest = 0.14;
  double sigma_stress = 0.06;
  double rr_guard = -1.0;  // cumulative-stress floor; < 0 selects rr_stress
  int ladder_size = 15;
  double window = 30.0;        // seconds per RR window
  double camera_cutoff = 5.0;  // detections this close to the boundary defer

  double guard() const { return rr_guard < 0.0 ? rr_stress : rr_guard; }
  void validate() const;
};

// Starting ladder index: how many rest-spread quanta fit below the top.
int initial_index(const PacingConfig& cfg);

// -1 when the camera score strictly exceeds the threshold, else 0.
int camera_step(double rho, const PacingConfig& cfg);

struct StepDecision {
  int delta = 0;
  char branch = 'c';     // 'a' stress, 'b' relax, 'c' neither
  double delta_rr = 0.0;  // the RR difference the branch formula used
};

// Window-boundary step from consecutive RR means. Branch (a) fires on a drop
// larger than the rest-to-stress sensitivity below the rest baseline and
// always steps down at least one. Branch (b) fires on any rise at or above
// the stress reference and always steps up at least one. Otherwise no step,
// except the cumulative-stress guard forces -1 below the guard level.
// delta_camera folds into the total exactly once.
StepDecision rr_step(double rr_now, double rr_prev, const PacingConfig& cfg,
                     int delta_camera);

struct PacingRecord {
  double t;
  double rr;
  char branch;  // 'a', 'b', 'c', or 'i' for an immediate camera step
  double delta_rr;
  int delta_camera;
  int delta;
  int index;
};

// Windowed pacing state machine: latches at most one camera step per window
// (immediate, unless detected within the cutoff of the boundary, in which
// case it folds into the boundary step), applies RR steps at window ends,
// and keeps the index clamped to [1, ladder_size]. Index changes take effect
// at the next trajectory dispatch.
class PacingController {
 public:
  explicit PacingController(const PacingConfig& cfg, double start_time = 0.0);

  int index() const { return index_; }
  double window_end() const { return window_start_ + cfg_.window; }
  const std::vector<PacingRecord>& history() const { return history_; }

  // Per-tick camera stress observation. Returns true when an immediate step
  // was applied.
  bool observe_stress(double t, double rho);

  // Close the window ending at t with the windowed RR mean.
  const PacingRecord& end_window(double t, double rr_mean);

 private:
  PacingConfig cfg_;
  int index_;
  double rr_prev_;
  double window_start_;
  bool camera_latched_ = false;
  int camera_pending_ = 0;
  std::vector<PacingRecord> history_;
};

}  // namespace promind
