#include "promind/pacing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "promind/log.hpp"

namespace promind {
namespace {

// floor/ceil after snapping near-integer arguments, so interval arithmetic
// like (-0.06 + 0.02Type) / 0.02 does not fall off the intended integer.
double snap(double q) {
  const double r = std::round(q);
  if (std::abs(q - r) <= 1e-9 * std::max(1.0, std::abs(q))) return r;
  return q;
}

int snap_floor(double q) { return static_cast<int>(std::floor(snap(q))); }
int snap_ceil(double q) { return static_cast<int>(std::ceil(snap(q))); }

}  // namespace

void PacingConfig::validate() const {
  if (!(delta_rest_to_stress > 0.0) || !(delta_stress_to_rest > 0.0))
    throw std::invalid_argument("pacing: sensitivities must be strictly positive");
  if (!(delta_stress_to_rest < delta_rest_to_stress))
    throw std::invalid_argument(
        "pacing: stress-to-rest sensitivity must be below rest-to-stress");
  if (!(rr_stress < rr_rest))
    throw std::invalid_argument("pacing: stress reference must be below rest baseline");
  if (!(sigma_rest >= 0.0) || !(sigma_stress >= 0.0))
    throw std::invalid_argument("pacing: spreads must be non-negative");
  if (rho_threshold < 0.0 || rho_threshold > 1.0)
    throw std::invalid_argument("pacing: camera threshold must lie in [0, 1]");
  if (ladder_size < 1) throw std::invalid_argument("pacing: ladder size must be positive");
  if (!(window > 0.0) || camera_cutoff < 0.0 || camera_cutoff > window)
    throw std::invalid_argument("pacing: need 0 <= camera_cutoff <= window");
}

int initial_index(const PacingConfig& cfg) {
  cfg.validate();
  const double raw = static_cast<double>(cfg.ladder_size) -
                     cfg.sigma_rest / cfg.delta_rest_to_stress;
  const int index = static_cast<int>(std::llround(snap(raw)));
  return std::clamp(index, 1, cfg.ladder_size);
}

int camera_step(double rho, const PacingConfig& cfg) {
  cfg.validate();
  return rho > cfg.rho_threshold ? -1 : 0;
}

StepDecision rr_step(double rr_now, double rr_prev, const PacingConfig& cfg,
                     int delta_camera) {
  cfg.validate();
  if (!(rr_now > 0.0) || !(rr_prev > 0.0))
    throw std::domain_error("pacing: window means must be positive");

  StepDecision decision;
  const double diff = rr_now - rr_prev;
  if (diff < -cfg.delta_rest_to_stress && rr_now < cfg.rr_rest) {
    // Stress: count how many sensitivity quanta the drop spans, relative to
    // whichever of (baseline, previous) is lower.
    decision.branch = 'a';
    decision.delta_rr = rr_now - std::min(cfg.rr_rest, rr_prev);
    const int raw = snap_floor((decision.delta_rr + cfg.delta_rest_to_stress) /
                               cfg.delta_rest_to_stress) +
                    delta_camera;
    // The guard guarantees a slowdown even when rounding lands on zero.
    decision.delta = std::min(raw, -1);
  } else if (diff > 0.0 && rr_now >= cfg.rr_stress) {
    // Relaxation: any rise at or above the stress reference speeds up.
    decision.branch = 'b';
    decision.delta_rr = rr_now - std::max(cfg.rr_stress, rr_prev);
    decision.delta =
        std::max(1, snap_ceil(decision.delta_rr / cfg.delta_stress_to_rest)) + delta_camera;
  } else {
    decision.branch = 'c';
    decision.delta_rr = diff;
    decision.delta = (rr_now < cfg.guard() ? -1 : 0) + delta_camera;
  }
  return decision;
}

PacingController::PacingController(const PacingConfig& cfg, double start_time)
    : cfg_(cfg), index_(initial_index(cfg)), rr_prev_(cfg.rr_rest),
      window_start_(start_time) {}

bool PacingController::observe_stress(double t, double rho) {
  if (camera_latched_) return false;
  if (camera_step(rho, cfg_) == 0) return false;
  camera_latched_ = true;
  if (window_end() - t <= cfg_.camera_cutoff) {
    // Too close to the boundary: fold into the boundary step instead.
    camera_pending_ = -1;
    return false;
  }
  index_ = std::clamp(index_ - 1, 1, cfg_.ladder_size);
  history_.push_back(PacingRecord{t, rr_prev_, 'i', 0.0, -1, -1, index_});
  PROMIND_INFO("pacing: immediate camera step at t=%.2f, index %d", t, index_);
  return true;
}

const PacingRecord& PacingController::end_window(double t, double rr_mean) {
  const StepDecision decision = rr_step(rr_mean, rr_prev_, cfg_, camera_pending_);
  index_ = std::clamp(index_ + decision.delta, 1, cfg_.ladder_size);
  history_.push_back(PacingRecord{t, rr_mean, decision.branch, decision.delta_rr,
                                  camera_pending_, decision.delta, index_});
  rr_prev_ = rr_mean;
  camera_latched_ = false;
  camera_pending_ = 0;
  window_start_ = t;
  return history_.back();
}

}  // namespace promind
