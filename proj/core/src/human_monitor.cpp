#include "promind/human_monitor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace promind {

void RoIGeometry::validate() const {
  if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height))
    throw std::invalid_argument("roi: extents must be strictly positive");
  if (!(gamma > 0.0) || !(gamma < 1.0))
    throw std::invalid_argument("roi: gamma must lie in (0, 1)");
}

void EffortConfig::validate() const {
  if (!(wariness_norm > 0.0) || !(learning_norm > 0.0) || !(instruction_norm > 0.0))
    throw std::invalid_argument("effort: normalization constants must be positive");
  if (wariness_weight < 0.0 || learning_weight < 0.0 || instruction_weight < 0.0)
    throw std::invalid_argument("effort: weights must be non-negative");
  if (!(check_threshold > 0.0) || !(check_threshold < 1.0))
    throw std::invalid_argument("effort: check threshold must lie in (0, 1)");
  if (check_debounce < 0.0 || instruction_exclusion < 0.0)
    throw std::invalid_argument("effort: durations must be non-negative");
  if (gaze_hold < 0.0 || !(gaze_decay > 0.0))
    throw std::invalid_argument("effort: hold must be non-negative, decay positive");
}

double attention_component(double angle, double extent, double distance, double gamma) {
  if (!(distance > 0.0)) throw std::domain_error("attention: distance must be positive");
  if (!(extent > 0.0)) throw std::domain_error("attention: extent must be positive");
  if (!(gamma > 0.0) || !(gamma < 1.0))
    throw std::domain_error("attention: gamma must lie in (0, 1)");
  const double alpha_min = std::atan((1.0 - gamma) * extent / (2.0 * distance));
  const double alpha_max = std::atan((1.0 + gamma) * extent / (2.0 * distance));
  const double x = std::abs(angle);
  if (x <= alpha_min) return 1.0;
  if (x > alpha_max) return 0.0;
  return 0.5 * (1.0 + std::cos(M_PI * (x - alpha_min) / (alpha_max - alpha_min)));
}

double attention_level(const GazeSample& gaze, const RoIGeometry& roi) {
  roi.validate();
  const double azimuth =
      attention_component(gaze.azimuth, roi.width, gaze.distance, roi.gamma);
  const double elevation =
      attention_component(gaze.elevation, roi.height, gaze.distance, roi.gamma);
  return azimuth * elevation;
}

EffortBreakdown effort_score(const std::vector<double>& check_instants, double task_dwell,
                             const std::vector<double>& switch_instants, double elapsed,
                             const EffortConfig& cfg) {
  cfg.validate();
  if (!(elapsed > 0.0)) throw std::domain_error("effort: elapsed time must be positive");
  EffortBreakdown result;
  double check_sum = 0.0;
  for (double t : check_instants) check_sum += t;
  double switch_sum = 0.0;
  for (double t : switch_instants) switch_sum += t;
  result.wariness = check_sum / elapsed;
  result.learning = task_dwell / elapsed;
  result.instruction = switch_sum / elapsed;
  const double mix =
      cfg.wariness_weight * std::min(1.0, result.wariness / cfg.wariness_norm) +
      cfg.learning_weight * std::min(1.0, result.learning / cfg.learning_norm) +
      cfg.instruction_weight * std::min(1.0, result.instruction / cfg.instruction_norm);
  result.score = std::clamp(mix, 0.0, 1.0);
  return result;
}

HumanMonitor::HumanMonitor(RoIGeometry task, RoIGeometry instructions, RoIGeometry cobot,
                           EffortConfig cfg)
    : rois_{task, instructions, cobot}, cfg_(cfg) {
  for (const RoIGeometry& roi : rois_) roi.validate();
  cfg_.validate();
}

void HumanMonitor::update_channel(Channel& ch, const std::optional<GazeSample>& gaze,
                                  const RoIGeometry& roi, double t) {
  if (gaze.has_value()) {
    ch.level = attention_level(*gaze, roi);
    ch.held_level = ch.level;
    ch.last_seen = t;
    ch.ever_seen = true;
    return;
  }
  if (!ch.ever_seen) {
    ch.level = 0.0;
    return;
  }
  const double age = t - ch.last_seen;
  if (age <= cfg_.gaze_hold) {
    ch.level = ch.held_level;
  } else if (age <= cfg_.gaze_hold + cfg_.gaze_decay) {
    ch.level = ch.held_level * (1.0 - (age - cfg_.gaze_hold) / cfg_.gaze_decay);
  } else {
    ch.level = 0.0;
  }
}

void HumanMonitor::advance(const MonitorInput& input) {
  if (started_ && !(input.t > now_))
    throw std::invalid_argument("monitor: timestamps must be strictly increasing");

  const double previous = now_;
  const std::optional<Roi> previous_focus = focus_;
  if (!started_) {
    started_ = true;
    start_ = input.t;
  } else {
    // Dwell integrates the focus held over the elapsed step.
    if (previous_focus == Roi::task) task_dwell_ += input.t - previous;
  }
  now_ = input.t;

  if (input.instruction_update) last_instruction_update_ = input.t;

  update_channel(channels_[0], input.task, rois_[0], input.t);
  update_channel(channels_[1], input.instructions, rois_[1], input.t);
  update_channel(channels_[2], input.cobot, rois_[2], input.t);

  // Focus: the region with the highest level, if any reaches the floor.
  int best = -1;
  double best_level = cfg_.focus_floor;
  for (int i = 0; i < 3; ++i) {
    if (channels_[static_cast<size_t>(i)].level >= best_level) {
      best_level = channels_[static_cast<size_t>(i)].level;
      best = i;
    }
  }
  focus_ = best < 0 ? std::nullopt : std::optional<Roi>(static_cast<Roi>(best));

  // Robot check: a rising crossing of the threshold that survives the
  // debounce window; the event instant is the rise time.
  const double cobot_level = channels_[2].level;
  if (!check_candidate_ && !check_committed_ && cobot_level > cfg_.check_threshold) {
    check_candidate_ = true;
    check_rise_ = input.t;
  }
  if (cobot_level <= cfg_.check_threshold) {
    check_candidate_ = false;
    check_committed_ = false;
  } else if (check_candidate_ && input.t - check_rise_ >= cfg_.check_debounce) {
    checks_.push_back(check_rise_ - start_);
    check_candidate_ = false;
    check_committed_ = true;
  }

  // Switch between task and instructions, unless an instruction update makes
  // it expected.
  const bool is_switch =
      previous_focus.has_value() && focus_.has_value() && previous_focus != focus_ &&
      previous_focus != Roi::cobot && focus_ != Roi::cobot;
  if (is_switch) {
    const bool expected = last_instruction_update_ >= 0.0 &&
                          input.t - last_instruction_update_ <= cfg_.instruction_exclusion;
    if (!expected) switches_.push_back(input.t - start_);
  }
}

double HumanMonitor::attention(Roi roi) const {
  return channels_[static_cast<size_t>(roi)].level;
}

EffortBreakdown HumanMonitor::effort() const {
  const double elapsed = now_ - start_;
  if (!started_ || !(elapsed > 0.0)) return EffortBreakdown{};
  return effort_score(checks_, task_dwell_, switches_, elapsed, cfg_);
}

RRStream::RRStream(double window)
    : window_(window), last_mean_(std::numeric_limits<double>::quiet_NaN()) {
  if (!(window > 0.0)) throw std::invalid_argument("rr stream: window must be positive");
}

void RRStream::push(double t, double rr) {
  if (!(rr > 0.0) || !std::isfinite(rr))
    throw std::invalid_argument("rr stream: intervals must be strictly positive");
  if (!times_.empty() && t < times_.back())
    throw std::invalid_argument("rr stream: timestamps must be non-decreasing");
  times_.push_back(t);
  values_.push_back(rr);
}

RRStream::WindowMean RRStream::mean_at(double t) {
  const auto lo = std::lower_bound(times_.begin(), times_.end(), t - window_);
  const auto hi = std::upper_bound(times_.begin(), times_.end(), t);
  if (lo == hi) return WindowMean{last_mean_, true};
  double sum = 0.0;
  for (auto it = lo; it != hi; ++it) sum += values_[static_cast<size_t>(it - times_.begin())];
  last_mean_ = sum / static_cast<double>(hi - lo);
  return WindowMean{last_mean_, false};
}

double RRStream::mean_between(double t0, double t1) const {
  const auto lo = std::lower_bound(times_.begin(), times_.end(), t0);
  const auto hi = std::upper_bound(times_.begin(), times_.end(), t1);
  if (lo == hi) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (auto it = lo; it != hi; ++it) sum += values_[static_cast<size_t>(it - times_.begin())];
  return sum / static_cast<double>(hi - lo);
}

double camera_stress(double raw) {
  if (!std::isfinite(raw)) return 0.0;
  return std::clamp(raw, 0.0, 1.0);
}

}  // namespace promind
