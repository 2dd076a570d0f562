#include "ventmon/alarms.hpp"

#include <cmath>
#include <string>

#include "ventmon/errors.hpp"

namespace ventmon {

namespace {

void require_range(const char* name, double value, double lo, double hi) {
  if (!(value >= lo && value <= hi)) {
    throw ConfigError(std::string(name) + " must lie in [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "], got " + std::to_string(value));
  }
}

}  // namespace

std::string_view to_string(AlarmKind kind) noexcept {
  switch (kind) {
    case AlarmKind::HighPressure: return "HighPressure";
    case AlarmKind::LowPressure: return "LowPressure";
    case AlarmKind::HighRR: return "HighRR";
    case AlarmKind::LowRR: return "LowRR";
    case AlarmKind::Noncycling: return "Noncycling";
  }
  return "?";
}

std::string_view to_string(AlarmEdge edge) noexcept {
  return edge == AlarmEdge::Raised ? "Raised" : "Cleared";
}

std::string_view to_string(NoncyclingCause cause) noexcept {
  switch (cause) {
    case NoncyclingCause::TimeSinceHighAttack: return "TimeSinceHighAttack";
    case NoncyclingCause::TimeSinceLowAttack: return "TimeSinceLowAttack";
    case NoncyclingCause::EnvelopeRatio: return "EnvelopeRatio";
    case NoncyclingCause::EnvelopeDifference: return "EnvelopeDifference";
  }
  return "?";
}

void AlarmConfig::validate() const {
  require_range("p_max", p_max, 30.0, 90.0);
  require_range("p_min", p_min, 1.0, 20.0);
  require_range("rr_max", rr_max, 15.0, 60.0);
  require_range("rr_min", rr_min, 5.0, 15.0);
  require_range("t_max", t_max, 5.0, 30.0);
  if (!(p_min < p_max)) throw ConfigError("p_min must be below p_max");
  if (!(rr_min < rr_max)) throw ConfigError("rr_min must be below rr_max");
  if (!std::isfinite(r_nom) || !(r_nom > 1.0)) {
    throw ConfigError("r_nom must be greater than 1, got " + std::to_string(r_nom));
  }
  if (!(r_min > 1.0 && r_min < r_nom)) {
    throw ConfigError("r_min must lie strictly between 1 and r_nom (" + std::to_string(r_nom) +
                      "), got " + std::to_string(r_min));
  }
  if (!std::isfinite(d_min) || !(d_min > 0.0)) {
    throw ConfigError("d_min must be positive, got " + std::to_string(d_min));
  }
}

std::uint64_t AlarmConfig::t_max_samples(double sample_rate) const {
  return static_cast<std::uint64_t>(std::llround(t_max * sample_rate));
}

AlarmSet check_alarms(const MonitorState& state, double p, const AlarmConfig& config) noexcept {
  AlarmSet active;
  if (p > config.p_max) active.insert(AlarmKind::HighPressure);
  if (p < config.p_min) active.insert(AlarmKind::LowPressure);
  if (state.metrics_valid) {
    if (state.rr > config.rr_max) active.insert(AlarmKind::HighRR);
    if (state.rr < config.rr_min) active.insert(AlarmKind::LowRR);
  }

  const std::uint64_t limit =
      static_cast<std::uint64_t>(std::llround(config.t_max * state.sample_rate));
  std::uint8_t causes = 0;
  if (state.high.samples_since_attack > limit) {
    causes |= static_cast<std::uint8_t>(NoncyclingCause::TimeSinceHighAttack);
  }
  if (state.low.samples_since_attack > limit) {
    causes |= static_cast<std::uint8_t>(NoncyclingCause::TimeSinceLowAttack);
  }
  // Both envelopes start at the first sample, so the shape tests are armed
  // only after a full breath or once t_max has elapsed without one.
  const bool shape_armed = state.metrics_valid || state.samples_seen > limit;
  if (shape_armed) {
    // Ratio is meaningless against a non-positive floor.
    if (state.low.value > 0.0 && state.high.value / state.low.value < config.r_min) {
      causes |= static_cast<std::uint8_t>(NoncyclingCause::EnvelopeRatio);
    }
    if (state.high.value - state.low.value < config.d_min) {
      causes |= static_cast<std::uint8_t>(NoncyclingCause::EnvelopeDifference);
    }
  }
  if (causes != 0) {
    active.insert(AlarmKind::Noncycling);
    active.noncycling_causes = causes;
  }
  return active;
}

AlarmEdges alarm_edge_detector(const AlarmSet& previous, const AlarmSet& current,
                               std::uint64_t sample_index) noexcept {
  AlarmEdges edges;
  for (std::size_t i = 0; i < kAlarmKindCount; ++i) {
    const auto kind = static_cast<AlarmKind>(i);
    const bool was = previous.contains(kind);
    const bool is = current.contains(kind);
    if (was == is) continue;
    AlarmEvent e;
    e.kind = kind;
    e.edge = is ? AlarmEdge::Raised : AlarmEdge::Cleared;
    e.sample_index = sample_index;
    if (kind == AlarmKind::Noncycling) {
      e.detail = is ? current.noncycling_causes : previous.noncycling_causes;
    }
    edges.push(e);
  }
  return edges;
}

}  // namespace ventmon
