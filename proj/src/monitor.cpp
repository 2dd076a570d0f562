#include "ventmon/monitor.hpp"

#include <cmath>
#include <string>

#include "ventmon/errors.hpp"

namespace ventmon {

namespace {

bool is_unit_coefficient(double a) { return std::isfinite(a) && a >= 0.0 && a <= 1.0; }

double smooth(double previous, double alpha, double observation) {
  return alpha * previous + (1.0 - alpha) * observation;
}

}  // namespace

EnvelopeTracker EnvelopeTracker::make(EnvelopeDirection direction, double initial,
                                      double alpha_attack, double alpha_release) {
  if (!is_unit_coefficient(alpha_attack) || !is_unit_coefficient(alpha_release) ||
      alpha_attack > alpha_release) {
    throw ConfigError("envelope coefficients must satisfy 0 <= alpha_attack <= alpha_release <= 1");
  }
  if (!std::isfinite(initial)) throw ConfigError("envelope initial value must be finite");
  EnvelopeTracker t;
  t.value = initial;
  t.alpha_attack = alpha_attack;
  t.alpha_release = alpha_release;
  t.last_attack_value = initial;
  t.samples_since_attack = 0;
  t.direction = direction;
  return t;
}

void MonitorConfig::validate() const {
  if (!std::isfinite(sample_rate) || sample_rate <= 0.0) {
    throw ConfigError("sample rate must be positive, got " + std::to_string(sample_rate));
  }
  if (!is_unit_coefficient(alpha_attack) || !is_unit_coefficient(alpha_release) ||
      alpha_attack > alpha_release) {
    throw ConfigError("coefficients must satisfy 0 <= alpha_attack <= alpha_release <= 1 (got " +
                      std::to_string(alpha_attack) + ", " + std::to_string(alpha_release) + ")");
  }
  if (!is_unit_coefficient(alpha_smooth)) {
    throw ConfigError("alpha_smooth must lie in [0, 1], got " + std::to_string(alpha_smooth));
  }
}

MonitorState monitor_init(const MonitorConfig& config, double first_sample) {
  config.validate();
  if (!std::isfinite(first_sample)) throw ConfigError("first sample must be finite");
  MonitorState s;
  s.high = EnvelopeTracker::make(EnvelopeDirection::High, first_sample, config.alpha_attack,
                                 config.alpha_release);
  s.low = EnvelopeTracker::make(EnvelopeDirection::Low, first_sample, config.alpha_attack,
                                config.alpha_release);
  s.alpha_smooth = config.alpha_smooth;
  s.sample_rate = config.sample_rate;
  s.breath_phase = BreathPhase::Exhaling;
  return s;
}

StepOutput monitor_step(MonitorState& s, double p) noexcept {
  StepOutput out;
  if (!std::isfinite(p)) {
    out.rejected = true;
    return out;
  }

  ++s.samples_seen;
  ++s.samples_since_prev_peak;
  out.high_attacked = envelope_step(s.high, p) == EnvelopeUpdate::Attack;
  out.low_attacked = envelope_step(s.low, p) == EnvelopeUpdate::Attack;

  // Both envelopes attack only when they coincide with p: no direction
  // information, so the phase is left alone.
  if (out.high_attacked && out.low_attacked) return out;

  if (out.high_attacked && s.breath_phase == BreathPhase::Exhaling) {
    s.breath_phase = BreathPhase::Inhaling;
    out.phase_changed = true;
    if (s.exhale_observed) {
      const double v_low = s.low.last_attack_value;
      s.peep = s.has_peep ? smooth(s.peep, s.alpha_smooth, v_low) : v_low;
      s.has_peep = true;
      out.metrics_updated = true;
    }
  } else if (out.low_attacked && s.breath_phase == BreathPhase::Inhaling) {
    s.breath_phase = BreathPhase::Exhaling;
    s.exhale_observed = true;
    out.phase_changed = true;

    const double v_high = s.high.last_attack_value;
    s.pip = s.has_pip ? smooth(s.pip, s.alpha_smooth, v_high) : v_high;
    s.has_pip = true;
    out.metrics_updated = true;

    const std::uint64_t t_high = s.high.samples_since_attack;
    if (s.has_peak_reference && s.samples_since_prev_peak > t_high) {
      const auto period = static_cast<double>(s.samples_since_prev_peak - t_high);
      s.breath_period = s.has_period ? smooth(s.breath_period, s.alpha_smooth, period) : period;
      s.has_period = true;
      s.rr = 60.0 * s.sample_rate / s.breath_period;
    }
    s.has_peak_reference = true;
    s.samples_since_prev_peak = t_high;
  }

  s.metrics_valid = s.has_pip && s.has_peep && s.has_period;
  return out;
}

double coefficient_for_rate(double alpha_ref, double f_ref, double f_s) {
  if (!is_unit_coefficient(alpha_ref)) throw ConfigError("reference coefficient must lie in [0, 1]");
  if (!(f_ref > 0.0) || !(f_s > 0.0) || !std::isfinite(f_ref) || !std::isfinite(f_s)) {
    throw ConfigError("sample rates must be positive");
  }
  if (alpha_ref == 0.0 || alpha_ref == 1.0) return alpha_ref;
  return std::pow(alpha_ref, f_ref / f_s);
}

}  // namespace ventmon
