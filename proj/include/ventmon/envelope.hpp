#pragma once

#include <cmath>
#include <cstdint>

namespace ventmon {

enum class EnvelopeDirection : std::uint8_t { High, Low };

enum class EnvelopeUpdate : std::uint8_t { Release, Attack, Rejected };

// Nonlinear one-pole tracker. A High tracker follows the top of the signal
// (fast rise, slow fall); a Low tracker follows the bottom.
struct EnvelopeTracker {
  double value = 0.0;
  double alpha_attack = 0.9;
  double alpha_release = 0.999;
  // Most recent sample that put the tracker into attack mode.
  double last_attack_value = 0.0;
  std::uint64_t samples_since_attack = 0;
  EnvelopeDirection direction = EnvelopeDirection::High;

  // Throws ConfigError unless 0 <= alpha_attack <= alpha_release <= 1 and
  // `initial` is finite.
  static EnvelopeTracker make(EnvelopeDirection direction, double initial,
                              double alpha_attack, double alpha_release);
};

// One-pole update toward `p`. Written as v + (1 - a)(p - v) so that p == v
// is an exact fixed point.
inline double envelope_blend(double value, double alpha, double p) noexcept {
  return value + (1.0 - alpha) * (p - value);
}

/// Advances the tracker by one sample. Ties (p == value) take the attack
/// branch. A non-finite sample is rejected and leaves the tracker untouched.
inline EnvelopeUpdate envelope_step(EnvelopeTracker& tracker, double p) noexcept {
  if (!std::isfinite(p)) return EnvelopeUpdate::Rejected;
  const bool attack = tracker.direction == EnvelopeDirection::High
                          ? p >= tracker.value
                          : p <= tracker.value;
  if (attack) {
    tracker.value = envelope_blend(tracker.value, tracker.alpha_attack, p);
    tracker.last_attack_value = p;
    tracker.samples_since_attack = 0;
    return EnvelopeUpdate::Attack;
  }
  tracker.value = envelope_blend(tracker.value, tracker.alpha_release, p);
  ++tracker.samples_since_attack;
  return EnvelopeUpdate::Release;
}

}  // namespace ventmon
