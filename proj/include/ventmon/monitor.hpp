#pragma once

#include <cstdint>

#include "ventmon/envelope.hpp"

namespace ventmon {

/// Reference operating point of the attack coefficient.
inline constexpr double kDefaultAlphaAttack = 0.9;
inline constexpr double kReferenceRate = 100.0;
inline constexpr double kDefaultAlphaSmooth = 0.5;

enum class BreathPhase : std::uint8_t { Inhaling, Exhaling };

/// Raw, already rate-resolved coefficients for one stream.
struct MonitorConfig {
  double sample_rate = kReferenceRate;
  double alpha_attack = kDefaultAlphaAttack;
  double alpha_release = 0.999;
  double alpha_smooth = kDefaultAlphaSmooth;

  // Throws ConfigError on a non-positive rate or a coefficient outside
  // 0 <= alpha_attack <= alpha_release <= 1, alpha_smooth in [0, 1].
  void validate() const;
};

/// Complete per-stream state. Plain value: copyable, no heap, no sharing.
struct MonitorState {
  EnvelopeTracker high;
  EnvelopeTracker low;
  // Samples since the previous breath-cycle maximum.
  std::uint64_t samples_since_prev_peak = 0;
  // Accepted samples since initialization.
  std::uint64_t samples_seen = 0;
  double pip = 0.0;
  double peep = 0.0;
  // Smoothed breath period in samples; rr is derived from it.
  double breath_period = 0.0;
  double rr = 0.0;
  double alpha_smooth = kDefaultAlphaSmooth;
  double sample_rate = kReferenceRate;
  BreathPhase breath_phase = BreathPhase::Exhaling;
  bool metrics_valid = false;

  // Seeding bookkeeping: the first reading of each metric is assigned
  // directly, and a metric is only measured across a genuinely observed phase.
  bool has_pip = false;
  bool has_peep = false;
  bool has_period = false;
  bool has_peak_reference = false;
  bool exhale_observed = false;
};

struct StepOutput {
  bool high_attacked = false;
  bool low_attacked = false;
  bool phase_changed = false;
  bool metrics_updated = false;
  // Non-finite sample; state was left untouched.
  bool rejected = false;
};

/// Initializes both envelopes at `first_sample`, phase Exhaling, metrics
/// invalid. Throws ConfigError for an invalid config or non-finite sample.
MonitorState monitor_init(const MonitorConfig& config, double first_sample);

/// One iteration of the monitoring loop: both envelope updates, the breath
/// phase machine and the once-per-breath PIP/PEEP/RR updates.
StepOutput monitor_step(MonitorState& state, double p) noexcept;

/// Scales a coefficient given at `f_ref` to rate `f_s` so that the decay per
/// unit time is unchanged: alpha_ref^(f_ref / f_s). 0 and 1 map to themselves.
double coefficient_for_rate(double alpha_ref, double f_ref, double f_s);

}  // namespace ventmon
