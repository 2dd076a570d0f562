#pragma once

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

namespace ventmon {

/// Dial settings of a pressure-cycled ventilator. Pressures in cm H2O (gauge),
/// time constants in seconds.
///
/// Inhalation relaxes toward a source pressure slightly above PIP and
/// switches to exhalation when the airway reaches PIP. Exhalation relaxes
/// toward atmospheric (0) and switches back when the airway reaches PEEP.
struct VentilatorSettings {
  double pip_setpoint = 36.0;
  double r_nom = 2.4;
  double expiratory_time_constant = 2.56;
  double inspiratory_time_constant = 0.3;
  double atmospheric_noise_std = 0.1;
  // Source pressure = pip_setpoint * (1 + source_margin).
  double source_margin = 0.05;

  double peep() const noexcept { return pip_setpoint / r_nom; }
  double source_pressure() const noexcept { return pip_setpoint * (1.0 + source_margin); }
  double inspiratory_time() const noexcept;
  double expiratory_time() const noexcept;
  double breath_period() const noexcept { return inspiratory_time() + expiratory_time(); }

  void validate() const;

  /// Settings whose expiratory time constant gives exactly `breaths_per_min`.
  /// Throws ConfigError when inhalation alone exceeds the requested period.
  static VentilatorSettings for_breath_rate(double pip, double r_nom, double breaths_per_min,
                                            double inspiratory_time_constant = 0.3,
                                            double noise_std = 0.1);
};

enum class FaultKind : std::uint8_t {
  // Circuit opens: pressure relaxes to `level` (atmospheric by default), no cycling.
  Disconnect,
  // Circuit blocked: pressure holds at the current value (or relaxes to
  // `level`), plus an optional sinusoid of `amplitude`.
  Obstruction,
  // Patient-initiated dip below PEEP toward `level`; cycling resumes afterwards.
  SpontaneousBreath,
  // Constant `level` plus bounded uniform noise of `amplitude`.
  NoisyPlateau,
};

std::string_view to_string(FaultKind kind) noexcept;
FaultKind fault_kind_from_string(std::string_view name);

struct Fault {
  double start = 0.0;
  FaultKind kind = FaultKind::Disconnect;
  double duration = 0.0;
  // NaN selects the per-kind default (see FaultKind).
  double level = std::numeric_limits<double>::quiet_NaN();
  double amplitude = 0.0;
  double time_constant = 0.2;
};

struct SettingsChange {
  double time = 0.0;
  VentilatorSettings settings;
};

struct Scenario {
  double duration = 0.0;
  // Sorted; the first entry must be at time 0.
  std::vector<SettingsChange> settings_timeline;
  // Sorted and non-overlapping.
  std::vector<Fault> faults;

  void validate() const;
};

enum class AnnotationKind : std::uint8_t {
  InhalationStart,
  ExhalationStart,
  FaultStart,
  FaultEnd,
  SettingsChange,
};

std::string_view to_string(AnnotationKind kind) noexcept;

/// Ground-truth marker. `sample_index` is the first sample at or after `time`.
struct Annotation {
  double time = 0.0;
  std::uint64_t sample_index = 0;
  AnnotationKind kind = AnnotationKind::InhalationStart;
  // Airway pressure at the event (noise free).
  double value = 0.0;
  FaultKind fault = FaultKind::Disconnect;
};

struct PressureTrace {
  std::vector<double> samples;
  double sample_rate = 100.0;
  std::vector<Annotation> annotations;

  double duration() const noexcept {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

inline constexpr std::uint64_t kDefaultSeed = 1;

/// Deterministic in (scenario, sample_rate, seed). Throws ConfigError for an
/// invalid scenario or a sample rate below 1.
PressureTrace simulate(const Scenario& scenario, double sample_rate,
                       std::uint64_t seed = kDefaultSeed);

}  // namespace ventmon
