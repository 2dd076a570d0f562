#include "ventmon/golden.hpp"

#include "ventmon/calibration.hpp"
#include "ventmon/errors.hpp"

namespace ventmon {

namespace {

constexpr std::uint8_t bit(AlarmKind k) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(k)); }

constexpr std::uint8_t kAllAlarms = 0x1f;

VentilatorSettings reference_settings() {
  return VentilatorSettings::for_breath_rate(36.0, kDefaultNominalRatio, 20.0);
}

// Start of the n-th exhalation (the n-th pressure peak) for a fault-free run
// that begins at PEEP.
double peak_time(const VentilatorSettings& s, int n) {
  return s.inspiratory_time() + n * s.breath_period();
}

Scenario cycling(const VentilatorSettings& s, double duration) {
  Scenario sc;
  sc.duration = duration;
  sc.settings_timeline.push_back({0.0, s});
  return sc;
}

Fault make_fault(FaultKind kind, double start, double duration, double level, double tau,
                 double amplitude = 0.0) {
  Fault f;
  f.kind = kind;
  f.start = start;
  f.duration = duration;
  f.level = level;
  f.time_constant = tau;
  f.amplitude = amplitude;
  return f;
}

}  // namespace

std::vector<GoldenScenario> golden_scenarios() {
  const VentilatorSettings ref = reference_settings();
  std::vector<GoldenScenario> out;

  out.push_back({"normal", "fault-free cycling at 20 breaths/min, PIP 36, PEEP 15",
                 cycling(ref, 120.0), 0, kAllAlarms});

  out.push_back({"fast-breathing", "fault-free cycling at 36 breaths/min, PIP 36, PEEP 15",
                 cycling(VentilatorSettings::for_breath_rate(36.0, kDefaultNominalRatio, 36.0), 120.0), 0,
                 kAllAlarms});

  {
    Scenario sc = cycling(ref, 60.0);
    // Patient pulls the airway toward atmospheric at the end of an exhalation.
    sc.faults.push_back(make_fault(FaultKind::SpontaneousBreath, 10 * ref.breath_period(), 0.4, 1.0, 0.15));
    out.push_back({"spontaneous-breath", "patient-triggered dip to near atmospheric at end of exhalation",
                   sc, bit(AlarmKind::LowPressure),
                   static_cast<std::uint8_t>(kAllAlarms & ~bit(AlarmKind::LowPressure))});
  }
  {
    Scenario sc = cycling(ref, 50.0);
    const double start = peak_time(ref, 8) + 0.5;
    sc.faults.push_back(make_fault(FaultKind::Disconnect, start, sc.duration - start, 8.0, 0.5));
    out.push_back({"rollover-disconnect", "circuit breaks and the airway settles at a steady 8 cm H2O",
                   sc, bit(AlarmKind::Noncycling),
                   static_cast<std::uint8_t>(kAllAlarms & ~bit(AlarmKind::Noncycling))});
  }
  {
    Scenario sc = cycling(ref, 60.0);
    const double start = peak_time(ref, 8);
    sc.faults.push_back(make_fault(FaultKind::Disconnect, start, sc.duration - start, 0.0, 0.2));
    out.push_back({"disconnect", "circuit disconnected at a pressure peak; airway vents to atmospheric",
                   sc, static_cast<std::uint8_t>(bit(AlarmKind::LowPressure) | bit(AlarmKind::Noncycling)),
                   static_cast<std::uint8_t>(bit(AlarmKind::HighPressure) | bit(AlarmKind::HighRR))});
  }
  {
    Scenario sc = cycling(ref, 60.0);
    const double start = peak_time(ref, 8) + 1.0;
    sc.faults.push_back(make_fault(FaultKind::Disconnect, start, 0.5, 0.0, 0.1));
    sc.faults.push_back(make_fault(FaultKind::Obstruction, start + 0.5, 20.0, 30.0, 0.3));
    out.push_back({"deliberate-blockage", "momentary drop, then the circuit is held blocked near 30 cm H2O",
                   sc, static_cast<std::uint8_t>(bit(AlarmKind::LowPressure) | bit(AlarmKind::Noncycling)),
                   static_cast<std::uint8_t>(bit(AlarmKind::HighPressure) | bit(AlarmKind::HighRR))});
  }
  {
    Scenario sc = cycling(ref, 90.0);
    VentilatorSettings lowered = ref;
    lowered.pip_setpoint = 28.0;
    sc.settings_timeline.push_back({30.0, lowered});
    out.push_back({"pip-dial-drop", "PIP dial turned from 36 to 28 cm H2O; peaks are missed while the high envelope decays",
                   sc, 0, static_cast<std::uint8_t>(bit(AlarmKind::Noncycling) | bit(AlarmKind::LowPressure) |
                                                     bit(AlarmKind::HighPressure))});
  }
  {
    Scenario sc = cycling(ref, 60.0);
    const double start = peak_time(ref, 8) + 0.5;
    sc.faults.push_back(make_fault(FaultKind::NoisyPlateau, start, sc.duration - start, 25.0, 0.2, 1.0));
    out.push_back({"noisy-plateau", "obstruction holding 25 cm H2O with +/-1 cm H2O fluctuation",
                   sc, bit(AlarmKind::Noncycling),
                   static_cast<std::uint8_t>(bit(AlarmKind::LowPressure) | bit(AlarmKind::HighPressure))});
  }
  {
    VentilatorSettings clean = ref;
    clean.atmospheric_noise_std = 0.0;
    Scenario sc = cycling(clean, 50.0);
    const double start = peak_time(clean, 8);
    sc.faults.push_back(make_fault(FaultKind::NoisyPlateau, start, sc.duration - start, clean.peep(), 0.2));
    out.push_back({"drop-to-peep", "noise-free cycling that falls from PIP to a constant PEEP",
                   sc, bit(AlarmKind::Noncycling),
                   static_cast<std::uint8_t>(bit(AlarmKind::LowPressure) | bit(AlarmKind::HighPressure))});
  }
  return out;
}

std::vector<std::string> golden_names() {
  std::vector<std::string> names;
  for (const auto& g : golden_scenarios()) names.push_back(g.name);
  return names;
}

GoldenScenario find_golden(const std::string& name) {
  std::string available;
  for (auto& g : golden_scenarios()) {
    if (g.name == name) return g;
    if (!available.empty()) available += ", ";
    available += g.name;
  }
  throw ConfigError("unknown golden scenario '" + name + "'; available: " + available);
}

}  // namespace ventmon
