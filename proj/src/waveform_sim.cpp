#include "ventmon/waveform_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include "ventmon/errors.hpp"

namespace ventmon {

namespace {

constexpr double kObstructionOscillationPeriod = 1.0;

double relax(double p, double target, double tau, double dt) {
  return target + (p - target) * std::exp(-dt / tau);
}

enum class ModulatorPhase { Inhaling, Exhaling };

enum class EventType { FaultEnd, SettingsChange, FaultStart };

struct Event {
  double time;
  EventType type;
  std::size_t index;
};

class Simulator {
 public:
  Simulator(const Scenario& scenario, double sample_rate, std::uint64_t seed)
      : scenario_(scenario),
        sample_rate_(sample_rate),
        rng_(seed),
        settings_(scenario.settings_timeline.front().settings),
        p_(settings_.peep()) {
    for (std::size_t i = 1; i < scenario.settings_timeline.size(); ++i) {
      events_.push_back({scenario.settings_timeline[i].time, EventType::SettingsChange, i});
    }
    for (std::size_t i = 0; i < scenario.faults.size(); ++i) {
      const Fault& f = scenario.faults[i];
      if (f.duration <= 0.0) continue;
      events_.push_back({f.start, EventType::FaultStart, i});
      events_.push_back({f.start + f.duration, EventType::FaultEnd, i});
    }
    // Ties: close a fault before opening the next one.
    std::stable_sort(events_.begin(), events_.end(), [](const Event& a, const Event& b) {
      if (a.time != b.time) return a.time < b.time;
      return static_cast<int>(a.type) < static_cast<int>(b.type);
    });
    annotate(0.0, AnnotationKind::InhalationStart, p_);
  }

  PressureTrace run() {
    const auto n = static_cast<std::size_t>(std::floor(scenario_.duration * sample_rate_ + 1e-9));
    trace_.sample_rate = sample_rate_;
    trace_.samples.reserve(n);
    std::normal_distribution<double> sensor_noise(0.0, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double t_k = static_cast<double>(k) / sample_rate_;
      advance(t_k);
      double sample = observed_pressure(t_k);
      const double z = sensor_noise(rng_);
      if (settings_.atmospheric_noise_std > 0.0) sample += settings_.atmospheric_noise_std * z;
      trace_.samples.push_back(sample);
    }
    return std::move(trace_);
  }

 private:
  void advance(double target) {
    while (next_event_ < events_.size() && events_[next_event_].time <= target) {
      const Event& e = events_[next_event_++];
      evolve(e.time);
      apply(e);
    }
    evolve(target);
  }

  void evolve(double t_to) {
    double remaining = t_to - t_;
    if (remaining <= 0.0) return;
    if (fault_) {
      evolve_fault(remaining);
      t_ = t_to;
      return;
    }
    while (remaining > 0.0) {
      const double elapsed_so_far = (t_to - remaining) - t_;
      if (phase_ == ModulatorPhase::Inhaling) {
        const double src = settings_.source_pressure();
        const double pip = settings_.pip_setpoint;
        const double to_switch =
            p_ >= pip ? 0.0 : settings_.inspiratory_time_constant * std::log((src - p_) / (src - pip));
        if (to_switch < remaining) {
          p_ = pip;
          remaining -= to_switch;
          phase_ = ModulatorPhase::Exhaling;
          annotate(t_ + elapsed_so_far + to_switch, AnnotationKind::ExhalationStart, p_);
          continue;
        }
        p_ = relax(p_, src, settings_.inspiratory_time_constant, remaining);
      } else {
        const double peep = settings_.peep();
        const double to_switch =
            p_ <= peep ? 0.0 : settings_.expiratory_time_constant * std::log(p_ / peep);
        if (to_switch < remaining) {
          p_ = peep;
          remaining -= to_switch;
          phase_ = ModulatorPhase::Inhaling;
          annotate(t_ + elapsed_so_far + to_switch, AnnotationKind::InhalationStart, p_);
          continue;
        }
        p_ = relax(p_, 0.0, settings_.expiratory_time_constant, remaining);
      }
      remaining = 0.0;
    }
    t_ = t_to;
  }

  void evolve_fault(double dt) {
    const Fault& f = scenario_.faults[*fault_];
    switch (f.kind) {
      case FaultKind::Disconnect:
      case FaultKind::SpontaneousBreath:
        p_ = relax(p_, fault_target_, f.time_constant, dt);
        break;
      case FaultKind::Obstruction:
        if (!std::isnan(f.level)) p_ = relax(p_, fault_target_, f.time_constant, dt);
        break;
      case FaultKind::NoisyPlateau:
        break;
    }
  }

  double observed_pressure(double t) {
    if (!fault_) return p_;
    const Fault& f = scenario_.faults[*fault_];
    if (f.kind == FaultKind::Obstruction && f.amplitude > 0.0) {
      return p_ + f.amplitude * std::sin(2.0 * std::numbers::pi * (t - f.start) /
                                         kObstructionOscillationPeriod);
    }
    if (f.kind == FaultKind::NoisyPlateau && f.amplitude > 0.0) {
      std::uniform_real_distribution<double> bounded(-f.amplitude, f.amplitude);
      return p_ + bounded(rng_);
    }
    return p_;
  }

  void apply(const Event& e) {
    switch (e.type) {
      case EventType::SettingsChange: {
        const auto& change = scenario_.settings_timeline[e.index];
        if (fault_) {
          pending_settings_ = change.settings;
        } else {
          settings_ = change.settings;
        }
        annotate(e.time, AnnotationKind::SettingsChange, p_);
        break;
      }
      case EventType::FaultStart: {
        const Fault& f = scenario_.faults[e.index];
        fault_ = e.index;
        switch (f.kind) {
          case FaultKind::Disconnect: fault_target_ = std::isnan(f.level) ? 0.0 : f.level; break;
          case FaultKind::SpontaneousBreath: fault_target_ = std::isnan(f.level) ? 1.0 : f.level; break;
          case FaultKind::Obstruction: fault_target_ = std::isnan(f.level) ? p_ : f.level; break;
          case FaultKind::NoisyPlateau:
            if (!std::isnan(f.level)) p_ = f.level;
            fault_target_ = p_;
            break;
        }
        annotate(e.time, AnnotationKind::FaultStart, p_, f.kind);
        break;
      }
      case EventType::FaultEnd: {
        if (fault_ != e.index) break;
        const FaultKind kind = scenario_.faults[e.index].kind;
        fault_.reset();
        if (pending_settings_) {
          settings_ = *pending_settings_;
          pending_settings_.reset();
        }
        if (p_ <= settings_.peep()) {
          phase_ = ModulatorPhase::Inhaling;
        } else if (p_ >= settings_.pip_setpoint) {
          phase_ = ModulatorPhase::Exhaling;
        }
        annotate(e.time, AnnotationKind::FaultEnd, p_, kind);
        break;
      }
    }
  }

  void annotate(double time, AnnotationKind kind, double value,
                FaultKind fault = FaultKind::Disconnect) {
    Annotation a;
    a.time = time;
    a.sample_index = static_cast<std::uint64_t>(std::max(0.0, std::ceil(time * sample_rate_ - 1e-9)));
    a.kind = kind;
    a.value = value;
    a.fault = fault;
    trace_.annotations.push_back(a);
  }

  const Scenario& scenario_;
  double sample_rate_;
  std::mt19937_64 rng_;
  VentilatorSettings settings_;
  std::optional<VentilatorSettings> pending_settings_;
  double p_;
  double t_ = 0.0;
  ModulatorPhase phase_ = ModulatorPhase::Inhaling;
  std::optional<std::size_t> fault_;
  double fault_target_ = 0.0;
  std::vector<Event> events_;
  std::size_t next_event_ = 0;
  PressureTrace trace_;
};

}  // namespace

double VentilatorSettings::inspiratory_time() const noexcept {
  const double src = source_pressure();
  return inspiratory_time_constant * std::log((src - peep()) / (src - pip_setpoint));
}

double VentilatorSettings::expiratory_time() const noexcept {
  return expiratory_time_constant * std::log(r_nom);
}

void VentilatorSettings::validate() const {
  if (!std::isfinite(pip_setpoint) || !(pip_setpoint > 0.0)) throw ConfigError("pip_setpoint must be positive");
  if (!std::isfinite(r_nom) || !(r_nom > 1.0)) throw ConfigError("r_nom must be greater than 1");
  if (!std::isfinite(expiratory_time_constant) || !(expiratory_time_constant > 0.0) ||
      !std::isfinite(inspiratory_time_constant) || !(inspiratory_time_constant > 0.0)) {
    throw ConfigError("time constants must be positive");
  }
  if (!std::isfinite(atmospheric_noise_std) || atmospheric_noise_std < 0.0) {
    throw ConfigError("noise std must be non-negative");
  }
  if (!std::isfinite(source_margin) || !(source_margin > 0.0)) {
    throw ConfigError("source_margin must be positive");
  }
}

VentilatorSettings VentilatorSettings::for_breath_rate(double pip, double r_nom,
                                                       double breaths_per_min,
                                                       double inspiratory_time_constant,
                                                       double noise_std) {
  VentilatorSettings s;
  s.pip_setpoint = pip;
  s.r_nom = r_nom;
  s.inspiratory_time_constant = inspiratory_time_constant;
  s.atmospheric_noise_std = noise_std;
  s.validate();
  if (!(breaths_per_min > 0.0)) throw ConfigError("breath rate must be positive");
  const double exhale = 60.0 / breaths_per_min - s.inspiratory_time();
  if (!(exhale > 0.0)) {
    throw ConfigError("breath rate " + std::to_string(breaths_per_min) +
                      " is too fast for the inspiratory time constant");
  }
  s.expiratory_time_constant = exhale / std::log(r_nom);
  return s;
}

std::string_view to_string(FaultKind kind) noexcept {
  switch (kind) {
    case FaultKind::Disconnect: return "disconnect";
    case FaultKind::Obstruction: return "obstruction";
    case FaultKind::SpontaneousBreath: return "spontaneous-breath";
    case FaultKind::NoisyPlateau: return "noisy-plateau";
  }
  return "?";
}

FaultKind fault_kind_from_string(std::string_view name) {
  for (auto k : {FaultKind::Disconnect, FaultKind::Obstruction, FaultKind::SpontaneousBreath,
                 FaultKind::NoisyPlateau}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown fault kind '" + std::string(name) + "'");
}

std::string_view to_string(AnnotationKind kind) noexcept {
  switch (kind) {
    case AnnotationKind::InhalationStart: return "inhalation-start";
    case AnnotationKind::ExhalationStart: return "exhalation-start";
    case AnnotationKind::FaultStart: return "fault-start";
    case AnnotationKind::FaultEnd: return "fault-end";
    case AnnotationKind::SettingsChange: return "settings-change";
  }
  return "?";
}

void Scenario::validate() const {
  if (!std::isfinite(duration) || duration < 0.0) throw ConfigError("scenario duration must be >= 0");
  if (settings_timeline.empty()) throw ConfigError("scenario needs at least one settings entry");
  if (settings_timeline.front().time != 0.0) throw ConfigError("first settings entry must be at time 0");
  double prev = 0.0;
  for (const auto& change : settings_timeline) {
    if (!(change.time >= prev) || change.time > duration) {
      throw ConfigError("settings timeline must be sorted and within [0, duration]");
    }
    change.settings.validate();
    prev = change.time;
  }
  double prev_end = 0.0;
  for (const auto& f : faults) {
    if (!std::isfinite(f.start) || f.start < 0.0 || f.start > duration) {
      throw ConfigError("fault start must lie within [0, duration]");
    }
    if (!std::isfinite(f.duration) || f.duration < 0.0) throw ConfigError("fault duration must be >= 0");
    if (f.start < prev_end) throw ConfigError("faults must be sorted and non-overlapping");
    if (!std::isfinite(f.time_constant) || !(f.time_constant > 0.0)) {
      throw ConfigError("fault time constant must be positive");
    }
    if (!std::isfinite(f.amplitude) || f.amplitude < 0.0) throw ConfigError("fault amplitude must be >= 0");
    if (std::isinf(f.level)) throw ConfigError("fault level must be finite");
    prev_end = f.start + f.duration;
  }
}

PressureTrace simulate(const Scenario& scenario, double sample_rate, std::uint64_t seed) {
  scenario.validate();
  if (!std::isfinite(sample_rate) || sample_rate < 1.0) throw ConfigError("sample rate must be >= 1");
  return Simulator(scenario, sample_rate, seed).run();
}

}  // namespace ventmon
