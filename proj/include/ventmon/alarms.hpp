#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

#include "ventmon/monitor.hpp"

namespace ventmon {

enum class AlarmKind : std::uint8_t { HighPressure, LowPressure, HighRR, LowRR, Noncycling };
inline constexpr std::size_t kAlarmKindCount = 5;

// Bit flags; a Noncycling alarm may be carried by several at once.
enum class NoncyclingCause : std::uint8_t {
  TimeSinceHighAttack = 1u << 0,
  TimeSinceLowAttack = 1u << 1,
  EnvelopeRatio = 1u << 2,
  EnvelopeDifference = 1u << 3,
};

enum class AlarmEdge : std::uint8_t { Raised, Cleared };

std::string_view to_string(AlarmKind kind) noexcept;
std::string_view to_string(AlarmEdge edge) noexcept;
std::string_view to_string(NoncyclingCause cause) noexcept;

/// Set of active alarm kinds plus the Noncycling sub-conditions that fired.
struct AlarmSet {
  std::uint8_t kinds = 0;
  std::uint8_t noncycling_causes = 0;

  bool contains(AlarmKind k) const noexcept { return (kinds >> static_cast<unsigned>(k)) & 1u; }
  bool has_cause(NoncyclingCause c) const noexcept {
    return (noncycling_causes & static_cast<std::uint8_t>(c)) != 0;
  }
  void insert(AlarmKind k) noexcept { kinds |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(k)); }
  bool empty() const noexcept { return kinds == 0; }
  friend bool operator==(const AlarmSet&, const AlarmSet&) = default;
};

/// User-tunable alarm thresholds. Pressures in cm H2O, rates in breaths/min,
/// t_max in seconds.
struct AlarmConfig {
  double p_max = 40.0;
  double p_min = 5.0;
  double rr_max = 40.0;
  double rr_min = 6.0;
  double t_max = 15.0;
  double r_min = 1.5;
  double d_min = 3.0;
  // Nominal PIP-to-PEEP ratio of the paired ventilator; bounds r_min.
  double r_nom = 2.4;
  // Mute switch: gates event emission, never condition evaluation.
  bool enabled = true;

  // Throws ConfigError when any threshold is outside its tunable range.
  void validate() const;

  // t_max * f_s rounded to the nearest sample.
  std::uint64_t t_max_samples(double sample_rate) const;
};

/// Evaluates every alarm condition for the current sample. `p` is the raw
/// sample; the pressure alarms ignore the monitor state entirely. RR alarms
/// wait for valid metrics; the envelope ratio/difference tests wait for
/// valid metrics or for t_max worth of samples since initialization.
AlarmSet check_alarms(const MonitorState& state, double p, const AlarmConfig& config) noexcept;

struct AlarmEvent {
  AlarmKind kind = AlarmKind::HighPressure;
  AlarmEdge edge = AlarmEdge::Raised;
  std::uint64_t sample_index = 0;
  // NoncyclingCause bits active at the edge (Noncycling only).
  std::uint8_t detail = 0;
  friend bool operator==(const AlarmEvent&, const AlarmEvent&) = default;
};

/// Fixed-capacity result of one edge detection; at most one event per kind.
class AlarmEdges {
 public:
  const AlarmEvent* begin() const noexcept { return events_.data(); }
  const AlarmEvent* end() const noexcept { return events_.data() + count_; }
  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }
  const AlarmEvent& operator[](std::size_t i) const noexcept { return events_[i]; }
  void push(const AlarmEvent& e) noexcept { events_[count_++] = e; }

 private:
  std::array<AlarmEvent, kAlarmKindCount> events_{};
  std::size_t count_ = 0;
};

/// Raised for newly active kinds, Cleared for newly inactive ones, in
/// AlarmKind order.
AlarmEdges alarm_edge_detector(const AlarmSet& previous, const AlarmSet& current,
                               std::uint64_t sample_index) noexcept;

}  // namespace ventmon
