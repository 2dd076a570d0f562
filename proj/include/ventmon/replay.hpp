#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ventmon/alarms.hpp"
#include "ventmon/monitor.hpp"
#include "ventmon/waveform_sim.hpp"

namespace ventmon {

/// One record per completed breath cycle, taken when PIP and RR update.
struct MetricRecord {
  std::uint64_t breath = 0;
  std::uint64_t sample = 0;
  double time_sec = 0.0;
  double pip = 0.0;
  double peep = 0.0;
  double rr = 0.0;
};

struct MetricSeries {
  double sample_rate = 100.0;
  std::vector<MetricRecord> records;
};

struct EnvelopeSample {
  double pressure = 0.0;
  double v_high = 0.0;
  double v_low = 0.0;
  BreathPhase phase = BreathPhase::Exhaling;
};

struct ReplayResult {
  MetricSeries metrics;
  // Empty when the alarm config is muted.
  std::vector<AlarmEvent> alarms;
  // One entry per input sample.
  std::vector<EnvelopeSample> envelope;
};

/// Parses `time_sec,pressure` rows (header optional) and resamples onto a
/// uniform grid at `sample_rate` by zero-order hold, starting at the first
/// timestamp. Throws DataError (Empty, Malformed, NonMonotoneTime,
/// NonFinitePressure) or ConfigError for a non-positive rate.
PressureTrace ingest_csv(std::istream& in, double sample_rate);

/// Keeps every `factor`-th sample starting at index 0. No anti-alias filter.
/// Annotations are re-indexed onto the coarser grid.
PressureTrace decimate(const PressureTrace& trace, int factor);

enum class Metric { Pip, Rr };

/// Root-mean-square difference between each candidate record and the
/// reference record nearest in time. Throws ConfigError on an empty series.
double rms_metric_error(const MetricSeries& reference, const MetricSeries& candidate, Metric metric);

/// Runs the monitor and alarm engine over every sample. The monitor config
/// must be resolved for the trace's sample rate.
ReplayResult run_monitor_over_trace(const PressureTrace& trace, const MonitorConfig& monitor,
                                    const AlarmConfig& alarms);

/// Default coefficients for `sample_rate`: attack scaled from its reference
/// rate, release calibrated from the alarm thresholds.
MonitorConfig resolve_monitor_config(double sample_rate, const AlarmConfig& alarms,
                                     double alpha_attack_ref = kDefaultAlphaAttack,
                                     double reference_rate = kReferenceRate,
                                     double alpha_smooth = kDefaultAlphaSmooth);

}  // namespace ventmon
