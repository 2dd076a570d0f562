#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ventmon/alarms.hpp"
#include "ventmon/replay.hpp"
#include "ventmon/waveform_sim.hpp"

namespace ventmon {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

/// "TimeSinceHighAttack|EnvelopeRatio"-style rendering of a cause mask.
std::string format_causes(std::uint8_t causes);

// time_sec,pressure_cmh2o
void write_trace_csv(std::ostream& out, const PressureTrace& trace);
// time_sec,sample,event,detail,value
void write_annotations_csv(std::ostream& out, const PressureTrace& trace);
// breath,sample,pip,peep,rr
void write_metrics_csv(std::ostream& out, const MetricSeries& metrics);
// sample,pressure,v_high,v_low,phase
void write_envelope_csv(std::ostream& out, const std::vector<EnvelopeSample>& envelope);
// sample_index,time_sec,kind,edge,detail
void write_alarm_csv(std::ostream& out, const std::vector<AlarmEvent>& events, double sample_rate);

/// Writes to a sibling temporary file and renames it into place.
/// Throws IoError on failure.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace ventmon
