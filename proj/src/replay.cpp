#include "ventmon/replay.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <string>
#include <string_view>

#include "ventmon/calibration.hpp"
#include "ventmon/errors.hpp"

namespace ventmon {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

struct Row {
  double time;
  double pressure;
};

}  // namespace

PressureTrace ingest_csv(std::istream& in, double sample_rate) {
  if (!std::isfinite(sample_rate) || !(sample_rate > 0.0)) {
    throw ConfigError("declared sample rate must be positive");
  }
  std::vector<Row> rows;
  int line_no = 0;
  bool first_content = true;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto comma = text.find(',');
    Row row{};
    const bool ok = comma != std::string_view::npos &&
                    parse_double(text.substr(0, comma), row.time) &&
                    parse_double(text.substr(comma + 1), row.pressure);
    if (!ok) {
      if (first_content) {  // header
        first_content = false;
        continue;
      }
      throw DataError(DataError::Reason::Malformed,
                      "line " + std::to_string(line_no) + ": expected 'time_sec,pressure'");
    }
    first_content = false;
    if (!std::isfinite(row.time)) {
      throw DataError(DataError::Reason::Malformed, "line " + std::to_string(line_no) + ": non-finite timestamp");
    }
    if (!std::isfinite(row.pressure)) {
      throw DataError(DataError::Reason::NonFinitePressure,
                      "line " + std::to_string(line_no) + ": non-finite pressure");
    }
    if (!rows.empty() && !(row.time > rows.back().time)) {
      throw DataError(DataError::Reason::NonMonotoneTime,
                      "line " + std::to_string(line_no) + ": timestamps must be strictly increasing");
    }
    rows.push_back(row);
  }
  if (rows.empty()) throw DataError(DataError::Reason::Empty, "no pressure samples in input");

  // Zero-order hold onto t0 + k / fs. The slack absorbs decimal rounding of
  // timestamps that sit exactly on the grid.
  PressureTrace trace;
  trace.sample_rate = sample_rate;
  const double t0 = rows.front().time;
  const double slack = 1e-9 / sample_rate;
  std::size_t j = 0;
  for (std::size_t k = 0;; ++k) {
    const double t = t0 + static_cast<double>(k) / sample_rate;
    if (t > rows.back().time + slack) break;
    while (j + 1 < rows.size() && rows[j + 1].time <= t + slack) ++j;
    trace.samples.push_back(rows[j].pressure);
  }
  return trace;
}

PressureTrace decimate(const PressureTrace& trace, int factor) {
  if (factor < 1) throw ConfigError("decimation factor must be >= 1, got " + std::to_string(factor));
  PressureTrace out;
  out.sample_rate = trace.sample_rate / factor;
  out.samples.reserve(trace.samples.size() / static_cast<std::size_t>(factor) + 1);
  for (std::size_t k = 0; k < trace.samples.size(); k += static_cast<std::size_t>(factor)) {
    out.samples.push_back(trace.samples[k]);
  }
  out.annotations = trace.annotations;
  for (auto& a : out.annotations) {
    a.sample_index = static_cast<std::uint64_t>(std::max(0.0, std::ceil(a.time * out.sample_rate - 1e-9)));
  }
  return out;
}

double rms_metric_error(const MetricSeries& reference, const MetricSeries& candidate, Metric metric) {
  if (reference.records.empty() || candidate.records.empty()) {
    throw ConfigError("RMS comparison needs two non-empty metric series");
  }
  const auto value = [metric](const MetricRecord& r) { return metric == Metric::Pip ? r.pip : r.rr; };
  const auto& ref = reference.records;
  double sum_sq = 0.0;
  for (const auto& c : candidate.records) {
    auto it = std::lower_bound(ref.begin(), ref.end(), c.time_sec,
                               [](const MetricRecord& r, double t) { return r.time_sec < t; });
    if (it == ref.end()) {
      it = std::prev(it);
    } else if (it != ref.begin() && c.time_sec - std::prev(it)->time_sec <= it->time_sec - c.time_sec) {
      it = std::prev(it);
    }
    const double d = value(c) - value(*it);
    sum_sq += d * d;
  }
  return std::sqrt(sum_sq / static_cast<double>(candidate.records.size()));
}

MonitorConfig resolve_monitor_config(double sample_rate, const AlarmConfig& alarms,
                                     double alpha_attack_ref, double reference_rate,
                                     double alpha_smooth) {
  alarms.validate();
  MonitorConfig cfg;
  cfg.sample_rate = sample_rate;
  cfg.alpha_attack = coefficient_for_rate(alpha_attack_ref, reference_rate, sample_rate);
  CalibrationInput cal;
  cal.r_min = alarms.r_min;
  cal.r_nom = alarms.r_nom;
  cal.t_max_samples = alarms.t_max_samples(sample_rate);
  cfg.alpha_release = release_coefficient(cal);
  cfg.alpha_smooth = alpha_smooth;
  cfg.validate();
  return cfg;
}

ReplayResult run_monitor_over_trace(const PressureTrace& trace, const MonitorConfig& monitor,
                                    const AlarmConfig& alarms) {
  if (trace.samples.empty()) throw DataError(DataError::Reason::Empty, "cannot replay an empty trace");
  if (monitor.sample_rate != trace.sample_rate) {
    throw ConfigError("monitor configured for " + std::to_string(monitor.sample_rate) +
                      " samples/sec but trace is at " + std::to_string(trace.sample_rate));
  }
  alarms.validate();

  ReplayResult result;
  result.metrics.sample_rate = trace.sample_rate;
  result.envelope.reserve(trace.samples.size());

  MonitorState state = monitor_init(monitor, trace.samples.front());
  AlarmSet previous;
  std::uint64_t breath = 0;
  for (std::size_t k = 0; k < trace.samples.size(); ++k) {
    const double p = trace.samples[k];
    const StepOutput out = monitor_step(state, p);
    if (out.rejected) {
      throw DataError(DataError::Reason::NonFinitePressure, "non-finite sample at index " + std::to_string(k));
    }
    const AlarmSet active = check_alarms(state, p, alarms);
    if (alarms.enabled) {
      for (const auto& e : alarm_edge_detector(previous, active, k)) result.alarms.push_back(e);
    }
    previous = active;

    if (out.phase_changed && state.breath_phase == BreathPhase::Exhaling && state.metrics_valid) {
      MetricRecord r;
      r.breath = breath++;
      r.sample = k;
      r.time_sec = static_cast<double>(k) / trace.sample_rate;
      r.pip = state.pip;
      r.peep = state.peep;
      r.rr = state.rr;
      result.metrics.records.push_back(r);
    }
    result.envelope.push_back({p, state.high.value, state.low.value, state.breath_phase});
  }
  return result;
}

}  // namespace ventmon
