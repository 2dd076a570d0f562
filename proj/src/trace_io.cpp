#include "ventmon/trace_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <ostream>
#include <system_error>

#include "ventmon/errors.hpp"

namespace ventmon {

std::string format_number(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), ptr);
}

std::string format_causes(std::uint8_t causes) {
  std::string out;
  for (auto c : {NoncyclingCause::TimeSinceHighAttack, NoncyclingCause::TimeSinceLowAttack,
                 NoncyclingCause::EnvelopeRatio, NoncyclingCause::EnvelopeDifference}) {
    if ((causes & static_cast<std::uint8_t>(c)) == 0) continue;
    if (!out.empty()) out += '|';
    out += to_string(c);
  }
  return out;
}

void write_trace_csv(std::ostream& out, const PressureTrace& trace) {
  out << "time_sec,pressure_cmh2o\n";
  for (std::size_t k = 0; k < trace.samples.size(); ++k) {
    out << format_number(static_cast<double>(k) / trace.sample_rate) << ','
        << format_number(trace.samples[k]) << '\n';
  }
}

void write_annotations_csv(std::ostream& out, const PressureTrace& trace) {
  out << "time_sec,sample,event,detail,value\n";
  for (const auto& a : trace.annotations) {
    out << format_number(a.time) << ',' << a.sample_index << ',' << to_string(a.kind) << ',';
    if (a.kind == AnnotationKind::FaultStart || a.kind == AnnotationKind::FaultEnd) {
      out << to_string(a.fault);
    }
    out << ',' << format_number(a.value) << '\n';
  }
}

void write_metrics_csv(std::ostream& out, const MetricSeries& metrics) {
  out << "breath,sample,pip,peep,rr\n";
  for (const auto& r : metrics.records) {
    out << r.breath << ',' << r.sample << ',' << format_number(r.pip) << ','
        << format_number(r.peep) << ',' << format_number(r.rr) << '\n';
  }
}

void write_envelope_csv(std::ostream& out, const std::vector<EnvelopeSample>& envelope) {
  out << "sample,pressure,v_high,v_low,phase\n";
  for (std::size_t k = 0; k < envelope.size(); ++k) {
    const auto& e = envelope[k];
    out << k << ',' << format_number(e.pressure) << ',' << format_number(e.v_high) << ','
        << format_number(e.v_low) << ','
        << (e.phase == BreathPhase::Inhaling ? "inhaling" : "exhaling") << '\n';
  }
}

void write_alarm_csv(std::ostream& out, const std::vector<AlarmEvent>& events, double sample_rate) {
  out << "sample_index,time_sec,kind,edge,detail\n";
  for (const auto& e : events) {
    out << e.sample_index << ',' << format_number(static_cast<double>(e.sample_index) / sample_rate)
        << ',' << to_string(e.kind) << ',' << to_string(e.edge) << ',' << format_causes(e.detail)
        << '\n';
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

}  // namespace ventmon
