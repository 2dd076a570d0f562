#include "ventmon/scenario_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>
#include <vector>

#include "ventmon/errors.hpp"
#include "ventmon/trace_io.hpp"

namespace ventmon {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("scenario line " + std::to_string(line) + ": " + msg);
}

double parse_number(std::string_view text, int line) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) fail(line, "expected a number, got '" + std::string(text) + "'");
  return v;
}

std::vector<std::string> split_words(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> words;
  for (std::string w; ss >> w;) words.push_back(w);
  return words;
}

std::pair<std::string, double> parse_key_value(const std::string& word, int line) {
  const auto eq = word.find('=');
  if (eq == std::string::npos || eq == 0) fail(line, "expected key=value, got '" + word + "'");
  return {word.substr(0, eq), parse_number(std::string_view(word).substr(eq + 1), line)};
}

}  // namespace

Scenario parse_scenario(std::istream& in) {
  Scenario sc;
  std::optional<double> duration;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto words = split_words(line);
    if (words.empty()) continue;
    const std::string& directive = words[0];

    if (directive == "duration") {
      if (words.size() != 2) fail(line_no, "usage: duration <seconds>");
      duration = parse_number(words[1], line_no);
    } else if (directive == "settings") {
      if (words.size() < 2) fail(line_no, "usage: settings <time> key=value...");
      SettingsChange change;
      change.time = parse_number(words[1], line_no);
      if (!sc.settings_timeline.empty()) change.settings = sc.settings_timeline.back().settings;
      std::optional<double> bpm;
      for (std::size_t i = 2; i < words.size(); ++i) {
        const auto [key, value] = parse_key_value(words[i], line_no);
        if (key == "pip") change.settings.pip_setpoint = value;
        else if (key == "r_nom") change.settings.r_nom = value;
        else if (key == "tau_e") change.settings.expiratory_time_constant = value;
        else if (key == "tau_i") change.settings.inspiratory_time_constant = value;
        else if (key == "noise") change.settings.atmospheric_noise_std = value;
        else if (key == "margin") change.settings.source_margin = value;
        else if (key == "bpm") bpm = value;
        else fail(line_no, "unknown settings key '" + key + "'");
      }
      auto& settings = change.settings;
      try {
        settings.validate();
      } catch (const ConfigError& e) {
        fail(line_no, e.what());
      }
      if (bpm) {
        const double exhale = 60.0 / *bpm - settings.inspiratory_time();
        if (!(*bpm > 0.0) || !(exhale > 0.0)) fail(line_no, "bpm is too fast for tau_i");
        settings.expiratory_time_constant = exhale / std::log(settings.r_nom);
      }
      sc.settings_timeline.push_back(change);
    } else if (directive == "fault") {
      if (words.size() < 3) fail(line_no, "usage: fault <time> <kind> key=value...");
      Fault f;
      f.start = parse_number(words[1], line_no);
      try {
        f.kind = fault_kind_from_string(words[2]);
      } catch (const ConfigError& e) {
        fail(line_no, e.what());
      }
      for (std::size_t i = 3; i < words.size(); ++i) {
        const auto [key, value] = parse_key_value(words[i], line_no);
        if (key == "duration") f.duration = value;
        else if (key == "level") f.level = value;
        else if (key == "amplitude") f.amplitude = value;
        else if (key == "tau") f.time_constant = value;
        else fail(line_no, "unknown fault key '" + key + "'");
      }
      sc.faults.push_back(f);
    } else {
      fail(line_no, "unknown directive '" + directive + "'");
    }
  }
  if (!duration) throw ConfigError("scenario: missing 'duration' line");
  sc.duration = *duration;
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file '" + path.string() + "'");
  return parse_scenario(in);
}

std::string format_scenario(const Scenario& sc) {
  std::string out = "duration " + format_number(sc.duration) + "\n";
  for (const auto& change : sc.settings_timeline) {
    const auto& s = change.settings;
    out += "settings " + format_number(change.time) + " pip=" + format_number(s.pip_setpoint) +
           " r_nom=" + format_number(s.r_nom) + " tau_e=" + format_number(s.expiratory_time_constant) +
           " tau_i=" + format_number(s.inspiratory_time_constant) +
           " noise=" + format_number(s.atmospheric_noise_std) +
           " margin=" + format_number(s.source_margin) + "\n";
  }
  for (const auto& f : sc.faults) {
    out += "fault " + format_number(f.start) + " " + std::string(to_string(f.kind)) +
           " duration=" + format_number(f.duration);
    if (!std::isnan(f.level)) out += " level=" + format_number(f.level);
    out += " amplitude=" + format_number(f.amplitude) + " tau=" + format_number(f.time_constant) + "\n";
  }
  return out;
}

}  // namespace ventmon
