#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ventmon/waveform_sim.hpp"

namespace ventmon {

// Plain-text scenario description, one directive per line:
//
//   # comment
//   duration 60
//   settings 0  pip=36 r_nom=2.4 bpm=20 tau_i=0.3 noise=0.1
//   settings 30 pip=28
//   fault 24.5 disconnect duration=25 level=8 tau=0.5
//
// `settings` keys: pip, r_nom, tau_e, tau_i, noise, margin, bpm. Omitted keys
// inherit from the previous settings line; `bpm` derives tau_e. `fault`
// kinds: disconnect, obstruction, spontaneous-breath, noisy-plateau; keys:
// duration, level, amplitude, tau.
//
// Malformed input throws ConfigError naming the line.
Scenario parse_scenario(std::istream& in);

/// Throws IoError when the file cannot be read.
Scenario load_scenario(const std::filesystem::path& path);

/// Inverse of parse_scenario (tau_e written explicitly, never bpm).
std::string format_scenario(const Scenario& scenario);

}  // namespace ventmon
