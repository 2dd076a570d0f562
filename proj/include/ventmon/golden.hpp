#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ventmon/alarms.hpp"
#include "ventmon/waveform_sim.hpp"

namespace ventmon {

/// A named reference scenario with the alarm outcome it is expected to
/// produce under the default alarm configuration.
struct GoldenScenario {
  std::string name;
  std::string description;
  Scenario scenario;
  // AlarmSet-style masks over AlarmKind bits.
  std::uint8_t expect_raised = 0;
  std::uint8_t expect_never = 0;
};

std::vector<GoldenScenario> golden_scenarios();

/// Throws ConfigError listing the available names when `name` is unknown.
GoldenScenario find_golden(const std::string& name);

std::vector<std::string> golden_names();

}  // namespace ventmon
