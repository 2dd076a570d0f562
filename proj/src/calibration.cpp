#include "ventmon/calibration.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ventmon/errors.hpp"

namespace ventmon {

void CalibrationInput::validate() const {
  if (!std::isfinite(r_nom) || !(r_nom > 1.0)) {
    throw ConfigError("r_nom must be greater than 1, got " + std::to_string(r_nom));
  }
  if (!(r_min > 1.0 && r_min < r_nom)) {
    throw ConfigError("r_min must lie strictly between 1 and r_nom (" + std::to_string(r_nom) +
                      "), got " + std::to_string(r_min));
  }
  if (t_max_samples < 1) throw ConfigError("t_max must be at least one sample");
}

double release_coefficient(const CalibrationInput& input) {
  input.validate();
  const double base = (input.r_min - 1.0) / (input.r_nom - 1.0);
  return std::pow(base, 1.0 / static_cast<double>(input.t_max_samples));
}

double decay_prediction(double pip, double peep, double alpha_r, double t) noexcept {
  return peep + std::pow(alpha_r, t) * (pip - peep);
}

double trigger_time(double pip, double peep, double alpha_r, double r_min) {
  if (!(peep > 0.0)) throw ConfigError("trigger_time needs a positive PEEP");
  if (!(r_min > 1.0)) throw ConfigError("r_min must be greater than 1");
  if (!(alpha_r > 0.0 && alpha_r <= 1.0)) throw ConfigError("alpha_r must lie in (0, 1]");
  const double ratio = pip / peep;
  if (r_min >= ratio) return 0.0;
  if (alpha_r == 1.0) return std::numeric_limits<double>::infinity();
  return std::log((r_min - 1.0) / (ratio - 1.0)) / std::log(alpha_r);
}

}  // namespace ventmon
