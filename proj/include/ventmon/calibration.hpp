#pragma once

#include <cstdint>

namespace ventmon {

/// Nominal PIP-to-PEEP ratio of the reference ventilator.
inline constexpr double kDefaultNominalRatio = 2.4;

struct CalibrationInput {
  double r_min = 1.5;
  double r_nom = kDefaultNominalRatio;
  std::uint64_t t_max_samples = 1500;

  // Throws ConfigError unless 1 < r_min < r_nom and t_max_samples >= 1.
  void validate() const;
};

/// Release coefficient that makes the high envelope, decaying from r_nom *
/// PEEP toward PEEP, cross r_min * PEEP exactly t_max_samples after the last
/// attack: ((r_min - 1) / (r_nom - 1))^(1 / t_max_samples).
double release_coefficient(const CalibrationInput& input);

/// High envelope value t release steps after a peak, under constant input at
/// `peep`: peep + alpha_r^t (pip - peep).
double decay_prediction(double pip, double peep, double alpha_r, double t) noexcept;

/// Elapsed samples until the decaying high envelope crosses r_min * peep.
/// Returns 0 when r_min >= pip / peep (already below threshold) and +inf
/// when alpha_r >= 1 (no decay). Throws ConfigError for peep <= 0,
/// r_min <= 1 or alpha_r outside (0, 1].
double trigger_time(double pip, double peep, double alpha_r, double r_min);

}  // namespace ventmon
