#include <doctest.h>

#include <cmath>
#include <limits>

#include "ventmon/calibration.hpp"
#include "ventmon/errors.hpp"

using namespace ventmon;

// Reference values computed with 30-digit arithmetic (mpmath).
static constexpr double kAlphaDefault = 0.9993138225826851626;  // r_min 1.5, r_nom 2.4, T 1500
static constexpr double kAlpha50Hz = 0.99862811600481835812;    // T 750

TEST_CASE("release coefficient at the default operating point") {
  const double a = release_coefficient(CalibrationInput{});
  CHECK(a == doctest::Approx(kAlphaDefault).epsilon(1e-15));
  CHECK(std::abs(a - 0.9993139) < 1e-7);

  CalibrationInput half;
  half.t_max_samples = 750;
  CHECK(release_coefficient(half) == doctest::Approx(kAlpha50Hz).epsilon(1e-15));
}

TEST_CASE("one-sample horizon reduces to the plain ratio") {
  CalibrationInput in;
  in.t_max_samples = 1;
  CHECK(release_coefficient(in) == doctest::Approx(5.0 / 14.0).epsilon(1e-15));
}

TEST_CASE("decay prediction") {
  const double a = release_coefficient(CalibrationInput{});
  CHECK(decay_prediction(36.0, 15.0, a, 0.0) == 36.0);
  CHECK(decay_prediction(36.0, 15.0, a, 1500.0) == doctest::Approx(22.5).epsilon(1e-12));
  CHECK(decay_prediction(36.0, 15.0, 0.5, 1.0) == doctest::Approx(25.5));
  CHECK(decay_prediction(36.0, 15.0, a, 1e7) == doctest::Approx(15.0));
}

TEST_CASE("trigger time inverts the decay") {
  const double a = release_coefficient(CalibrationInput{});
  CHECK(trigger_time(36.0, 15.0, a, 1.5) == doctest::Approx(1500.0).epsilon(1e-9));
  for (double t : {1.0, 37.0, 600.0, 4000.0}) {
    const double v = decay_prediction(40.0, 10.0, a, t);
    CHECK(trigger_time(40.0, 10.0, a, v / 10.0) == doctest::Approx(t).epsilon(1e-9));
  }
}

TEST_CASE("trigger time boundaries") {
  CHECK(trigger_time(20.0, 15.0, 0.999, 1.5) == 0.0);
  CHECK(trigger_time(22.5, 15.0, 0.999, 1.5) == 0.0);
  CHECK(trigger_time(36.0, 15.0, 1.0, 1.5) == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(trigger_time(36.0, 0.0, 0.999, 1.5), ConfigError);
  CHECK_THROWS_AS(trigger_time(36.0, 15.0, 0.999, 1.0), ConfigError);
  CHECK_THROWS_AS(trigger_time(36.0, 15.0, 0.0, 1.5), ConfigError);
  CHECK_THROWS_AS(trigger_time(36.0, 15.0, 1.01, 1.5), ConfigError);
}

TEST_CASE("coefficient is monotone in its inputs") {
  double prev = 0.0;
  for (double r_min = 1.05; r_min < 2.3; r_min += 0.05) {
    CalibrationInput in;
    in.r_min = r_min;
    const double a = release_coefficient(in);
    CHECK(a > prev);
    CHECK(a < 1.0);
    prev = a;
  }
  // Longer horizon, slower decay.
  prev = 0.0;
  for (std::uint64_t t : {10u, 100u, 500u, 1500u, 3000u, 100000u}) {
    CalibrationInput in;
    in.t_max_samples = t;
    const double a = release_coefficient(in);
    CHECK(a > prev);
    prev = a;
  }
}

TEST_CASE("calibration input validation") {
  auto with = [](double r_min, double r_nom, std::uint64_t t) {
    CalibrationInput in;
    in.r_min = r_min;
    in.r_nom = r_nom;
    in.t_max_samples = t;
    return in;
  };
  CHECK_THROWS_AS(release_coefficient(with(1.0, 2.4, 1500)), ConfigError);
  CHECK_THROWS_AS(release_coefficient(with(2.4, 2.4, 1500)), ConfigError);
  CHECK_THROWS_AS(release_coefficient(with(3.0, 2.4, 1500)), ConfigError);
  CHECK_THROWS_AS(release_coefficient(with(1.5, 2.4, 0)), ConfigError);
  CHECK_THROWS_AS(release_coefficient(with(std::nan(""), 2.4, 1500)), ConfigError);
}
