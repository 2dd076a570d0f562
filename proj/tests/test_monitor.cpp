#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "ventmon/errors.hpp"
#include "ventmon/monitor.hpp"
#include "ventmon/waveform_sim.hpp"

using namespace ventmon;

namespace {

MonitorConfig config_at(double fs, double alpha_release = 0.9993138225826852) {
  MonitorConfig c;
  c.sample_rate = fs;
  c.alpha_attack = coefficient_for_rate(0.9, 100.0, fs);
  c.alpha_release = alpha_release;
  c.alpha_smooth = 0.5;
  return c;
}

std::vector<double> square_wave(double hi, double lo, int half_period, int cycles) {
  std::vector<double> x;
  for (int c = 0; c < cycles; ++c) {
    x.insert(x.end(), half_period, hi);
    x.insert(x.end(), half_period, lo);
  }
  return x;
}

// Offline oracle: breath period from the spacing of rising edges, with the
// whole trace in memory.
std::vector<int> rising_edges(const std::vector<double>& x) {
  std::vector<int> edges;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] > x[i - 1]) edges.push_back(static_cast<int>(i));
  }
  return edges;
}

}  // namespace

TEST_CASE("monitor_init seeds both envelopes at the first sample") {
  const auto s = monitor_init(config_at(100.0), 20.0);
  CHECK(s.high.value == 20.0);
  CHECK(s.low.value == 20.0);
  CHECK(s.high.last_attack_value == 20.0);
  CHECK(s.low.last_attack_value == 20.0);
  CHECK(s.breath_phase == BreathPhase::Exhaling);
  CHECK_FALSE(s.metrics_valid);
  CHECK(s.samples_since_prev_peak == 0);
}

TEST_CASE("monitor_init rejects bad input") {
  CHECK_THROWS_AS(monitor_init(config_at(100.0), std::numeric_limits<double>::quiet_NaN()), ConfigError);
  auto bad = config_at(100.0);
  bad.alpha_attack = 0.9995;
  CHECK_THROWS_AS(monitor_init(bad, 10.0), ConfigError);
  bad = config_at(100.0);
  bad.sample_rate = 0.0;
  CHECK_THROWS_AS(monitor_init(bad, 10.0), ConfigError);
  bad = config_at(100.0);
  bad.alpha_smooth = 1.5;
  CHECK_THROWS_AS(monitor_init(bad, 10.0), ConfigError);
}

TEST_CASE("first step above the start value attacks high and releases low") {
  auto s = monitor_init(config_at(100.0), 20.0);
  const auto out = monitor_step(s, 25.0);
  CHECK(out.high_attacked);
  CHECK_FALSE(out.low_attacked);
  CHECK(s.high.value == doctest::Approx(20.5));
  CHECK(s.low.value == doctest::Approx(20.0 + (1.0 - 0.9993138225826852) * 5.0));
  // First rise leaves the artificial start phase, but no PEEP reading exists yet.
  CHECK(out.phase_changed);
  CHECK(s.breath_phase == BreathPhase::Inhaling);
  CHECK_FALSE(out.metrics_updated);
}

TEST_CASE("constant input never changes phase nor validates metrics") {
  for (double c : {0.0, 15.0, 25.0}) {
    auto s = monitor_init(config_at(100.0), c);
    bool any_phase_change = false;
    for (int i = 0; i < 200000; ++i) {
      const auto out = monitor_step(s, c);
      any_phase_change |= out.phase_changed;
    }
    CHECK_FALSE(any_phase_change);
    CHECK_FALSE(s.metrics_valid);
    CHECK(s.breath_phase == BreathPhase::Exhaling);
  }
}

TEST_CASE("non-finite sample leaves the monitor untouched") {
  auto s = monitor_init(config_at(100.0), 15.0);
  for (int i = 0; i < 50; ++i) monitor_step(s, i % 2 ? 36.0 : 15.0);
  const auto before = s;
  const auto out = monitor_step(s, std::numeric_limits<double>::quiet_NaN());
  CHECK(out.rejected);
  CHECK_FALSE(out.high_attacked);
  CHECK(s.high.value == before.high.value);
  CHECK(s.low.value == before.low.value);
  CHECK(s.samples_since_prev_peak == before.samples_since_prev_peak);
  CHECK(s.samples_seen == before.samples_seen);
}

TEST_CASE("square wave 36/15 with 150-sample halves reports 20 breaths/min") {
  const auto x = square_wave(36.0, 15.0, 150, 40);
  const auto edges = rising_edges(x);
  REQUIRE(edges.size() >= 2);
  for (std::size_t i = 1; i < edges.size(); ++i) REQUIRE(edges[i] - edges[i - 1] == 300);
  const double oracle_rr = 60.0 * 100.0 / 300.0;
  CHECK(oracle_rr == 20.0);

  auto s = monitor_init(config_at(100.0), x.front());
  for (double p : x) monitor_step(s, p);
  REQUIRE(s.metrics_valid);
  CHECK(std::abs(s.rr - oracle_rr) <= 1.0);
  CHECK(s.pip == doctest::Approx(36.0).epsilon(1e-9));
  CHECK(s.peep == doctest::Approx(15.0).epsilon(1e-9));
}

TEST_CASE("idealized ventilator waveform converges to its extrema and rate") {
  auto settings = VentilatorSettings::for_breath_rate(36.0, 2.4, 20.0, 0.3, 0.0);
  Scenario sc;
  sc.duration = 12 * settings.breath_period();
  sc.settings_timeline.push_back({0.0, settings});
  const auto trace = simulate(sc, 100.0);

  auto s = monitor_init(config_at(100.0), trace.samples.front());
  for (double p : trace.samples) monitor_step(s, p);
  REQUIRE(s.metrics_valid);
  CHECK(std::abs(s.pip - 36.0) <= 1.0);
  CHECK(std::abs(s.peep - 15.0) <= 1.0);
  CHECK(std::abs(s.rr - 20.0) <= 1.0);
  CHECK(s.pip >= s.peep);
}

TEST_CASE("first metric readings are assigned, later ones smoothed") {
  // Peaks 30 then 40, troughs 10 then 8.
  std::vector<double> x;
  auto hold = [&](double v, int n) { x.insert(x.end(), n, v); };
  hold(10.0, 50);
  hold(30.0, 100);
  hold(10.0, 100);
  hold(40.0, 100);
  hold(8.0, 100);
  hold(40.0, 100);
  hold(8.0, 100);

  auto s = monitor_init(config_at(100.0), x.front());
  std::vector<double> pip_updates;
  for (double p : x) {
    const auto out = monitor_step(s, p);
    if (out.phase_changed && s.breath_phase == BreathPhase::Exhaling) pip_updates.push_back(s.pip);
  }
  REQUIRE(pip_updates.size() == 3);
  CHECK(pip_updates[0] == 30.0);
  CHECK(pip_updates[1] == doctest::Approx(0.5 * 30.0 + 0.5 * 40.0));
  CHECK(pip_updates[2] == doctest::Approx(0.5 * 35.0 + 0.5 * 40.0));
  // PEEP: first genuine trough (10) assigned, then smoothed with 8.
  CHECK(s.peep == doctest::Approx(0.5 * 10.0 + 0.5 * 8.0));
  CHECK(s.rr == doctest::Approx(60.0 * 100.0 / 200.0));
}

TEST_CASE("a zero-sample breath period is discarded") {
  auto s = monitor_init(config_at(100.0), 20.0);
  s.breath_phase = BreathPhase::Inhaling;
  s.high.value = 30.0;
  s.low.value = 15.0;
  s.has_pip = true;
  s.pip = 30.0;
  s.has_peak_reference = true;
  // Peak reference already sits at the latest high attack.
  s.samples_since_prev_peak = 4;
  s.high.samples_since_attack = 4;
  const auto out = monitor_step(s, 10.0);
  CHECK(out.low_attacked);
  CHECK(out.phase_changed);
  CHECK_FALSE(s.has_period);
  CHECK(s.rr == 0.0);
  CHECK_FALSE(s.metrics_valid);
}

TEST_CASE("coefficient_for_rate preserves decay per second") {
  CHECK(coefficient_for_rate(0.9, 100.0, 100.0) == 0.9);
  CHECK(coefficient_for_rate(0.9, 100.0, 50.0) == doctest::Approx(0.81).epsilon(1e-14));
  // mpmath: 0.9^0.5
  CHECK(coefficient_for_rate(0.9, 100.0, 200.0) == doctest::Approx(0.94868329805051379960).epsilon(1e-15));
  CHECK(coefficient_for_rate(0.0, 100.0, 10.0) == 0.0);
  CHECK(coefficient_for_rate(1.0, 100.0, 10.0) == 1.0);
  CHECK(std::pow(coefficient_for_rate(0.9, 100.0, 10.0), 10.0) == doctest::Approx(std::pow(0.9, 100.0)));
  CHECK_THROWS_AS(coefficient_for_rate(0.9, 0.0, 10.0), ConfigError);
  CHECK_THROWS_AS(coefficient_for_rate(1.2, 100.0, 10.0), ConfigError);
}

TEST_CASE("monitor state is small and trivially copyable") {
  static_assert(sizeof(MonitorState) <= 256);
  static_assert(std::is_trivially_copyable_v<MonitorState>);
  CHECK(sizeof(MonitorState) <= 256);
}
