#include <doctest.h>

#include <optional>
#include <vector>

#include "ventmon/alarms.hpp"
#include "ventmon/errors.hpp"
#include "ventmon/monitor.hpp"

using namespace ventmon;

namespace {

MonitorState fresh_state(double p0 = 20.0) {
  MonitorConfig c;
  c.sample_rate = 100.0;
  c.alpha_attack = 0.9;
  c.alpha_release = 0.9993138225826852;
  return monitor_init(c, p0);
}

MonitorState cycling_state() {
  auto s = fresh_state(15.0);
  s.high.value = 36.0;
  s.low.value = 15.0;
  s.pip = 36.0;
  s.peep = 15.0;
  s.rr = 20.0;
  s.metrics_valid = true;
  s.has_pip = s.has_peep = s.has_period = true;
  s.samples_seen = 10000;
  return s;
}

AlarmSet only(AlarmKind k) {
  AlarmSet s;
  s.insert(k);
  return s;
}

}  // namespace

TEST_CASE("pressure above p_max raises HighPressure") {
  const auto s = cycling_state();
  const auto a = check_alarms(s, 95.0, AlarmConfig{});
  CHECK(a.contains(AlarmKind::HighPressure));
  CHECK_FALSE(a.contains(AlarmKind::LowPressure));
  CHECK_FALSE(a.contains(AlarmKind::Noncycling));
}

TEST_CASE("pressure alarms depend only on the current sample") {
  AlarmConfig cfg;
  const auto a = cycling_state();
  auto b = fresh_state(0.0);
  b.rr = 100.0;
  for (double p : {-5.0, 0.0, 4.999, 5.0, 20.0, 40.0, 40.001, 200.0}) {
    const auto x = check_alarms(a, p, cfg);
    const auto y = check_alarms(b, p, cfg);
    CHECK(x.contains(AlarmKind::HighPressure) == y.contains(AlarmKind::HighPressure));
    CHECK(x.contains(AlarmKind::LowPressure) == y.contains(AlarmKind::LowPressure));
    CHECK(x.contains(AlarmKind::HighPressure) == (p > cfg.p_max));
    CHECK(x.contains(AlarmKind::LowPressure) == (p < cfg.p_min));
  }
}

TEST_CASE("RR alarms wait for valid metrics") {
  AlarmConfig cfg;
  auto s = cycling_state();
  s.rr = 50.0;
  CHECK(check_alarms(s, 20.0, cfg).contains(AlarmKind::HighRR));
  s.rr = 3.0;
  CHECK(check_alarms(s, 20.0, cfg).contains(AlarmKind::LowRR));
  s.metrics_valid = false;
  CHECK_FALSE(check_alarms(s, 20.0, cfg).contains(AlarmKind::LowRR));
  s.rr = 0.0;
  CHECK_FALSE(check_alarms(s, 20.0, cfg).contains(AlarmKind::LowRR));
}

TEST_CASE("Noncycling sub-conditions") {
  AlarmConfig cfg;
  SUBCASE("healthy cycling") {
    const auto a = check_alarms(cycling_state(), 20.0, cfg);
    CHECK(a.empty());
    CHECK(a.noncycling_causes == 0);
  }
  SUBCASE("time since high attack") {
    auto s = cycling_state();
    s.high.samples_since_attack = 1500;
    CHECK_FALSE(check_alarms(s, 20.0, cfg).contains(AlarmKind::Noncycling));
    s.high.samples_since_attack = 1501;
    const auto a = check_alarms(s, 20.0, cfg);
    CHECK(a.contains(AlarmKind::Noncycling));
    CHECK(a.has_cause(NoncyclingCause::TimeSinceHighAttack));
    CHECK_FALSE(a.has_cause(NoncyclingCause::TimeSinceLowAttack));
  }
  SUBCASE("time since low attack") {
    auto s = cycling_state();
    s.low.samples_since_attack = 1501;
    CHECK(check_alarms(s, 20.0, cfg).has_cause(NoncyclingCause::TimeSinceLowAttack));
  }
  SUBCASE("envelope ratio") {
    auto s = cycling_state();
    s.high.value = 22.0;
    s.low.value = 15.0;
    const auto a = check_alarms(s, 20.0, cfg);
    CHECK(a.has_cause(NoncyclingCause::EnvelopeRatio));
    CHECK_FALSE(a.has_cause(NoncyclingCause::EnvelopeDifference));
  }
  SUBCASE("envelope difference") {
    auto s = cycling_state();
    s.high.value = 4.0;
    s.low.value = 2.0;
    const auto a = check_alarms(s, 3.0, cfg);
    CHECK(a.has_cause(NoncyclingCause::EnvelopeDifference));
    CHECK_FALSE(a.has_cause(NoncyclingCause::EnvelopeRatio));
  }
  SUBCASE("ratio skipped against a non-positive floor") {
    auto s = cycling_state();
    s.high.value = 10.0;
    s.low.value = 0.0;
    CHECK_FALSE(check_alarms(s, 5.0, cfg).has_cause(NoncyclingCause::EnvelopeRatio));
    s.low.value = -1.0;
    CHECK_FALSE(check_alarms(s, 5.0, cfg).has_cause(NoncyclingCause::EnvelopeRatio));
  }
}

TEST_CASE("shape tests stay quiet during start-up") {
  AlarmConfig cfg;
  auto s = fresh_state(20.0);
  CHECK_FALSE(check_alarms(s, 20.0, cfg).contains(AlarmKind::Noncycling));
  s.samples_seen = 1500;
  CHECK_FALSE(check_alarms(s, 20.0, cfg).contains(AlarmKind::Noncycling));
  s.samples_seen = 1501;
  CHECK(check_alarms(s, 20.0, cfg).has_cause(NoncyclingCause::EnvelopeDifference));
}

TEST_CASE("constant trace raises Noncycling once t_max has elapsed") {
  AlarmConfig cfg;
  const double c = 20.0;
  auto s = fresh_state(c);
  AlarmSet prev;
  std::optional<std::uint64_t> raised_at;
  for (std::uint64_t k = 0; k < 3000; ++k) {
    monitor_step(s, c);
    const auto cur = check_alarms(s, c, cfg);
    for (const auto& e : alarm_edge_detector(prev, cur, k)) {
      if (e.kind == AlarmKind::Noncycling && e.edge == AlarmEdge::Raised && !raised_at) raised_at = k;
    }
    prev = cur;
  }
  REQUIRE(raised_at.has_value());
  CHECK(*raised_at == 1500);
}

TEST_CASE("edge detector emits raised and cleared transitions") {
  const AlarmSet none;
  const auto high = only(AlarmKind::HighPressure);

  auto up = alarm_edge_detector(none, high, 7);
  REQUIRE(up.size() == 1);
  CHECK(up[0].kind == AlarmKind::HighPressure);
  CHECK(up[0].edge == AlarmEdge::Raised);
  CHECK(up[0].sample_index == 7);

  CHECK(alarm_edge_detector(high, high, 8).empty());

  auto down = alarm_edge_detector(high, none, 9);
  REQUIRE(down.size() == 1);
  CHECK(down[0].edge == AlarmEdge::Cleared);
  CHECK(down[0].sample_index == 9);
}

TEST_CASE("edge detector orders events by kind and carries causes") {
  AlarmSet prev;
  prev.insert(AlarmKind::LowRR);
  prev.insert(AlarmKind::Noncycling);
  prev.noncycling_causes = static_cast<std::uint8_t>(NoncyclingCause::EnvelopeRatio);
  AlarmSet cur;
  cur.insert(AlarmKind::HighPressure);
  cur.insert(AlarmKind::LowPressure);

  const auto edges = alarm_edge_detector(prev, cur, 42);
  REQUIRE(edges.size() == 4);
  CHECK(edges[0].kind == AlarmKind::HighPressure);
  CHECK(edges[1].kind == AlarmKind::LowPressure);
  CHECK(edges[2].kind == AlarmKind::LowRR);
  CHECK(edges[2].edge == AlarmEdge::Cleared);
  CHECK(edges[3].kind == AlarmKind::Noncycling);
  CHECK(edges[3].edge == AlarmEdge::Cleared);
  CHECK(edges[3].detail == static_cast<std::uint8_t>(NoncyclingCause::EnvelopeRatio));

  // A cause change alone is not an edge.
  AlarmSet a = only(AlarmKind::Noncycling);
  a.noncycling_causes = 1;
  AlarmSet b = only(AlarmKind::Noncycling);
  b.noncycling_causes = 4;
  CHECK(alarm_edge_detector(a, b, 1).empty());
}

TEST_CASE("alarm thresholds are validated against their tunable ranges") {
  CHECK_NOTHROW(AlarmConfig{}.validate());
  auto bad = [](auto mutate) {
    AlarmConfig c;
    mutate(c);
    return c;
  };
  CHECK_THROWS_AS(bad([](AlarmConfig& c) { c.p_max = 29.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](AlarmConfig& c) { c.p_max = 91.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](AlarmConfig& c) { c.p_min = 0.5; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](AlarmConfig& c) { c.p_min = 21.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](AlarmConfig& c) { c.rr_max = 61.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](AlarmConfig& c) { c.rr_min = 4.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](AlarmConfig& c) { c.rr_min = 16.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](AlarmConfig& c) { c.t_max = 4.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](AlarmConfig& c) { c.t_max = 31.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](AlarmConfig& c) { c.r_min = 1.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](AlarmConfig& c) { c.r_min = 2.4; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](AlarmConfig& c) { c.d_min = 0.0; }).validate(), ConfigError);
  CHECK_NOTHROW(bad([](AlarmConfig& c) { c.p_max = 30.0; c.p_min = 20.0; c.t_max = 30.0; }).validate());
}

TEST_CASE("t_max in samples") {
  AlarmConfig c;
  CHECK(c.t_max_samples(100.0) == 1500);
  CHECK(c.t_max_samples(50.0) == 750);
  c.t_max = 5.0;
  CHECK(c.t_max_samples(10.0) == 50);
}
