#include <cmath>
#include <stdexcept>
#include <doctest.h>

#include "anchor/device.hpp"
#include "anchor/fleet.hpp"

using namespace anchor;

TEST_SUITE_BEGIN("device");

namespace {

DeviceModel tiny_device() {
  DeviceModel m;
  m.name = "tiny";
  m.graph.num_physical = 3;
  m.graph.edges = {{0, 1}, {1, 2}};
  CalibrationSnapshot s;
  s.day = 0;
  s.err_1q = {1e-4, 2e-4, 3e-4};
  s.err_readout = {0.01, 0.02, 0.03};
  s.err_2q = {{{0, 1}, 0.005}, {{1, 2}, 0.02}};
  s.t1_us = {100, 100, 100};
  s.t2_us = {90, 110, 120};
  m.snapshots.push_back(s);
  return m;
}

}  // namespace

TEST_CASE("device json round-trip") {
  DeviceModel m = tiny_device();
  m.validate();
  DeviceModel back = parse_device_json(device_json(m));
  CHECK(back.name == m.name);
  CHECK(back.graph.edges == m.graph.edges);
  REQUIRE(back.snapshots.size() == 1);
  CHECK(back.snapshots[0].err_2q == m.snapshots[0].err_2q);
  CHECK(back.snapshots[0].err_1q == m.snapshots[0].err_1q);
  CHECK(back.snapshots[0].dur_2q_ns == m.snapshots[0].dur_2q_ns);
}

TEST_CASE("schema violations and invariants are rejected") {
  DeviceModel m = tiny_device();
  m.snapshots[0].err_readout[1] = 0.6;  // outside [0, 0.5]
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);

  m = tiny_device();
  m.snapshots[0].t2_us[0] = 250;  // > 2 * t1
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);

  m = tiny_device();
  m.graph.edges = {{0, 1}};  // disconnects qubit 2
  CHECK_THROWS_AS(m.graph.validate(), std::invalid_argument);

  CHECK_THROWS_AS(parse_device_json("{\"name\": \"x\"}"), std::invalid_argument);
  CHECK_THROWS_AS(parse_device_json("not json"), std::invalid_argument);
}

TEST_CASE("snapshot_at picks the greatest day not after the request") {
  DeviceModel m = tiny_device();
  CalibrationSnapshot later = m.snapshots[0];
  later.day = 5;
  m.snapshots.push_back(later);
  CHECK(m.snapshot_at(0).day == 0);
  CHECK(m.snapshot_at(4).day == 0);
  CHECK(m.snapshot_at(5).day == 5);
  CHECK(m.snapshot_at(100).day == 5);
  CHECK(m.snapshot_at(-3).day == 0);  // before all snapshots: earliest
}

TEST_CASE("synth_drift: zero sigma keeps every rate identical to base") {
  DeviceModel m = tiny_device();
  auto days = synth_drift(m.snapshots[0], 4, 0.0, 123);
  REQUIRE(days.size() == 4);
  for (const auto& s : days) {
    CHECK(s.err_1q == m.snapshots[0].err_1q);
    CHECK(s.err_2q == m.snapshots[0].err_2q);
    CHECK(s.err_readout == m.snapshots[0].err_readout);
  }
  CHECK(days[0].day == 1);
  CHECK(days[3].day == 4);
}

TEST_CASE("synth_drift: deterministic, clamped, and valid") {
  DeviceModel m = tiny_device();
  auto a = synth_drift(m.snapshots[0], 30, 0.8, 42);
  auto b = synth_drift(m.snapshots[0], 30, 0.8, 42);
  auto c = synth_drift(m.snapshots[0], 30, 0.8, 43);
  REQUIRE(a.size() == 30);
  for (size_t d = 0; d < a.size(); ++d) {
    CHECK(a[d].err_1q == b[d].err_1q);
    CHECK(a[d].err_2q == b[d].err_2q);
    a[d].validate(m.graph);
    // clamp window: base/10 .. min(0.5, base*10)
    for (size_t q = 0; q < a[d].err_1q.size(); ++q) {
      double base = m.snapshots[0].err_1q[q];
      CHECK(a[d].err_1q[q] >= base / 10 - 1e-15);
      CHECK(a[d].err_1q[q] <= std::min(0.5, base * 10) + 1e-15);
    }
  }
  bool differs = false;
  for (size_t d = 0; d < a.size(); ++d)
    if (a[d].err_1q != c[d].err_1q) differs = true;
  CHECK(differs);
}

TEST_CASE("fleet generator produces valid drifting devices") {
  FleetSpec spec;
  spec.devices = 3;
  spec.days = 5;
  auto fleet = make_fleet(spec);
  REQUIRE(fleet.size() == 3);
  for (const DeviceModel& m : fleet) {
    m.validate();
    CHECK(m.graph.num_physical == 12);
    CHECK(m.snapshots.size() == 5);
    CHECK(m.snapshots.front().day == 0);
    CHECK(m.snapshots.back().day == 4);
  }
  CHECK(fleet[0].name != fleet[1].name);
  // same seed -> same fleet
  auto again = make_fleet(spec);
  CHECK(again[2].snapshots[4].err_2q == fleet[2].snapshots[4].err_2q);
  // degree <= 3, heavy-hex flavored
  auto adj = fleet[0].graph.adjacency();
  for (const auto& n : adj) CHECK(n.size() <= 3);
}

TEST_SUITE_END();
