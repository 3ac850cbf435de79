#include <cmath>
#include <stdexcept>
#include <doctest.h>

#include "anchor/fleet.hpp"
#include "anchor/sim.hpp"

using namespace anchor;

TEST_SUITE_BEGIN("sim");

namespace {

CouplingGraph line_graph(int n) {
  CouplingGraph g;
  g.num_physical = n;
  for (int i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1});
  return g;
}

CalibrationSnapshot flat_snap(const CouplingGraph& g, double e1, double e2,
                              double ero) {
  CalibrationSnapshot s;
  s.err_1q.assign(g.num_physical, e1);
  s.err_readout.assign(g.num_physical, ero);
  for (auto& e : g.edges) s.err_2q[e] = e2;
  s.t1_us.assign(g.num_physical, 100);
  s.t2_us.assign(g.num_physical, 100);
  return s;
}

Circuit bell2() {
  Circuit c;
  c.num_qubits = 2;
  c.gates = {Gate::u3(0, M_PI / 2, 0, M_PI), Gate::cx(0, 1), Gate::measure(0),
             Gate::measure(1)};
  return decompose_to_basis(c);
}

Circuit ghz(int n) {
  Circuit c;
  c.num_qubits = n;
  c.gates = {Gate::u3(0, M_PI / 2, 0, M_PI)};
  for (int q = 1; q < n; ++q) c.gates.push_back(Gate::cx(q - 1, q));
  for (int q = 0; q < n; ++q) c.gates.push_back(Gate::measure(q));
  return decompose_to_basis(c);
}

}  // namespace

TEST_CASE("tvd hand values") {
  Distribution p{{"00", 0.5}, {"11", 0.5}};
  Distribution q{{"00", 0.5}, {"11", 0.5}};
  CHECK(tvd(p, q) == doctest::Approx(0.0));
  Distribution r{{"00", 1.0}};
  CHECK(tvd(p, r) == doctest::Approx(50.0));  // percentage points
  Distribution s{{"01", 1.0}};
  CHECK(tvd(p, s) == doctest::Approx(100.0));
  Distribution t{{"00", 0.25}, {"11", 0.75}};
  CHECK(tvd(p, t) == doctest::Approx(25.0));
}

TEST_CASE("ideal_distribution: X, Bell, GHZ") {
  Circuit x;
  x.num_qubits = 2;
  x.gates = {Gate::x(1), Gate::measure(0), Gate::measure(1)};
  auto d = ideal_distribution(x);
  REQUIRE(d.size() == 1);
  CHECK(d.at("01") == doctest::Approx(1.0));  // cbit 0 leftmost

  auto bell = ideal_distribution(bell2());
  REQUIRE(bell.size() == 2);
  CHECK(bell.at("00") == doctest::Approx(0.5));
  CHECK(bell.at("11") == doctest::Approx(0.5));

  auto g4 = ideal_distribution(ghz(4));
  REQUIRE(g4.size() == 2);
  CHECK(g4.at("0000") == doctest::Approx(0.5));
  CHECK(g4.at("1111") == doctest::Approx(0.5));
}

TEST_CASE("ideal_distribution input validation") {
  Circuit c;
  c.num_qubits = 2;
  c.gates = {Gate::x(0), Gate::measure(0)};  // qubit 1 never measured
  CHECK_THROWS_AS(ideal_distribution(c), std::invalid_argument);
  Circuit big;
  big.num_qubits = 15;
  for (int q = 0; q < 15; ++q) big.gates.push_back(Gate::measure(q));
  CHECK_THROWS_AS(ideal_distribution(big), std::invalid_argument);
}

TEST_CASE("routed map reproduces the logical distribution exactly") {
  auto g = line_graph(4);
  Circuit c = ghz(3);
  auto m = route(c, {3, 2, 1}, g);
  CHECK(tvd(ideal_distribution(c), ideal_distribution(m)) < 1e-9);
}

TEST_CASE("sample_noisy: zero noise reproduces the ideal distribution") {
  auto g = line_graph(2);
  auto snap = flat_snap(g, 0, 0, 0);
  auto m = route(bell2(), {0, 1}, g);
  auto r = sample_noisy(m, snap, 4096, 99);
  CHECK(r.total == 4096);
  // only the two ideal outcomes occur
  for (auto& kv : r.counts) CHECK((kv.first == "00" || kv.first == "11"));
  CHECK(tvd(r.to_distribution(), ideal_distribution(bell2())) < 3.0);
}

TEST_CASE("sample_noisy: deterministic in seed, shot-order independent") {
  auto g = line_graph(3);
  auto snap = flat_snap(g, 1e-3, 1e-2, 2e-2);
  auto m = route(ghz(3), {0, 1, 2}, g);
  auto a = sample_noisy(m, snap, 2000, 7);
  auto b = sample_noisy(m, snap, 2000, 7);
  CHECK(a.counts == b.counts);
  // different seeds use different sub-streams
  auto c1 = sample_noisy(m, snap, 2000, 8);
  auto c2 = sample_noisy(m, snap, 2000, 9);
  CHECK(c1.counts != c2.counts);
}

TEST_CASE("sample_noisy: pure readout error matches independent-flip math") {
  // X(0) then measure both with readout noise p = 0.1 on each bit.
  auto g = line_graph(2);
  auto snap = flat_snap(g, 0, 0, 0.1);
  Circuit c;
  c.num_qubits = 2;
  c.gates = {Gate::x(0), Gate::measure(0), Gate::measure(1)};
  auto m = route(c, {0, 1}, g);
  long long shots = 200000;
  auto d = sample_noisy(m, snap, shots, 31).to_distribution();
  Distribution want{{"10", 0.81}, {"00", 0.09}, {"11", 0.09}, {"01", 0.01}};
  CHECK(tvd(d, want) < 0.5);  // pct points; ~0.15 expected at this n
}

TEST_CASE("sample_noisy: pauli noise leaks GHZ outcomes off the ideal support") {
  // 1q faults on the control before the cx chain stay inside {000, 111};
  // 2q faults that flip exactly one side of a cx escape it.
  auto g = line_graph(3);
  auto snap = flat_snap(g, 0.05, 0.05, 0.0);
  auto m = route(ghz(3), {0, 1, 2}, g);
  auto d = sample_noisy(m, snap, 60000, 13).to_distribution();
  double ideal_mass = 0;
  for (auto& kv : d)
    if (kv.first == "000" || kv.first == "111") ideal_mass += kv.second;
  CHECK(ideal_mass < 1.0);
  CHECK(ideal_mass > 0.6);
  CHECK(tvd(d, ideal_distribution(ghz(3))) > 1.0);
}

TEST_CASE("sample_noisy with idle decay biases toward ground state") {
  auto g = line_graph(2);
  auto snap = flat_snap(g, 0, 0, 0);
  snap.t1_us.assign(2, 0.4);  // extreme decay: dur_2q 300ns vs t1 400ns
  Circuit c;
  c.num_qubits = 2;
  c.gates = {Gate::x(0), Gate::x(1), Gate::cx(0, 1), Gate::measure(0),
             Gate::measure(1)};
  auto m = route(c, {0, 1}, g);
  NoiseOptions opt;
  opt.idle_decay = true;
  auto with = sample_noisy(m, snap, 40000, 5, opt).to_distribution();
  auto without = sample_noisy(m, snap, 40000, 5).to_distribution();
  CHECK(without.at("10") == doctest::Approx(1.0));  // x,x,cx -> "10"
  double ground_with = with.count("00") ? with.at("00") : 0.0;
  CHECK(ground_with > 0.2);
  CHECK(tvd(with, without) > 10.0);
}

TEST_CASE("esp hand product") {
  auto g = line_graph(2);
  auto snap = flat_snap(g, 0.01, 0.02, 0.03);
  Circuit c;
  c.num_qubits = 2;
  c.gates = {Gate::x(0), Gate::rz(0, 1.0), Gate::cx(0, 1), Gate::measure(0),
             Gate::measure(1)};
  auto m = route(c, {0, 1}, g);
  // (1-.01) * (1-.02) * (1-.03)^2 ; rz free, measures use readout
  double want = 0.99 * 0.98 * 0.97 * 0.97;
  CHECK(esp(m, snap) == doctest::Approx(want).epsilon(1e-12));
  auto noiseless = flat_snap(g, 0, 0, 0);
  CHECK(esp(m, noiseless) == doctest::Approx(1.0));
}

TEST_CASE("merge accumulates counts and totals") {
  ShotResult a;
  a.counts = {{"0", 10}};
  a.total = 10;
  ShotResult b;
  b.counts = {{"0", 5}, {"1", 5}};
  b.total = 10;
  a.merge(b);
  CHECK(a.total == 20);
  CHECK(a.counts.at("0") == 15);
  CHECK(a.counts.at("1") == 5);
  auto d = a.to_distribution();
  CHECK(d.at("0") == doctest::Approx(0.75));
}

TEST_SUITE_END();
