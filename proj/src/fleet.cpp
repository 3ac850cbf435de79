#include "anchor/fleet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "anchor/rng.hpp"

namespace anchor {

CouplingGraph heavy_hex_graph(int qubits) {
  if (qubits < 4) throw std::invalid_argument("fleet devices need at least 4 qubits");
  CouplingGraph g;
  g.num_physical = qubits;
  // Ring of (qubits - 2*tails) with two-qubit tails on opposite sides; every
  // vertex has degree <= 3, like the hexagon-with-spurs patches of real
  // heavy-hex lattices. Small qubit counts degrade to a plain ring/path.
  int tails = qubits >= 10 ? 2 : (qubits >= 7 ? 1 : 0);
  int ring = qubits - 2 * tails;
  auto add = [&g](int a, int b) {
    if (a > b) std::swap(a, b);
    g.edges.emplace_back(a, b);
  };
  for (int v = 0; v + 1 < ring; ++v) add(v, v + 1);
  if (ring > 2) add(0, ring - 1);
  for (int t = 0; t < tails; ++t) {
    int anchor_vertex = t * (ring / 2);
    int base = ring + 2 * t;
    add(anchor_vertex, base);
    add(base, base + 1);
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.validate();
  return g;
}

namespace {

double lognormal(Rng& rng, double median, double sigma, double lo, double hi) {
  return std::clamp(median * std::exp(sigma * rng.next_gaussian()), lo, hi);
}

}  // namespace

std::vector<DeviceModel> make_fleet(const FleetSpec& spec) {
  if (spec.devices < 1 || spec.days < 1)
    throw std::invalid_argument("fleet needs at least one device and one day");
  CouplingGraph graph = heavy_hex_graph(spec.qubits);
  std::vector<DeviceModel> fleet;
  fleet.reserve(spec.devices);
  for (int d = 0; d < spec.devices; ++d) {
    DeviceModel m;
    m.name = "dev_" + std::string(1, static_cast<char>('a' + d % 26)) +
             (d >= 26 ? std::to_string(d / 26) : "");
    m.graph = graph;

    Rng rng(mix_seed(spec.seed, static_cast<uint64_t>(d), 0xf1ee7ull));
    // Devices share magnitude (same fabrication family) but differ in detail:
    // a mild per-device quality factor, modest per-qubit spread, and a
    // bimodal two-qubit landscape — most couplers sit in a tight band while
    // roughly a fifth come out sour by an order of magnitude, the way real
    // calibration tables single out a few bad CX pairs.
    double quality = std::exp(0.12 * rng.next_gaussian());
    CalibrationSnapshot base;
    base.day = 0;
    for (int q = 0; q < spec.qubits; ++q) {
      base.err_1q.push_back(lognormal(rng, 4e-4 * quality, 0.3, 5e-5, 4e-3));
      base.err_readout.push_back(lognormal(rng, 1.5e-2 * quality, 0.3, 2e-3, 0.08));
      double t1 = rng.uniform(80.0, 140.0);
      base.t1_us.push_back(t1);
      base.t2_us.push_back(t1 * rng.uniform(0.8, 1.6));
    }
    for (auto e : graph.edges) {
      double sour = rng.uniform(0.0, 1.0) < 0.2 ? rng.uniform(6.0, 15.0) : 1.0;
      base.err_2q[e] = lognormal(rng, 6e-3 * quality * sour, 0.32, 1e-3, 0.15);
    }
    base.dur_1q_ns = 35.0;
    base.dur_2q_ns = 300.0;

    m.snapshots.push_back(base);
    if (spec.days > 1) {
      auto drifted = synth_drift(base, spec.days - 1, spec.drift_sigma,
                                 mix_seed(spec.seed, static_cast<uint64_t>(d), 0xd21f7ull));
      m.snapshots.insert(m.snapshots.end(), drifted.begin(), drifted.end());
    }
    m.validate();
    fleet.push_back(std::move(m));
  }
  return fleet;
}

}  // namespace anchor
