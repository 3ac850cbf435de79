#pragma once

#include <cstdint>
#include <vector>

#include "anchor/device.hpp"

namespace anchor {

// Synthetic drifting fleet for experiments: heavy-hex-flavored topologies
// (a ring with hanging two-qubit tails, degree <= 3) whose base error rates
// are drawn per device from shared log-normal families, then drifted per day.
struct FleetSpec {
  int devices = 5;
  int qubits = 12;
  int days = 10;          // snapshots per device (day 0 base + days-1 drift steps)
  double drift_sigma = 0.25;
  uint64_t seed = 7;
};

CouplingGraph heavy_hex_graph(int qubits);
std::vector<DeviceModel> make_fleet(const FleetSpec& spec);

}  // namespace anchor
