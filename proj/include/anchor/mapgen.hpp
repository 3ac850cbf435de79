#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anchor/circuit.hpp"
#include "anchor/device.hpp"

namespace anchor {

enum class MapOrigin { Opti, Rand };

struct CircuitMap {
  std::string device;
  std::vector<int> assignment;    // logical l -> physical qubit before routing
  std::vector<int> final_layout;  // logical l -> physical qubit after routing swaps
  Circuit routed;                 // basis gates on physical indices
  MapOrigin origin = MapOrigin::Rand;
};

// Connected random walk: start at a uniformly random qubit, then repeatedly
// absorb a uniformly random graph-neighbor of the current selected set until
// q qubits are chosen. assignment[l] = l-th selected physical qubit.
std::vector<int> randmap(int q, const CouplingGraph& g, uint64_t seed);

// Noise-adaptive greedy growth. Seeds at the edge with minimal 2q error
// (lowest-index tie-break), then repeatedly adds the frontier qubit with the
// lowest score = err_2q(cheapest connecting edge) + err_1q + err_readout.
// temperature == 0 picks the argmin (ties to the lowest physical index);
// temperature > 0 draws from softmax(-score/temperature) using the seed.
std::vector<int> optimap(const Circuit& c, const CalibrationSnapshot& snap,
                         const CouplingGraph& g, double temperature, uint64_t seed);

// Greedy SWAP insertion. Walks each cx's control toward its target along a
// shortest path inside the subgraph induced by the assignment (ties broken by
// the smallest next-hop physical index); each SWAP is emitted as 3 cx gates
// and updates the logical->physical tracking. Measures are retargeted to the
// tracked physical qubit, keeping their logical classical bit.
CircuitMap route(const Circuit& c, const std::vector<int>& assignment,
                 const CouplingGraph& g, const std::string& device_name = "");

// m/2 optimap candidates (temperatures cycling 0, 0.5, 1.0) followed by m/2
// randmap candidates, all with seeds derived from cfg.seed. Duplicate
// assignments are regenerated with fresh seeds up to 20 attempts, then kept.
struct MapSetConfig {
  int m = 12;  // even, >= 2
  uint64_t seed = 1;
};
std::vector<CircuitMap> generate_map_set(const Circuit& c, const DeviceModel& model,
                                         int day, const MapSetConfig& cfg);

std::string map_json(const CircuitMap& m);
CircuitMap map_from_json(const std::string& text);

}  // namespace anchor
