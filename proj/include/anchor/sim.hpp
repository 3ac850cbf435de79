#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "anchor/circuit.hpp"
#include "anchor/device.hpp"
#include "anchor/mapgen.hpp"

namespace anchor {

// Outcome bitstring -> probability. Keys are big-endian: classical bit 0
// (= logical qubit 0) is the leftmost character.
using Distribution = std::map<std::string, double>;

struct ShotResult {
  std::map<std::string, long long> counts;
  long long total = 0;

  void merge(const ShotResult& other);
  Distribution to_distribution() const;
};

// Total variation distance in percentage points: 0.5 * sum |p - q| * 100.
double tvd(const Distribution& p, const Distribution& q);

// Exact statevector distribution of a logical circuit (<= 14 qubits, every
// qubit measured).
Distribution ideal_distribution(const Circuit& c);

// Exact noiseless distribution of a routed map, expressed over logical bits —
// the deterministic reference the router must preserve.
Distribution ideal_distribution(const CircuitMap& map);

struct NoiseOptions {
  // Stochastic reset-to-|0> after each timed gate with probability
  // 1 - exp(-duration/T1), a coarse amplitude-damping stand-in. Off by
  // default; the Pauli + readout channels below are always on.
  bool idle_decay = false;
};

// Monte-Carlo Pauli trajectories: after each 1q gate a uniformly random
// non-identity Pauli fires with probability err_1q, after each cx a uniformly
// random non-identity two-qubit Pauli fires with probability err_2q (RZ is
// virtual and noise-free); each measured bit then flips independently with
// probability err_readout. Shot s draws from the sub-stream
// mix_seed(seed, s), so results are reproducible and order-independent.
ShotResult sample_noisy(const CircuitMap& map, const CalibrationSnapshot& snap,
                        long long shots, uint64_t seed, const NoiseOptions& opt = {});

// Estimated success probability: product of (1 - rate) over every non-RZ,
// non-measure gate and (1 - err_readout) over every measured qubit.
double esp(const CircuitMap& map, const CalibrationSnapshot& snap);

}  // namespace anchor
