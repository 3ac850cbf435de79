#pragma once

#include <string>
#include <vector>

#include "anchor/circuit.hpp"

namespace anchor {

// Ten fixed-parameter benchmark circuits, each <= 4 qubits, fully measured,
// with a deterministic exactly-simulable ideal distribution:
//   BELL  4q  two independent bell pairs
//   CAT   4q  ghz state
//   TOF   3q  toffoli on |110>
//   QFT   4q  fourier transform of |0001>
//   IQFT  4q  inverse transform of the uniform superposition
//   ADD   4q  1-bit ripple-carry adder, a=1 b=1
//   QAOA  3q  one max-cut layer on a triangle, gamma 0.8, beta 0.4
//   VAR   4q  two ry layers around a cx chain, fixed angles
//   TEL   3q  teleportation with deferred corrections, ry(0.9) payload
//   LNS   3q  nearest-neighbor ladder toy
std::vector<Circuit> benchmark_suite();

// Lookup by name; throws std::invalid_argument on unknown names.
Circuit benchmark(const std::string& name);

}  // namespace anchor
