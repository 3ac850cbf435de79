#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace anchor {

// Gate set: the hardware basis {X, SX, RZ, CX} plus U3 (decomposable) and
// terminal measurement. RZ is virtual (noise-free, zero duration).
enum class GateKind { X, SX, RZ, CX, U3, Measure };

struct Gate {
  GateKind kind = GateKind::X;
  std::array<int, 2> qubits{-1, -1};     // [q, -1] for 1q; [control, target] for cx
  std::array<double, 3> params{0, 0, 0}; // rz: [angle]; u3: [theta, phi, lambda]
  int cbit = -1;                         // classical bit, Measure only

  static Gate x(int q) { return {GateKind::X, {q, -1}, {}, -1}; }
  static Gate sx(int q) { return {GateKind::SX, {q, -1}, {}, -1}; }
  static Gate rz(int q, double angle) { return {GateKind::RZ, {q, -1}, {angle, 0, 0}, -1}; }
  static Gate cx(int c, int t) { return {GateKind::CX, {c, t}, {}, -1}; }
  static Gate u3(int q, double theta, double phi, double lambda) {
    return {GateKind::U3, {q, -1}, {theta, phi, lambda}, -1};
  }
  // cbit defaults to the measured qubit; routing retargets it.
  static Gate measure(int q, int cbit = -1) {
    return {GateKind::Measure, {q, -1}, {}, cbit < 0 ? q : cbit};
  }

  int arity() const { return kind == GateKind::CX ? 2 : 1; }
  bool operator==(const Gate&) const = default;
};

struct Circuit {
  int num_qubits = 0;
  std::vector<Gate> gates;
  std::string name;  // label only; not representable in the text format

  // Throws std::invalid_argument on: qubit out of range, duplicate cx
  // operands, more than one measure per qubit, or a gate touching an
  // already-measured qubit.
  void validate() const;

  // Structural equality; the name is a label and deliberately excluded.
  bool operator==(const Circuit& o) const {
    return num_qubits == o.num_qubits && gates == o.gates;
  }
};

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_no, const std::string& message)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + message),
        line(line_no) {}
};

// Text format, one statement per line, '#' starts a comment:
//   qubits <n>
//   x <q> | sx <q> | rz <q> <angle> | cx <c> <t> | u3 <q> <theta> <phi> <lambda>
//   measure <q> | measure all
Circuit parse_circuit(std::string_view text);
Circuit load_circuit(const std::string& path);  // parse_circuit over a file; name = stem
std::string serialize_circuit(const Circuit& c);

// Rewrites every U3 into RZ(lambda), SX, RZ(theta+pi), SX, RZ(phi+pi) (time
// order), which reproduces U3(theta, phi, lambda) up to global phase. Other
// gates pass through untouched.
Circuit decompose_to_basis(const Circuit& c);

// Two-number encoding of a basis circuit. Qubit indices are shifted by +1
// inside tokens so that (0,0) is unambiguously padding: a 1q gate on qubit q
// becomes (q+1, 0), cx(c,t) becomes (c+1, t+1). RZ (virtual) and measures are
// skipped. Throws if the circuit contains U3 or more than max_len tokens —
// overflow is an error, never truncation.
struct GateToken {
  int first = 0;
  int second = 0;
  bool operator==(const GateToken&) const = default;
};
std::vector<GateToken> encode_two_number(const Circuit& c, int max_len);

// Row-major flattening of the token list: [f0, s0, f1, s1, ...], length 2*max_len.
std::vector<float> encode_flat(const Circuit& c, int max_len);

// Number of tokens encode_two_number would produce (non-RZ, non-measure gates).
int token_count(const Circuit& c);

struct CircuitStats {
  int depth = 0;    // longest dependency chain, measures excluded
  int num_1q = 0;   // x, sx, rz, u3
  int num_2q = 0;   // cx
  int num_meas = 0;
};
CircuitStats circuit_stats(const Circuit& c);

}  // namespace anchor
