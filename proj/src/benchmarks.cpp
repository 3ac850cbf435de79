#include "anchor/benchmarks.hpp"

#include <cmath>
#include <stdexcept>

namespace anchor {

namespace {

constexpr double kPi = 3.14159265358979323846;

void h(Circuit& c, int q) { c.gates.push_back(Gate::u3(q, kPi / 2, 0, kPi)); }
void ry(Circuit& c, int q, double theta) { c.gates.push_back(Gate::u3(q, theta, 0, 0)); }
void rx(Circuit& c, int q, double theta) {
  c.gates.push_back(Gate::u3(q, theta, -kPi / 2, kPi / 2));
}
void t_gate(Circuit& c, int q) { c.gates.push_back(Gate::rz(q, kPi / 4)); }
void tdg(Circuit& c, int q) { c.gates.push_back(Gate::rz(q, -kPi / 4)); }

// controlled phase, standard two-cx decomposition (global phase dropped)
void cp(Circuit& c, int ctl, int tgt, double theta) {
  c.gates.push_back(Gate::rz(ctl, theta / 2));
  c.gates.push_back(Gate::cx(ctl, tgt));
  c.gates.push_back(Gate::rz(tgt, -theta / 2));
  c.gates.push_back(Gate::cx(ctl, tgt));
  c.gates.push_back(Gate::rz(tgt, theta / 2));
}

void swap_q(Circuit& c, int a, int b) {
  c.gates.push_back(Gate::cx(a, b));
  c.gates.push_back(Gate::cx(b, a));
  c.gates.push_back(Gate::cx(a, b));
}

void cz(Circuit& c, int ctl, int tgt) {
  h(c, tgt);
  c.gates.push_back(Gate::cx(ctl, tgt));
  h(c, tgt);
}

// canonical 6-cx toffoli
void ccx(Circuit& c, int a, int b, int tgt) {
  h(c, tgt);
  c.gates.push_back(Gate::cx(b, tgt));
  tdg(c, tgt);
  c.gates.push_back(Gate::cx(a, tgt));
  t_gate(c, tgt);
  c.gates.push_back(Gate::cx(b, tgt));
  tdg(c, tgt);
  c.gates.push_back(Gate::cx(a, tgt));
  t_gate(c, b);
  t_gate(c, tgt);
  h(c, tgt);
  c.gates.push_back(Gate::cx(a, b));
  t_gate(c, a);
  tdg(c, b);
  c.gates.push_back(Gate::cx(a, b));
}

void measure_all(Circuit& c) {
  for (int q = 0; q < c.num_qubits; ++q) c.gates.push_back(Gate::measure(q));
}

Circuit bell() {
  Circuit c;
  c.name = "BELL";
  c.num_qubits = 4;
  h(c, 0);
  c.gates.push_back(Gate::cx(0, 1));
  h(c, 2);
  c.gates.push_back(Gate::cx(2, 3));
  measure_all(c);
  return c;
}

Circuit cat() {
  Circuit c;
  c.name = "CAT";
  c.num_qubits = 4;
  h(c, 0);
  for (int q = 1; q < 4; ++q) c.gates.push_back(Gate::cx(q - 1, q));
  measure_all(c);
  return c;
}

Circuit tof() {
  Circuit c;
  c.name = "TOF";
  c.num_qubits = 3;
  c.gates.push_back(Gate::x(0));
  c.gates.push_back(Gate::x(1));
  ccx(c, 0, 1, 2);
  measure_all(c);
  return c;
}

// fourier transform of |0001> (qubit 0 set): uniform output distribution
Circuit qft() {
  Circuit c;
  c.name = "QFT";
  c.num_qubits = 4;
  c.gates.push_back(Gate::x(0));
  for (int i = 0; i < 4; ++i) {
    h(c, i);
    for (int j = i + 1; j < 4; ++j) cp(c, j, i, kPi / (1 << (j - i)));
  }
  swap_q(c, 0, 3);
  swap_q(c, 1, 2);
  measure_all(c);
  return c;
}

// inverse transform of H|0000> = |0000> exactly
Circuit iqft() {
  Circuit c;
  c.name = "IQFT";
  c.num_qubits = 4;
  for (int q = 0; q < 4; ++q) h(c, q);
  swap_q(c, 1, 2);
  swap_q(c, 0, 3);
  for (int i = 3; i >= 0; --i) {
    for (int j = 3; j > i; --j) cp(c, j, i, -kPi / (1 << (j - i)));
    h(c, i);
  }
  measure_all(c);
  return c;
}

// 1-bit ripple-carry adder (maj / uma): cin q0, a q1, b q2, carry-out q3.
// a=1, b=1 -> sum 0, carry 1, a and cin restored: outcome "0101".
Circuit add() {
  Circuit c;
  c.name = "ADD";
  c.num_qubits = 4;
  c.gates.push_back(Gate::x(1));
  c.gates.push_back(Gate::x(2));
  // maj(cin, b, a)
  c.gates.push_back(Gate::cx(1, 2));
  c.gates.push_back(Gate::cx(1, 0));
  ccx(c, 0, 2, 1);
  // carry out
  c.gates.push_back(Gate::cx(1, 3));
  // uma(cin, b, a)
  ccx(c, 0, 2, 1);
  c.gates.push_back(Gate::cx(1, 0));
  c.gates.push_back(Gate::cx(0, 2));
  measure_all(c);
  return c;
}

// one max-cut layer on the triangle graph, gamma 0.8, beta 0.4
Circuit qaoa() {
  Circuit c;
  c.name = "QAOA";
  c.num_qubits = 3;
  const double gamma = 0.8, beta = 0.4;
  for (int q = 0; q < 3; ++q) h(c, q);
  const int edges[3][2] = {{0, 1}, {1, 2}, {0, 2}};
  for (auto& e : edges) {
    c.gates.push_back(Gate::cx(e[0], e[1]));
    c.gates.push_back(Gate::rz(e[1], 2 * gamma));
    c.gates.push_back(Gate::cx(e[0], e[1]));
  }
  for (int q = 0; q < 3; ++q) rx(c, q, 2 * beta);
  measure_all(c);
  return c;
}

Circuit var() {
  Circuit c;
  c.name = "VAR";
  c.num_qubits = 4;
  const double layer1[4] = {0.3, 0.5, 0.7, 0.9};
  const double layer2[4] = {0.2, 0.4, 0.6, 0.8};
  for (int q = 0; q < 4; ++q) ry(c, q, layer1[q]);
  for (int q = 0; q + 1 < 4; ++q) c.gates.push_back(Gate::cx(q, q + 1));
  for (int q = 0; q < 4; ++q) ry(c, q, layer2[q]);
  measure_all(c);
  return c;
}

// teleport ry(0.9)|0> from q0 to q2 with deferred corrections
Circuit tel() {
  Circuit c;
  c.name = "TEL";
  c.num_qubits = 3;
  ry(c, 0, 0.9);
  h(c, 1);
  c.gates.push_back(Gate::cx(1, 2));
  c.gates.push_back(Gate::cx(0, 1));
  h(c, 0);
  c.gates.push_back(Gate::cx(1, 2));
  cz(c, 0, 2);
  measure_all(c);
  return c;
}

Circuit lns() {
  Circuit c;
  c.name = "LNS";
  c.num_qubits = 3;
  c.gates.push_back(Gate::sx(0));
  c.gates.push_back(Gate::cx(0, 1));
  c.gates.push_back(Gate::sx(1));
  c.gates.push_back(Gate::cx(1, 2));
  c.gates.push_back(Gate::sx(2));
  c.gates.push_back(Gate::rz(2, kPi / 4));
  c.gates.push_back(Gate::cx(1, 2));
  c.gates.push_back(Gate::cx(0, 1));
  measure_all(c);
  return c;
}

}  // namespace

std::vector<Circuit> benchmark_suite() {
  return {bell(), cat(), tof(), qft(), iqft(), add(), qaoa(), var(), tel(), lns()};
}

Circuit benchmark(const std::string& name) {
  for (Circuit& c : benchmark_suite())
    if (c.name == name) return c;
  throw std::invalid_argument("unknown benchmark: " + name);
}

}  // namespace anchor
