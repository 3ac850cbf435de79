#include <complex>
#include <doctest.h>

#include "anchor/circuit.hpp"

using namespace anchor;

TEST_SUITE_BEGIN("circuit");

TEST_CASE("parse accepts the full grammar") {
  Circuit c = parse_circuit(
      "# bell pair, no hadamard needed\n"
      "qubits 2\n"
      "sx 0\n"
      "cx 0 1\n"
      "measure all\n");
  REQUIRE(c.num_qubits == 2);
  REQUIRE(c.gates.size() == 4);
  CHECK(c.gates[0] == Gate::sx(0));
  CHECK(c.gates[1] == Gate::cx(0, 1));
  CHECK(c.gates[2] == Gate::measure(0));
  CHECK(c.gates[3] == Gate::measure(1));
}

TEST_CASE("parse handles angles, u3 and per-qubit measure") {
  Circuit c = parse_circuit(
      "qubits 3\n"
      "rz 1 -0.5\n"
      "u3 2 1.5707963267948966 0 3.141592653589793\n"
      "x 0  # trailing comment\n"
      "measure 2\n"
      "measure 0\n");
  REQUIRE(c.gates.size() == 5);
  CHECK(c.gates[0] == Gate::rz(1, -0.5));
  CHECK(c.gates[1].kind == GateKind::U3);
  CHECK(c.gates[3] == Gate::measure(2));
  CHECK(c.gates[4] == Gate::measure(0));
}

TEST_CASE("parse errors carry line numbers") {
  CHECK_THROWS_AS(parse_circuit("qubits 2\nh 0\n"), ParseError);
  CHECK_THROWS_AS(parse_circuit("x 0\n"), ParseError);           // missing header
  CHECK_THROWS_AS(parse_circuit("qubits 2\ncx 0 2\n"), ParseError);  // out of range
  CHECK_THROWS_AS(parse_circuit("qubits 2\ncx 1 1\n"), ParseError);  // duplicate operand
  CHECK_THROWS_AS(parse_circuit("qubits 1\nmeasure 0\nx 0\n"), ParseError);
  CHECK_THROWS_AS(parse_circuit("qubits 2\nrz 0\n"), ParseError);    // missing angle
  try {
    parse_circuit("qubits 2\nx 0\nbogus 1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
}

TEST_CASE("parse -> serialize -> parse round-trips to an identical circuit") {
  const char* text =
      "qubits 4\n"
      "u3 0 0.12345678901234567 -2.5 0.75\n"
      "sx 1\n"
      "rz 2 3.141592653589793\n"
      "cx 2 3\n"
      "x 3\n"
      "measure all\n";
  Circuit once = parse_circuit(text);
  Circuit twice = parse_circuit(serialize_circuit(once));
  CHECK(once == twice);
}

TEST_CASE("u3 decomposition reproduces the unitary up to global phase") {
  using cplx = std::complex<double>;
  auto matmul = [](std::array<cplx, 4> a, std::array<cplx, 4> b) {
    return std::array<cplx, 4>{a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
                               a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
  };
  auto rz = [](double a) {
    return std::array<cplx, 4>{std::polar(1.0, -a / 2), 0, 0, std::polar(1.0, a / 2)};
  };
  const std::array<cplx, 4> sx{cplx(0.5, 0.5), cplx(0.5, -0.5), cplx(0.5, -0.5),
                               cplx(0.5, 0.5)};

  // independent oracle: multiply the decomposed 2x2 matrices directly
  auto check = [&](double theta, double phi, double lambda) {
    Circuit c;
    c.num_qubits = 1;
    c.gates.push_back(Gate::u3(0, theta, phi, lambda));
    Circuit basis = decompose_to_basis(c);
    REQUIRE(basis.gates.size() == 5);
    std::array<cplx, 4> v{1, 0, 0, 1};
    for (const Gate& g : basis.gates) {
      REQUIRE(g.qubits[0] == 0);
      if (g.kind == GateKind::RZ)
        v = matmul(rz(g.params[0]), v);
      else if (g.kind == GateKind::SX)
        v = matmul(sx, v);
      else
        FAIL("unexpected gate kind in decomposition");
    }
    std::array<cplx, 4> u{std::cos(theta / 2), -std::polar(std::sin(theta / 2), lambda),
                          std::polar(std::sin(theta / 2), phi),
                          std::polar(std::cos(theta / 2), phi + lambda)};
    // |tr(U^dag V)| / 2 == 1 iff V == U up to global phase
    cplx tr = std::conj(u[0]) * v[0] + std::conj(u[1]) * v[1] + std::conj(u[2]) * v[2] +
              std::conj(u[3]) * v[3];
    CHECK(std::abs(tr) / 2 == doctest::Approx(1.0).epsilon(1e-10));
  };

  check(0, 0, 0);
  check(M_PI, 0, M_PI);              // X
  check(M_PI / 2, 0, M_PI);          // H
  check(1.234, -0.777, 2.345);
  check(-2.5, 4.0, -0.25);
}

TEST_CASE("two-number encoding shifts qubit indices to keep padding distinct") {
  Circuit c;
  c.num_qubits = 4;
  c.gates.push_back(Gate::x(3));
  std::vector<GateToken> toks = encode_two_number(c, 3);
  CHECK(toks == std::vector<GateToken>{{4, 0}, {0, 0}, {0, 0}});

  Circuit cx;
  cx.num_qubits = 3;
  cx.gates.push_back(Gate::cx(2, 0));
  CHECK(encode_two_number(cx, 1) == std::vector<GateToken>{{3, 1}});

  Circuit rz;
  rz.num_qubits = 2;
  rz.gates.push_back(Gate::rz(1, 0.5));
  rz.gates.push_back(Gate::x(1));
  CHECK(encode_two_number(rz, 2) == std::vector<GateToken>{{2, 0}, {0, 0}});

  // a 1q gate on qubit 0 must not collide with padding
  Circuit q0;
  q0.num_qubits = 1;
  q0.gates.push_back(Gate::x(0));
  CHECK(encode_two_number(q0, 2) == std::vector<GateToken>{{1, 0}, {0, 0}});
}

TEST_CASE("encoding overflow is an error, never truncation") {
  Circuit c;
  c.num_qubits = 2;
  for (int i = 0; i < 5; ++i) c.gates.push_back(Gate::x(0));
  CHECK_THROWS_AS(encode_two_number(c, 4), std::length_error);
  CHECK_NOTHROW(encode_two_number(c, 5));
  Circuit u;
  u.num_qubits = 1;
  u.gates.push_back(Gate::u3(0, 1, 2, 3));
  CHECK_THROWS_AS(encode_two_number(u, 8), std::invalid_argument);
}

TEST_CASE("encoding strips padding injectively") {
  // circuits differing only in their non-rz gate sequence encode differently
  Circuit a, b;
  a.num_qubits = b.num_qubits = 2;
  a.gates = {Gate::x(0), Gate::cx(0, 1)};
  b.gates = {Gate::x(1), Gate::cx(0, 1)};
  CHECK(encode_two_number(a, 8) != encode_two_number(b, 8));
  CHECK(encode_flat(a, 8).size() == 16);
}

TEST_CASE("circuit stats: depth by qubit-overlap chains, measures excluded") {
  Circuit c = parse_circuit(
      "qubits 3\n"
      "x 0\n"
      "rz 0 0.5\n"
      "cx 0 1\n"
      "x 2\n"
      "cx 1 2\n"
      "measure all\n");
  CircuitStats st = circuit_stats(c);
  CHECK(st.num_1q == 3);
  CHECK(st.num_2q == 2);
  CHECK(st.num_meas == 3);
  CHECK(st.depth == 4);  // x0 -> rz0 -> cx01 -> cx12
}

TEST_CASE("validate rejects malformed circuits") {
  Circuit c;
  c.num_qubits = 2;
  c.gates = {Gate::measure(0), Gate::x(0)};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.gates = {Gate::cx(0, 0)};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.gates = {Gate::x(2)};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.gates = {Gate::measure(1), Gate::measure(1)};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_SUITE_END();
