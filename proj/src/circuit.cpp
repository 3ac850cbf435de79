#include "anchor/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace anchor {

void Circuit::validate() const {
  if (num_qubits <= 0) throw std::invalid_argument("circuit has no qubits");
  std::vector<bool> measured(num_qubits, false);
  for (const Gate& g : gates) {
    for (int i = 0; i < g.arity(); ++i) {
      int q = g.qubits[i];
      if (q < 0 || q >= num_qubits)
        throw std::invalid_argument("qubit index " + std::to_string(q) + " out of range");
      if (measured[q])
        throw std::invalid_argument("qubit " + std::to_string(q) + " used after measure");
    }
    if (g.kind == GateKind::CX && g.qubits[0] == g.qubits[1])
      throw std::invalid_argument("cx control equals target");
    if (g.kind == GateKind::Measure) measured[g.qubits[0]] = true;
  }
}

namespace {

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

int parse_int(const std::string& tok, int line) {
  int v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw ParseError(line, "expected integer, got '" + tok + "'");
  return v;
}

double parse_angle(const std::string& tok, int line) {
  try {
    size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "expected number, got '" + tok + "'");
  }
}

int parse_qubit(const std::string& tok, int num_qubits, int line) {
  int q = parse_int(tok, line);
  if (q < 0 || q >= num_qubits)
    throw ParseError(line, "qubit " + std::to_string(q) + " out of range [0, " +
                               std::to_string(num_qubits) + ")");
  return q;
}

void need_args(const std::vector<std::string>& toks, size_t n, int line) {
  if (toks.size() != n + 1)
    throw ParseError(line, "'" + toks[0] + "' takes " + std::to_string(n) + " argument(s)");
}

}  // namespace

Circuit parse_circuit(std::string_view text) {
  Circuit c;
  std::vector<bool> measured;
  bool header_seen = false;
  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (size_t hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    std::vector<std::string> toks = split_ws(line);
    if (toks.empty()) continue;

    if (!header_seen) {
      if (toks[0] != "qubits") throw ParseError(line_no, "expected 'qubits <n>' header");
      need_args(toks, 1, line_no);
      c.num_qubits = parse_int(toks[1], line_no);
      if (c.num_qubits <= 0) throw ParseError(line_no, "qubit count must be positive");
      measured.assign(c.num_qubits, false);
      header_seen = true;
      continue;
    }

    auto check_live = [&](int q) {
      if (measured[q])
        throw ParseError(line_no, "qubit " + std::to_string(q) + " used after measure");
    };

    const std::string& op = toks[0];
    if (op == "x" || op == "sx") {
      need_args(toks, 1, line_no);
      int q = parse_qubit(toks[1], c.num_qubits, line_no);
      check_live(q);
      c.gates.push_back(op == "x" ? Gate::x(q) : Gate::sx(q));
    } else if (op == "rz") {
      need_args(toks, 2, line_no);
      int q = parse_qubit(toks[1], c.num_qubits, line_no);
      check_live(q);
      c.gates.push_back(Gate::rz(q, parse_angle(toks[2], line_no)));
    } else if (op == "cx") {
      need_args(toks, 2, line_no);
      int ctl = parse_qubit(toks[1], c.num_qubits, line_no);
      int tgt = parse_qubit(toks[2], c.num_qubits, line_no);
      if (ctl == tgt) throw ParseError(line_no, "cx control equals target");
      check_live(ctl);
      check_live(tgt);
      c.gates.push_back(Gate::cx(ctl, tgt));
    } else if (op == "u3") {
      need_args(toks, 4, line_no);
      int q = parse_qubit(toks[1], c.num_qubits, line_no);
      check_live(q);
      c.gates.push_back(Gate::u3(q, parse_angle(toks[2], line_no),
                                 parse_angle(toks[3], line_no),
                                 parse_angle(toks[4], line_no)));
    } else if (op == "measure") {
      need_args(toks, 1, line_no);
      if (toks[1] == "all") {
        for (int q = 0; q < c.num_qubits; ++q) {
          if (measured[q])
            throw ParseError(line_no, "qubit " + std::to_string(q) + " already measured");
          measured[q] = true;
          c.gates.push_back(Gate::measure(q));
        }
      } else {
        int q = parse_qubit(toks[1], c.num_qubits, line_no);
        if (measured[q])
          throw ParseError(line_no, "qubit " + std::to_string(q) + " already measured");
        measured[q] = true;
        c.gates.push_back(Gate::measure(q));
      }
    } else {
      throw ParseError(line_no, "unknown gate '" + op + "'");
    }
  }
  if (!header_seen) throw ParseError(line_no, "empty input, expected 'qubits <n>'");
  return c;
}

Circuit load_circuit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open circuit file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  Circuit c = parse_circuit(buf.str());
  c.name = std::filesystem::path(path).stem().string();
  return c;
}

namespace {

std::string fmt_angle(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string serialize_circuit(const Circuit& c) {
  std::string out = "qubits " + std::to_string(c.num_qubits) + "\n";
  for (const Gate& g : c.gates) {
    switch (g.kind) {
      case GateKind::X: out += "x " + std::to_string(g.qubits[0]); break;
      case GateKind::SX: out += "sx " + std::to_string(g.qubits[0]); break;
      case GateKind::RZ:
        out += "rz " + std::to_string(g.qubits[0]) + " " + fmt_angle(g.params[0]);
        break;
      case GateKind::CX:
        out += "cx " + std::to_string(g.qubits[0]) + " " + std::to_string(g.qubits[1]);
        break;
      case GateKind::U3:
        out += "u3 " + std::to_string(g.qubits[0]) + " " + fmt_angle(g.params[0]) + " " +
               fmt_angle(g.params[1]) + " " + fmt_angle(g.params[2]);
        break;
      case GateKind::Measure: out += "measure " + std::to_string(g.qubits[0]); break;
    }
    out += "\n";
  }
  return out;
}

Circuit decompose_to_basis(const Circuit& c) {
  Circuit out;
  out.num_qubits = c.num_qubits;
  out.name = c.name;
  for (const Gate& g : c.gates) {
    if (g.kind != GateKind::U3) {
      out.gates.push_back(g);
      continue;
    }
    int q = g.qubits[0];
    double theta = g.params[0], phi = g.params[1], lambda = g.params[2];
    out.gates.push_back(Gate::rz(q, lambda));
    out.gates.push_back(Gate::sx(q));
    out.gates.push_back(Gate::rz(q, theta + M_PI));
    out.gates.push_back(Gate::sx(q));
    out.gates.push_back(Gate::rz(q, phi + M_PI));
  }
  return out;
}

std::vector<GateToken> encode_two_number(const Circuit& c, int max_len) {
  if (max_len < 0) throw std::invalid_argument("max_len must be non-negative");
  std::vector<GateToken> tokens;
  for (const Gate& g : c.gates) {
    switch (g.kind) {
      case GateKind::U3:
        throw std::invalid_argument("encode_two_number requires a basis-decomposed circuit");
      case GateKind::RZ:
      case GateKind::Measure:
        break;  // virtual / terminal: carries no noise location
      case GateKind::X:
      case GateKind::SX:
        tokens.push_back({g.qubits[0] + 1, 0});
        break;
      case GateKind::CX:
        tokens.push_back({g.qubits[0] + 1, g.qubits[1] + 1});
        break;
    }
    if (static_cast<int>(tokens.size()) > max_len)
      throw std::length_error("circuit exceeds max_len " + std::to_string(max_len));
  }
  tokens.resize(max_len, GateToken{0, 0});
  return tokens;
}

std::vector<float> encode_flat(const Circuit& c, int max_len) {
  std::vector<GateToken> tokens = encode_two_number(c, max_len);
  std::vector<float> flat;
  flat.reserve(tokens.size() * 2);
  for (const GateToken& t : tokens) {
    flat.push_back(static_cast<float>(t.first));
    flat.push_back(static_cast<float>(t.second));
  }
  return flat;
}

int token_count(const Circuit& c) {
  int n = 0;
  for (const Gate& g : c.gates)
    if (g.kind != GateKind::RZ && g.kind != GateKind::Measure) ++n;
  return n;
}

CircuitStats circuit_stats(const Circuit& c) {
  CircuitStats st;
  std::vector<int> front(c.num_qubits, 0);
  for (const Gate& g : c.gates) {
    if (g.kind == GateKind::Measure) {
      ++st.num_meas;
      continue;
    }
    if (g.kind == GateKind::CX) {
      ++st.num_2q;
      int d = std::max(front[g.qubits[0]], front[g.qubits[1]]) + 1;
      front[g.qubits[0]] = front[g.qubits[1]] = d;
    } else {
      ++st.num_1q;
      front[g.qubits[0]] += 1;
    }
  }
  st.depth = front.empty() ? 0 : *std::max_element(front.begin(), front.end());
  return st;
}

}  // namespace anchor
