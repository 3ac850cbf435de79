#include "anchor/mapgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "anchor/rng.hpp"

namespace anchor {

using json = nlohmann::json;

namespace {

// Sorted frontier of `selected`: unselected vertices adjacent to the set.
std::vector<int> frontier_of(const std::vector<int>& selected,
                             const std::vector<std::vector<int>>& adj,
                             const std::vector<bool>& in_set) {
  std::vector<int> frontier;
  for (int v : selected)
    for (int w : adj[v])
      if (!in_set[w] && !std::binary_search(frontier.begin(), frontier.end(), w)) {
        frontier.insert(std::upper_bound(frontier.begin(), frontier.end(), w), w);
      }
  return frontier;
}

}  // namespace

std::vector<int> randmap(int q, const CouplingGraph& g, uint64_t seed) {
  if (q < 1 || q > g.num_physical)
    throw std::invalid_argument("randmap: qubit count out of range");
  std::vector<std::vector<int>> adj = g.adjacency();
  Rng rng(seed);
  std::vector<int> selected{static_cast<int>(rng.next_index(g.num_physical))};
  std::vector<bool> in_set(g.num_physical, false);
  in_set[selected[0]] = true;
  while (static_cast<int>(selected.size()) < q) {
    std::vector<int> frontier = frontier_of(selected, adj, in_set);
    if (frontier.empty())
      throw std::runtime_error("randmap: graph too small or disconnected");
    int pick = frontier[rng.next_index(frontier.size())];
    selected.push_back(pick);
    in_set[pick] = true;
  }
  return selected;
}

std::vector<int> optimap(const Circuit& c, const CalibrationSnapshot& snap,
                         const CouplingGraph& g, double temperature, uint64_t seed) {
  int q = c.num_qubits;
  if (q < 1 || q > g.num_physical)
    throw std::invalid_argument("optimap: qubit count out of range");
  Rng rng(seed);
  std::vector<std::vector<int>> adj = g.adjacency();

  // softmax pick over (candidate, score), lower scores more likely; at
  // temperature zero this is the argmin with lowest-candidate tie-break.
  auto pick = [&](const std::vector<int>& cand, const std::vector<double>& score) {
    size_t best = 0;
    for (size_t i = 1; i < cand.size(); ++i)
      if (score[i] < score[best] - 1e-15) best = i;
    if (temperature <= 0.0) return cand[best];
    double lo = score[best];
    std::vector<double> weight(cand.size());
    double total = 0;
    for (size_t i = 0; i < cand.size(); ++i) {
      weight[i] = std::exp(-(score[i] - lo) / temperature);
      total += weight[i];
    }
    double u = rng.next_double() * total;
    double acc = 0;
    for (size_t i = 0; i < cand.size(); ++i) {
      acc += weight[i];
      if (u < acc) return cand[i];
    }
    return cand.back();
  };

  if (q == 1) {
    // Degenerate case: no 2q edge to seed with; score qubits directly.
    std::vector<int> cand(g.num_physical);
    std::vector<double> score(g.num_physical);
    for (int v = 0; v < g.num_physical; ++v) {
      cand[v] = v;
      score[v] = snap.err_1q[v] + snap.err_readout[v];
    }
    return {pick(cand, score)};
  }

  std::pair<int, int> seed_edge = g.edges.front();
  double best_err = std::numeric_limits<double>::infinity();
  for (auto e : g.edges) {
    double err = snap.edge_err(e.first, e.second);
    if (err < best_err - 1e-18) {  // ties keep the lexicographically first edge
      best_err = err;
      seed_edge = e;
    }
  }
  std::vector<int> selected{seed_edge.first, seed_edge.second};
  std::vector<bool> in_set(g.num_physical, false);
  in_set[seed_edge.first] = in_set[seed_edge.second] = true;

  while (static_cast<int>(selected.size()) < q) {
    std::vector<int> frontier = frontier_of(selected, adj, in_set);
    if (frontier.empty()) throw std::runtime_error("optimap: ran out of frontier");
    std::vector<double> score(frontier.size());
    for (size_t i = 0; i < frontier.size(); ++i) {
      int v = frontier[i];
      double cheapest = std::numeric_limits<double>::infinity();
      for (int w : adj[v])
        if (in_set[w]) cheapest = std::min(cheapest, snap.edge_err(v, w));
      score[i] = cheapest + snap.err_1q[v] + snap.err_readout[v];
    }
    int chosen = pick(frontier, score);
    selected.push_back(chosen);
    in_set[chosen] = true;
  }
  return selected;
}

CircuitMap route(const Circuit& c, const std::vector<int>& assignment,
                 const CouplingGraph& g, const std::string& device_name) {
  if (static_cast<int>(assignment.size()) != c.num_qubits)
    throw std::invalid_argument("route: assignment size must equal circuit qubit count");
  std::vector<bool> in_set(g.num_physical, false);
  for (int p : assignment) {
    if (p < 0 || p >= g.num_physical)
      throw std::invalid_argument("route: physical qubit out of range");
    if (in_set[p]) throw std::invalid_argument("route: duplicate physical qubit");
    in_set[p] = true;
  }
  for (const Gate& gate : c.gates)
    if (gate.kind == GateKind::U3)
      throw std::invalid_argument("route: circuit must be basis-decomposed");

  std::vector<std::vector<int>> adj = g.adjacency();

  // BFS distances inside the induced subgraph, used for shortest swap paths.
  auto distances_from = [&](int src) {
    std::vector<int> dist(g.num_physical, -1);
    std::vector<int> queue{src};
    dist[src] = 0;
    for (size_t head = 0; head < queue.size(); ++head) {
      int v = queue[head];
      for (int w : adj[v])
        if (in_set[w] && dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
    }
    return dist;
  };

  CircuitMap m;
  m.device = device_name;
  m.assignment = assignment;
  m.origin = MapOrigin::Rand;
  m.routed.num_qubits = g.num_physical;
  m.routed.name = c.name;

  std::vector<int> tracking = assignment;                // logical -> physical
  std::vector<int> occupant(g.num_physical, -1);        // physical -> logical
  for (int l = 0; l < c.num_qubits; ++l) occupant[assignment[l]] = l;

  auto emit_swap = [&](int a, int b) {
    m.routed.gates.push_back(Gate::cx(a, b));
    m.routed.gates.push_back(Gate::cx(b, a));
    m.routed.gates.push_back(Gate::cx(a, b));
    int la = occupant[a], lb = occupant[b];
    std::swap(occupant[a], occupant[b]);
    if (la >= 0) tracking[la] = b;
    if (lb >= 0) tracking[lb] = a;
  };

  std::vector<Gate> deferred_measures;
  for (const Gate& gate : c.gates) {
    switch (gate.kind) {
      case GateKind::X:
      case GateKind::SX:
      case GateKind::RZ: {
        Gate moved = gate;
        moved.qubits[0] = tracking[gate.qubits[0]];
        m.routed.gates.push_back(moved);
        break;
      }
      case GateKind::Measure:
        // Deferred: swaps for later cx gates may still move this logical
        // qubit, and the measure must land on its final physical home.
        deferred_measures.push_back(gate);
        break;
      case GateKind::CX: {
        int ctl = tracking[gate.qubits[0]];
        int tgt = tracking[gate.qubits[1]];
        if (!g.has_edge(ctl, tgt)) {
          std::vector<int> dist = distances_from(tgt);
          if (dist[ctl] < 0)
            throw std::runtime_error("route: induced subgraph is disconnected");
          // Move the control toward the target; each hop takes the smallest
          // neighbor index that still lies on a shortest path.
          while (dist[ctl] > 1) {
            int next = -1;
            for (int w : adj[ctl])
              if (in_set[w] && dist[w] == dist[ctl] - 1) {
                next = w;
                break;  // adjacency lists are sorted
              }
            emit_swap(ctl, next);
            ctl = next;
          }
        }
        m.routed.gates.push_back(Gate::cx(ctl, tgt));
        break;
      }
      case GateKind::U3:
        break;  // unreachable, rejected above
    }
  }
  for (const Gate& gate : deferred_measures)
    m.routed.gates.push_back(Gate::measure(tracking[gate.qubits[0]], gate.cbit));
  m.final_layout = tracking;
  m.routed.validate();
  return m;
}

namespace {

constexpr double kTemperatureCycle[] = {0.0, 0.5, 1.0};

}  // namespace

std::vector<CircuitMap> generate_map_set(const Circuit& c, const DeviceModel& model,
                                         int day, const MapSetConfig& cfg) {
  if (cfg.m < 2 || cfg.m % 2 != 0)
    throw std::invalid_argument("generate_map_set: m must be even and >= 2");
  Circuit basis = decompose_to_basis(c);
  const CalibrationSnapshot& snap = model.snapshot_at(day);

  std::set<std::vector<int>> used;
  std::vector<CircuitMap> maps;
  maps.reserve(cfg.m);
  int half = cfg.m / 2;
  for (int i = 0; i < cfg.m; ++i) {
    bool opti = i < half;
    double temperature = opti ? kTemperatureCycle[i % 3] : 0.0;
    std::vector<int> assignment;
    for (int attempt = 0; attempt <= 20; ++attempt) {
      uint64_t seed = mix_seed(cfg.seed, static_cast<uint64_t>(i),
                               static_cast<uint64_t>(attempt));
      assignment = opti ? optimap(basis, snap, model.graph, temperature, seed)
                        : randmap(basis.num_qubits, model.graph, seed);
      if (used.insert(assignment).second) break;
      // duplicate: retry with a fresh seed, keep the last attempt regardless
    }
    CircuitMap m = route(basis, assignment, model.graph, model.name);
    m.origin = opti ? MapOrigin::Opti : MapOrigin::Rand;
    maps.push_back(std::move(m));
  }
  return maps;
}

// The text grammar has no way to retarget classical bits, and routed
// circuits need exactly that, so gates are stored structurally here.
std::string map_json(const CircuitMap& m) {
  json j;
  j["device"] = m.device;
  j["assignment"] = m.assignment;
  j["final_layout"] = m.final_layout;
  j["origin"] = m.origin == MapOrigin::Opti ? "OPTI" : "RAND";
  json gates = json::array();
  for (const Gate& g : m.routed.gates) {
    switch (g.kind) {
      case GateKind::X: gates.push_back({"x", g.qubits[0]}); break;
      case GateKind::SX: gates.push_back({"sx", g.qubits[0]}); break;
      case GateKind::RZ: gates.push_back({"rz", g.qubits[0], g.params[0]}); break;
      case GateKind::CX: gates.push_back({"cx", g.qubits[0], g.qubits[1]}); break;
      case GateKind::U3:
        gates.push_back({"u3", g.qubits[0], g.params[0], g.params[1], g.params[2]});
        break;
      case GateKind::Measure: gates.push_back({"measure", g.qubits[0], g.cbit}); break;
    }
  }
  j["routed"] = {{"qubits", m.routed.num_qubits}, {"gates", std::move(gates)}};
  return j.dump(2) + "\n";
}

CircuitMap map_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("map JSON parse error: ") + e.what());
  }
  CircuitMap m;
  try {
    m.device = j.at("device").get<std::string>();
    m.assignment = j.at("assignment").get<std::vector<int>>();
    m.final_layout = j.at("final_layout").get<std::vector<int>>();
    std::string origin = j.at("origin").get<std::string>();
    if (origin != "OPTI" && origin != "RAND")
      throw std::invalid_argument("map origin must be OPTI or RAND");
    m.origin = origin == "OPTI" ? MapOrigin::Opti : MapOrigin::Rand;
    const json& r = j.at("routed");
    m.routed.num_qubits = r.at("qubits").get<int>();
    for (const json& row : r.at("gates")) {
      std::string op = row.at(0).get<std::string>();
      if (op == "x") m.routed.gates.push_back(Gate::x(row.at(1)));
      else if (op == "sx") m.routed.gates.push_back(Gate::sx(row.at(1)));
      else if (op == "rz") m.routed.gates.push_back(Gate::rz(row.at(1), row.at(2)));
      else if (op == "cx") m.routed.gates.push_back(Gate::cx(row.at(1), row.at(2)));
      else if (op == "u3")
        m.routed.gates.push_back(Gate::u3(row.at(1), row.at(2), row.at(3), row.at(4)));
      else if (op == "measure")
        m.routed.gates.push_back(Gate::measure(row.at(1), row.at(2)));
      else
        throw std::invalid_argument("map JSON: unknown gate op " + op);
    }
    m.routed.validate();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("map JSON schema violation: ") + e.what());
  }
  return m;
}

}  // namespace anchor
