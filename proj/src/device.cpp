#include "anchor/device.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "anchor/rng.hpp"

namespace anchor {

using json = nlohmann::json;

bool CouplingGraph::has_edge(int a, int b) const {
  if (a > b) std::swap(a, b);
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(a, b));
}

std::vector<std::vector<int>> CouplingGraph::adjacency() const {
  std::vector<std::vector<int>> adj(num_physical);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& n : adj) std::sort(n.begin(), n.end());
  return adj;
}

void CouplingGraph::validate() const {
  if (num_physical <= 0) throw std::invalid_argument("graph has no qubits");
  for (auto [a, b] : edges) {
    if (a == b) throw std::invalid_argument("self-loop in coupling graph");
    if (a < 0 || b < 0 || a >= num_physical || b >= num_physical)
      throw std::invalid_argument("edge endpoint out of range");
    if (a > b) throw std::invalid_argument("edges must be stored (i, j) with i < j");
  }
  for (size_t i = 1; i < edges.size(); ++i)
    if (edges[i] <= edges[i - 1])
      throw std::invalid_argument("edges must be sorted and unique");
  // connectivity by BFS from qubit 0
  std::vector<std::vector<int>> adj = adjacency();
  std::vector<bool> seen(num_physical, false);
  std::vector<int> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    int v = queue.back();
    queue.pop_back();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = true;
        queue.push_back(w);
      }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw std::invalid_argument("coupling graph is disconnected");
}

double CalibrationSnapshot::edge_err(int a, int b) const {
  if (a > b) std::swap(a, b);
  auto it = err_2q.find({a, b});
  if (it == err_2q.end())
    throw std::invalid_argument("no 2q error rate for edge " + std::to_string(a) + "-" +
                                std::to_string(b));
  return it->second;
}

void CalibrationSnapshot::validate(const CouplingGraph& g) const {
  size_t n = static_cast<size_t>(g.num_physical);
  if (err_1q.size() != n || err_readout.size() != n || t1_us.size() != n || t2_us.size() != n)
    throw std::invalid_argument("snapshot vectors must have one entry per physical qubit");
  auto check_prob = [](double p, const char* what) {
    if (!(p >= 0.0 && p <= 0.5))
      throw std::invalid_argument(std::string(what) + " outside [0, 0.5]");
  };
  for (double p : err_1q) check_prob(p, "err_1q");
  for (double p : err_readout) check_prob(p, "err_readout");
  if (err_2q.size() != g.edges.size())
    throw std::invalid_argument("err_2q must cover exactly the coupling edges");
  for (const auto& [e, p] : err_2q) {
    if (!g.has_edge(e.first, e.second))
      throw std::invalid_argument("err_2q entry for non-edge");
    check_prob(p, "err_2q");
  }
  for (size_t q = 0; q < n; ++q) {
    if (t1_us[q] <= 0 || t2_us[q] <= 0)
      throw std::invalid_argument("t1/t2 must be positive");
    if (t2_us[q] > 2.0 * t1_us[q] + 1e-12)
      throw std::invalid_argument("t2 must not exceed 2*t1");
  }
  if (dur_1q_ns <= 0 || dur_2q_ns <= 0)
    throw std::invalid_argument("gate durations must be positive");
}

const CalibrationSnapshot& DeviceModel::snapshot_at(int day) const {
  if (snapshots.empty()) throw std::invalid_argument("device has no snapshots");
  const CalibrationSnapshot* best = nullptr;
  for (const CalibrationSnapshot& s : snapshots) {
    if (s.day <= day) best = &s;
  }
  return best ? *best : snapshots.front();
}

void DeviceModel::validate() const {
  if (name.empty()) throw std::invalid_argument("device needs a name");
  graph.validate();
  if (snapshots.empty()) throw std::invalid_argument("device has no snapshots");
  for (size_t i = 0; i < snapshots.size(); ++i) {
    snapshots[i].validate(graph);
    if (i > 0 && snapshots[i].day <= snapshots[i - 1].day)
      throw std::invalid_argument("snapshot days must be strictly increasing");
  }
}

namespace {

std::pair<int, int> parse_edge_key(const std::string& key) {
  size_t dash = key.find('-');
  if (dash == std::string::npos || dash == 0 || dash + 1 >= key.size())
    throw std::invalid_argument("bad err_2q key '" + key + "', expected \"i-j\"");
  int a = std::stoi(key.substr(0, dash));
  int b = std::stoi(key.substr(dash + 1));
  if (a > b) std::swap(a, b);
  return {a, b};
}

std::string edge_key(std::pair<int, int> e) {
  return std::to_string(e.first) + "-" + std::to_string(e.second);
}

}  // namespace

DeviceModel parse_device_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("device JSON parse error: ") + e.what());
  }
  DeviceModel m;
  try {
    m.name = j.at("name").get<std::string>();
    m.graph.num_physical = j.at("num_physical").get<int>();
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2)
        throw std::invalid_argument("edges entries must be [i, j]");
      int a = e[0].get<int>(), b = e[1].get<int>();
      if (a > b) std::swap(a, b);
      m.graph.edges.emplace_back(a, b);
    }
    std::sort(m.graph.edges.begin(), m.graph.edges.end());
    for (const auto& js : j.at("snapshots")) {
      CalibrationSnapshot s;
      s.day = js.at("day").get<int>();
      s.err_1q = js.at("err_1q").get<std::vector<double>>();
      s.err_readout = js.at("err_readout").get<std::vector<double>>();
      s.t1_us = js.at("t1_us").get<std::vector<double>>();
      s.t2_us = js.at("t2_us").get<std::vector<double>>();
      s.dur_1q_ns = js.at("dur_1q_ns").get<double>();
      s.dur_2q_ns = js.at("dur_2q_ns").get<double>();
      for (const auto& [key, val] : js.at("err_2q").items())
        s.err_2q[parse_edge_key(key)] = val.get<double>();
      m.snapshots.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("device JSON schema violation: ") + e.what());
  }
  m.validate();
  return m;
}

std::string device_json(const DeviceModel& m) {
  json j;
  j["name"] = m.name;
  j["num_physical"] = m.graph.num_physical;
  json edges = json::array();
  for (auto e : m.graph.edges) edges.push_back({e.first, e.second});
  j["edges"] = edges;
  json snaps = json::array();
  for (const CalibrationSnapshot& s : m.snapshots) {
    json js;
    js["day"] = s.day;
    js["err_1q"] = s.err_1q;
    js["err_readout"] = s.err_readout;
    js["t1_us"] = s.t1_us;
    js["t2_us"] = s.t2_us;
    js["dur_1q_ns"] = s.dur_1q_ns;
    js["dur_2q_ns"] = s.dur_2q_ns;
    json e2q = json::object();
    for (const auto& [e, p] : s.err_2q) e2q[edge_key(e)] = p;
    js["err_2q"] = e2q;
    snaps.push_back(std::move(js));
  }
  j["snapshots"] = snaps;
  return j.dump(2) + "\n";
}

DeviceModel load_device(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open device file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_device_json(buf.str());
}

void save_device(const DeviceModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write device file: " + path);
  out << device_json(m);
}

namespace {

// One independent stream per (seed, day, family, index): drift draws do not
// depend on evaluation order.
double drift_step(uint64_t seed, int day, int family, int index, double sigma) {
  Rng rng(mix_seed(seed, static_cast<uint64_t>(day), static_cast<uint64_t>(family),
                   static_cast<uint64_t>(index)));
  return rng.next_gaussian() * sigma;
}

double clamp_rate(double r, double base) {
  double lo = base / 10.0;
  double hi = std::min(0.5, base * 10.0);
  return std::clamp(r, lo, hi);
}

}  // namespace

std::vector<CalibrationSnapshot> synth_drift(const CalibrationSnapshot& base, int days,
                                             double drift_sigma, uint64_t seed) {
  if (days < 1) throw std::invalid_argument("synth_drift needs days >= 1");
  std::vector<CalibrationSnapshot> out;
  out.reserve(days);
  CalibrationSnapshot prev = base;
  for (int d = 1; d <= days; ++d) {
    CalibrationSnapshot s = prev;
    s.day = base.day + d;
    for (size_t q = 0; q < s.err_1q.size(); ++q)
      s.err_1q[q] = clamp_rate(prev.err_1q[q] * std::exp(drift_step(seed, d, 0, q, drift_sigma)),
                               base.err_1q[q]);
    for (size_t q = 0; q < s.err_readout.size(); ++q)
      s.err_readout[q] = clamp_rate(
          prev.err_readout[q] * std::exp(drift_step(seed, d, 1, q, drift_sigma)),
          base.err_readout[q]);
    int ei = 0;
    for (auto& [e, p] : s.err_2q) {
      p = clamp_rate(prev.err_2q.at(e) * std::exp(drift_step(seed, d, 2, ei, drift_sigma)),
                     base.err_2q.at(e));
      ++ei;
    }
    out.push_back(s);
    prev = out.back();
  }
  return out;
}

}  // namespace anchor
