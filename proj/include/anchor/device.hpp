#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace anchor {

struct CouplingGraph {
  int num_physical = 0;
  std::vector<std::pair<int, int>> edges;  // undirected, stored i < j, sorted, unique

  bool has_edge(int a, int b) const;
  std::vector<std::vector<int>> adjacency() const;  // sorted neighbor lists
  // Throws std::invalid_argument on self-loops, out-of-range endpoints,
  // duplicates, or a disconnected graph.
  void validate() const;
};

struct CalibrationSnapshot {
  int day = 0;
  std::vector<double> err_1q;       // per qubit
  std::vector<double> err_readout;  // per qubit
  std::map<std::pair<int, int>, double> err_2q;  // per edge, keyed i < j
  std::vector<double> t1_us, t2_us;
  double dur_1q_ns = 35.0;
  double dur_2q_ns = 300.0;

  double edge_err(int a, int b) const;
  // Error probabilities must lie in [0, 0.5], t2 <= 2*t1, durations positive,
  // and every vector/edge map must match the graph.
  void validate(const CouplingGraph& g) const;
};

struct DeviceModel {
  std::string name;
  CouplingGraph graph;
  std::vector<CalibrationSnapshot> snapshots;  // strictly increasing day

  // Snapshot with the greatest day <= requested; earliest snapshot when the
  // request predates all of them.
  const CalibrationSnapshot& snapshot_at(int day) const;
  void validate() const;
};

// JSON schema:
// {"name": str, "num_physical": int, "edges": [[i, j], ...],
//  "snapshots": [{"day": int, "err_1q": [...], "err_2q": {"i-j": f},
//                 "err_readout": [...], "t1_us": [...], "t2_us": [...],
//                 "dur_1q_ns": f, "dur_2q_ns": f}, ...]}
DeviceModel parse_device_json(const std::string& text);
std::string device_json(const DeviceModel& m);
DeviceModel load_device(const std::string& path);
void save_device(const DeviceModel& m, const std::string& path);

// Random-walk calibration drift: every error rate evolves independently as
// r_d = clamp(r_{d-1} * exp(g), base/10, min(0.5, base*10)) with
// g ~ N(0, drift_sigma^2), where base is the rate in the starting snapshot.
// T1/T2 and durations are carried over unchanged. Returns `days` snapshots
// numbered base.day+1 .. base.day+days. Deterministic given the seed.
std::vector<CalibrationSnapshot> synth_drift(const CalibrationSnapshot& base, int days,
                                             double drift_sigma, uint64_t seed);

}  // namespace anchor
