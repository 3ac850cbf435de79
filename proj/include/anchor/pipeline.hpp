#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "anchor/circuit.hpp"
#include "anchor/device.hpp"
#include "anchor/forest.hpp"
#include "anchor/lp.hpp"

namespace anchor {

enum class Technique { Anchor, RandMap, OptiMap, EqualDist, EspLp };

const char* technique_name(Technique t);                 // "ANCHOR", "RANDMAP", ...
Technique technique_from_string(const std::string& s);   // throws on unknown

struct ExperimentConfig {
  std::vector<std::string> circuits;     // benchmark names
  std::vector<Technique> techniques{Technique::Anchor, Technique::RandMap,
                                    Technique::OptiMap, Technique::EqualDist,
                                    Technique::EspLp};
  std::vector<int> days{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  long long total_shots = 32000;
  int m = 12;            // maps per device
  int k = 0;             // computers in the LP; 0 means all devices
  double epsilon = 0.1;
  uint64_t seed = 1;
  int runs_per_cell = 20;  // records per (circuit, technique) cell
};

struct RunRecord {
  Technique technique = Technique::Anchor;
  std::string circuit;
  std::string device;
  int day = 0;
  double tvd = 0;        // percentage points
  double wall_time = 0;  // seconds, informational only (reports pin it to 0)
  uint64_t seed = 0;     // cell seed shared by all techniques of the cell
};

struct MetricsSummary {
  double mean_tvd = 0;
  double cov = 0;  // sample std (n-1) / mean; 0 when n == 1
  int n_runs = 0;
};

// Devices plus one trained predictor per device.
struct Workbench {
  std::vector<DeviceModel> devices;
  std::map<std::string, TvdForest> forests;

  int lp_k(const ExperimentConfig& cfg) const;  // resolves cfg.k (0 = all)
  const DeviceModel& device_named(const std::string& name) const;
};

// Train one forest per device with the given training settings. The per-
// device training seed mixes cfg.seed with the device index.
Workbench build_workbench(std::vector<DeviceModel> devices, const TrainingConfig& cfg);

// Full pipeline on one circuit: m maps per each of the first k devices,
// ensemble predictions, confidence filter on the target device's variances
// (same kept indices applied to every device), LP shot plan, execution of the
// target row on the target device's day snapshot, merged counts vs ideal.
// The map sets depend on (seed, device) but not on the technique, so
// EqualDist and EspLp reuse them bit-for-bit. `pass` varies only the
// execution sampling: pools, predictions, and the plan are functions of
// (seed, day) alone, like rerunning the day's plan a second time.
RunRecord run_anchor(const Workbench& wb, const Circuit& c, int target,
                     const ExperimentConfig& cfg, int day, uint64_t seed, int pass = 0);

// RANDMAP: all shots on one random map. OPTIMAP: all shots on one
// temperature-0 map. EQUALDIST: anchor's map set, shots split evenly with the
// remainder to the lowest indices. ESP_LP: anchor's pipeline with matrix
// entries 100*(1-esp) and no confidence filter.
RunRecord run_baseline(const Workbench& wb, Technique technique, const Circuit& c,
                       int target, const ExperimentConfig& cfg, int day, uint64_t seed,
                       int pass = 0);

// One record per (circuit, technique, r < runs_per_cell) on a fixed device
// (the first), cycling the configured days as r advances. Repeats of a day
// slot (r >= |days|) share that day's seed and plan and differ only in the
// execution sampling.
std::vector<RunRecord> experiment_temporal(const Workbench& wb, const ExperimentConfig& cfg);
// Same structure across devices at the first configured day; repeats of a
// device slot vary only the sampling.
std::vector<RunRecord> experiment_spatial(const Workbench& wb, const ExperimentConfig& cfg);

// total split into m near-equal parts, remainder spread over the lowest
// indices: 32000 over 12 -> eight 2667s then four 2666s.
std::vector<long long> equal_split(long long total, int m);

MetricsSummary metrics_summary(const std::vector<double>& tvds);
// circuit name -> technique name -> summary over that cell's records
std::map<std::string, std::map<std::string, MetricsSummary>> group_metrics(
    const std::vector<RunRecord>& records);

// technique,circuit,device,day,tvd_pct,wall_time_s,seed — byte-stable across
// reruns (wall_time_s is reported as 0.000000 by design).
std::string records_csv(const std::vector<RunRecord>& records);

// Per-cell metrics for both experiments plus (base - anchor)/base reduction
// ratios per circuit and aggregate medians.
std::string summary_json(const std::vector<RunRecord>& temporal,
                         const std::vector<RunRecord>& spatial);

}  // namespace anchor
