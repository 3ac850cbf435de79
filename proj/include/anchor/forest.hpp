#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "anchor/device.hpp"
#include "anchor/mapgen.hpp"

namespace anchor {

// Flat training rows for one device's TVD predictor. Inputs are raw
// two-number encodings; normalization statistics ride along so training and
// inference share them.
struct TrainingSet {
  int max_len = 0;                          // token capacity; rows are 2*max_len wide
  std::vector<std::vector<float>> inputs;   // raw encoded rows
  std::vector<double> labels;               // TVD percentage points in [0, 100]
  std::vector<double> norm_mean, norm_std;  // per feature; zero variance -> std 1

  int rows() const { return static_cast<int>(inputs.size()); }
  int features() const { return 2 * max_len; }
  void validate() const;
};

// (Re)compute the normalization vectors from the raw inputs. An empty set
// gets the identity (mean 0, std 1).
void compute_normalization(TrainingSet& ts);

struct TreeNode {
  int feature = -1;      // -1 marks a leaf
  double threshold = 0;  // x[feature] <= threshold goes left
  int left = -1, right = -1;
  double value = 0;      // leaf prediction
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // node 0 is the root
  double predict(const std::vector<double>& row) const;
};

struct ForestHyper {
  int n_trees = 100;
  int max_depth = 10;
  int min_split = 2;   // fewer samples than this become a leaf
  int min_leaf = 1;    // both split sides must keep at least this many
  bool bootstrap = true;
  uint64_t random_state = 42;
  // features considered per split = floor(sqrt(features)), fixed at fit time
};

struct TvdForest {
  std::string device;
  ForestHyper hyper;
  int max_len = 0;
  std::vector<double> norm_mean, norm_std;
  std::vector<RegressionTree> trees;
};

struct EnsemblePrediction {
  double mean = 0;
  double variance = 0;  // sample variance (n-1) across per_tree
  std::vector<double> per_tree;
};

// Standard regression forest: per tree, bootstrap-resample the rows and grow
// by recursive binary splits minimizing summed squared error over a random
// feature subset, stopping at max_depth/min_split/min_leaf or when no split
// reduces the error. Rows are canonically sorted before resampling, so the
// fit is invariant to input row order. Deterministic given random_state;
// trees are grown in parallel from independent per-tree streams.
TvdForest fit_forest(const TrainingSet& ts, const ForestHyper& hyper = {});

// Encode the map's routed circuit, normalize, evaluate every tree. Throws
// when the routed circuit exceeds the forest's token capacity.
EnsemblePrediction predict_ensemble(const TvdForest& f, const CircuitMap& map);

// Indices of the ceil(keep_fraction * n) predictions with the lowest
// variance, ties to the lower index, returned ascending. Requires n >= 3.
std::vector<int> confidence_filter(const std::vector<EnsemblePrediction>& preds,
                                   double keep_fraction = 2.0 / 3.0);

// Random training circuits: uniform qubit and gate counts, each gate
// uniformly X/SX/CX on distinct random qubits, measured in full, placed with
// randmap + route, labeled with tvd(ideal, noisy sample) on a calibration
// day drawn uniformly from the model. Labels average `label_runs` noisy
// runs. Token capacity is the 99th-percentile routed token count plus 25%
// margin (at least 8); longer rows are dropped.
struct TrainingConfig {
  int n_circuits = 20000;
  std::pair<int, int> qubit_range{3, 5};
  std::pair<int, int> gate_range{4, 150};
  long long shots_per_label = 4096;
  int label_runs = 2;
  uint64_t seed = 1;
};

// Rows plus the map and calibration day behind each row, so closed-form
// baselines (ESP) can be scored on exactly the same data.
struct TrainingBundle {
  TrainingSet set;
  std::vector<CircuitMap> maps;
  std::vector<int> days;
};

TrainingBundle gen_training_bundle(const DeviceModel& model, const TrainingConfig& cfg);
TrainingSet gen_training_set(const DeviceModel& model, const TrainingConfig& cfg);

// Deterministic shuffle-split into (train, held_out) sharing max_len, with
// ceil(held_fraction * rows) rows held out. Normalization is recomputed on
// each piece.
std::pair<TrainingBundle, TrainingBundle> split_bundle(const TrainingBundle& b,
                                                       double held_fraction,
                                                       uint64_t seed);

// Versioned JSON: hyperparameters, normalization, and flat node arrays.
std::string forest_json(const TvdForest& f);
TvdForest forest_from_json(const std::string& text);
void save_forest(const TvdForest& f, const std::string& path);
TvdForest load_forest(const std::string& path);

// Mean squared error on the (TVD/100)^2 scale.
double forest_mse(const TvdForest& f, const TrainingBundle& data);
// Same scale, predicting 100*(1-esp) instead of the forest output.
double esp_mse(const DeviceModel& model, const TrainingBundle& data);

}  // namespace anchor
