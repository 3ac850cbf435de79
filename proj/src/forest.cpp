#include "anchor/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "anchor/parallel.hpp"
#include "anchor/rng.hpp"
#include "anchor/sim.hpp"

namespace anchor {

using json = nlohmann::json;

void TrainingSet::validate() const {
  if (max_len < 1) throw std::invalid_argument("training set: max_len must be >= 1");
  if (inputs.size() != labels.size())
    throw std::invalid_argument("training set: inputs/labels length mismatch");
  size_t width = static_cast<size_t>(features());
  for (const auto& row : inputs)
    if (row.size() != width)
      throw std::invalid_argument("training set: row width != 2*max_len");
  for (double l : labels)
    if (!(l >= 0.0 && l <= 100.0))
      throw std::invalid_argument("training set: label outside [0, 100]");
  if (!norm_mean.empty() || !norm_std.empty()) {
    if (norm_mean.size() != width || norm_std.size() != width)
      throw std::invalid_argument("training set: normalization width mismatch");
    for (double s : norm_std)
      if (!(s > 0)) throw std::invalid_argument("training set: norm_std must be positive");
  }
}

void compute_normalization(TrainingSet& ts) {
  size_t width = static_cast<size_t>(ts.features());
  ts.norm_mean.assign(width, 0.0);
  ts.norm_std.assign(width, 1.0);
  if (ts.inputs.empty()) return;
  double n = static_cast<double>(ts.inputs.size());
  for (const auto& row : ts.inputs)
    for (size_t j = 0; j < width; ++j) ts.norm_mean[j] += row[j];
  for (double& m : ts.norm_mean) m /= n;
  std::vector<double> var(width, 0.0);
  for (const auto& row : ts.inputs)
    for (size_t j = 0; j < width; ++j) {
      double d = row[j] - ts.norm_mean[j];
      var[j] += d * d;
    }
  for (size_t j = 0; j < width; ++j) {
    double s = std::sqrt(var[j] / n);
    ts.norm_std[j] = s > 1e-12 ? s : 1.0;  // constant columns (padding) pass through
  }
}

double RegressionTree::predict(const std::vector<double>& row) const {
  int at = 0;
  while (nodes[at].feature >= 0)
    at = row[nodes[at].feature] <= nodes[at].threshold ? nodes[at].left : nodes[at].right;
  return nodes[at].value;
}

namespace {

// Depth-first grower for one tree over pre-normalized rows.
struct TreeGrower {
  const std::vector<std::vector<double>>& x;
  const std::vector<double>& y;
  const ForestHyper& hyper;
  int features_per_split;
  Rng rng;
  std::vector<TreeNode> nodes;
  std::vector<int> feature_pool;  // scratch for per-node subset draws

  TreeGrower(const std::vector<std::vector<double>>& x_, const std::vector<double>& y_,
             const ForestHyper& hyper_, int fps, uint64_t seed)
      : x(x_), y(y_), hyper(hyper_), features_per_split(fps), rng(seed) {
    feature_pool.resize(x[0].size());
  }

  int make_leaf(const std::vector<int>& idx) {
    double sum = 0;
    for (int i : idx) sum += y[i];
    nodes.push_back({-1, 0.0, -1, -1, sum / static_cast<double>(idx.size())});
    return static_cast<int>(nodes.size()) - 1;
  }

  int grow(std::vector<int>& idx, int depth) {
    int n = static_cast<int>(idx.size());
    double sum = 0, sum_sq = 0;
    for (int i : idx) {
      sum += y[i];
      sum_sq += y[i] * y[i];
    }
    double parent_sse = sum_sq - sum * sum / n;
    if (depth >= hyper.max_depth || n < hyper.min_split || parent_sse <= 1e-12)
      return make_leaf(idx);

    // random feature subset for this node, examined in ascending order so
    // tied impurities resolve to the lower feature index
    std::iota(feature_pool.begin(), feature_pool.end(), 0);
    int total = static_cast<int>(feature_pool.size());
    for (int i = 0; i < features_per_split; ++i) {
      int j = i + static_cast<int>(rng.next_index(total - i));
      std::swap(feature_pool[i], feature_pool[j]);
    }
    std::vector<int> feats(feature_pool.begin(), feature_pool.begin() + features_per_split);
    std::sort(feats.begin(), feats.end());

    int best_feature = -1;
    double best_sse = parent_sse - 1e-12;  // require a real reduction
    double best_threshold = 0;
    std::vector<std::pair<double, double>> vals(n);  // (feature value, label)
    for (int f : feats) {
      for (int i = 0; i < n; ++i) vals[i] = {x[idx[i]][f], y[idx[i]]};
      std::sort(vals.begin(), vals.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      double left_sum = 0, left_sq = 0;
      for (int p = 1; p < n; ++p) {
        left_sum += vals[p - 1].second;
        left_sq += vals[p - 1].second * vals[p - 1].second;
        if (vals[p - 1].first >= vals[p].first) continue;  // tie: not a boundary
        if (p < hyper.min_leaf || n - p < hyper.min_leaf) continue;
        double right_sum = sum - left_sum, right_sq = sum_sq - left_sq;
        double sse = (left_sq - left_sum * left_sum / p) +
                     (right_sq - right_sum * right_sum / (n - p));
        if (sse < best_sse) {
          best_sse = sse;
          best_feature = f;
          best_threshold = 0.5 * (vals[p - 1].first + vals[p].first);
        }
      }
    }
    if (best_feature < 0) return make_leaf(idx);

    std::vector<int> left, right;
    left.reserve(idx.size());
    right.reserve(idx.size());
    for (int i : idx)
      (x[i][best_feature] <= best_threshold ? left : right).push_back(i);

    int self = static_cast<int>(nodes.size());
    nodes.push_back({best_feature, best_threshold, -1, -1, 0.0});
    nodes[self].left = grow(left, depth + 1);
    nodes[self].right = grow(right, depth + 1);
    return self;
  }
};

std::vector<double> normalize_row(const std::vector<float>& raw,
                                  const std::vector<double>& mean,
                                  const std::vector<double>& std_dev) {
  if (raw.size() != mean.size())
    throw std::invalid_argument("predictor: feature width mismatch");
  std::vector<double> row(raw.size());
  for (size_t j = 0; j < raw.size(); ++j) row[j] = (raw[j] - mean[j]) / std_dev[j];
  return row;
}

EnsemblePrediction predict_row(const TvdForest& f, const std::vector<float>& raw) {
  std::vector<double> row = normalize_row(raw, f.norm_mean, f.norm_std);
  EnsemblePrediction p;
  p.per_tree.reserve(f.trees.size());
  for (const RegressionTree& t : f.trees) p.per_tree.push_back(t.predict(row));
  double n = static_cast<double>(p.per_tree.size());
  for (double v : p.per_tree) p.mean += v;
  p.mean /= n;
  if (p.per_tree.size() > 1) {
    for (double v : p.per_tree) p.variance += (v - p.mean) * (v - p.mean);
    p.variance /= n - 1;
  }
  return p;
}

}  // namespace

TvdForest fit_forest(const TrainingSet& ts, const ForestHyper& hyper) {
  ts.validate();
  if (ts.inputs.empty()) throw std::invalid_argument("fit_forest: empty training set");
  if (hyper.n_trees < 1 || hyper.max_depth < 1 || hyper.min_split < 2 || hyper.min_leaf < 1)
    throw std::invalid_argument("fit_forest: bad hyperparameters");

  TvdForest f;
  f.hyper = hyper;
  f.max_len = ts.max_len;
  if (ts.norm_mean.empty()) {
    TrainingSet copy = ts;
    compute_normalization(copy);
    f.norm_mean = copy.norm_mean;
    f.norm_std = copy.norm_std;
  } else {
    f.norm_mean = ts.norm_mean;
    f.norm_std = ts.norm_std;
  }

  // Canonical row order makes the fit independent of how the caller shuffled
  // the set: bootstrap indices land on the same rows either way.
  int n = ts.rows();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (ts.inputs[a] != ts.inputs[b]) return ts.inputs[a] < ts.inputs[b];
    return ts.labels[a] < ts.labels[b];
  });
  std::vector<std::vector<double>> x(n);
  std::vector<double> y(n);
  for (int r = 0; r < n; ++r) {
    x[r] = normalize_row(ts.inputs[order[r]], f.norm_mean, f.norm_std);
    y[r] = ts.labels[order[r]];
  }

  int features = ts.features();
  int fps = std::max(1, static_cast<int>(std::floor(std::sqrt(features))));
  fps = std::min(fps, features);

  f.trees.assign(hyper.n_trees, {});
  parallel_for(hyper.n_trees, [&](size_t t) {
    TreeGrower grower(x, y, hyper, fps, mix_seed(hyper.random_state, t));
    std::vector<int> idx(n);
    if (hyper.bootstrap) {
      for (int i = 0; i < n; ++i) idx[i] = static_cast<int>(grower.rng.next_index(n));
    } else {
      std::iota(idx.begin(), idx.end(), 0);
    }
    grower.nodes.reserve(64);
    int root = grower.grow(idx, 0);
    if (root != 0) throw std::logic_error("fit_forest: root must be node 0");
    f.trees[t].nodes = std::move(grower.nodes);
  });
  return f;
}

EnsemblePrediction predict_ensemble(const TvdForest& f, const CircuitMap& map) {
  if (f.trees.empty()) throw std::invalid_argument("predict: forest has no trees");
  return predict_row(f, encode_flat(map.routed, f.max_len));
}

std::vector<int> confidence_filter(const std::vector<EnsemblePrediction>& preds,
                                   double keep_fraction) {
  int n = static_cast<int>(preds.size());
  if (n < 3) throw std::invalid_argument("confidence_filter: need at least 3 predictions");
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
    throw std::invalid_argument("confidence_filter: keep_fraction must be in (0, 1]");
  int keep = std::min(n, static_cast<int>(std::ceil(keep_fraction * n)));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return preds[a].variance < preds[b].variance; });
  order.resize(keep);
  std::sort(order.begin(), order.end());
  return order;
}

TrainingBundle gen_training_bundle(const DeviceModel& model, const TrainingConfig& cfg) {
  model.validate();
  if (cfg.n_circuits < 0) throw std::invalid_argument("training: negative circuit count");
  auto [q_lo, q_hi] = cfg.qubit_range;
  auto [g_lo, g_hi] = cfg.gate_range;
  if (q_lo < 1 || q_lo > q_hi || q_hi > model.graph.num_physical)
    throw std::invalid_argument("training: bad qubit range");
  if (g_lo < 0 || g_lo > g_hi) throw std::invalid_argument("training: bad gate range");
  if (cfg.shots_per_label < 1 || cfg.label_runs < 1)
    throw std::invalid_argument("training: bad label settings");

  struct RowDraft {
    CircuitMap map;
    int day = 0;
    double label = 0;
    int tokens = 0;
  };
  std::vector<RowDraft> drafts(cfg.n_circuits);
  parallel_for(static_cast<size_t>(cfg.n_circuits), [&](size_t i) {
    Rng rng(mix_seed(cfg.seed, i));
    int q = q_lo + static_cast<int>(rng.next_index(q_hi - q_lo + 1));
    int n_gates = g_lo + static_cast<int>(rng.next_index(g_hi - g_lo + 1));
    Circuit c;
    c.num_qubits = q;
    c.gates.reserve(n_gates + q);
    for (int g = 0; g < n_gates; ++g) {
      int kinds = q < 2 ? 2 : 3;  // cx needs two qubits
      switch (rng.next_index(kinds)) {
        case 0: c.gates.push_back(Gate::x(static_cast<int>(rng.next_index(q)))); break;
        case 1: c.gates.push_back(Gate::sx(static_cast<int>(rng.next_index(q)))); break;
        default: {
          int a = static_cast<int>(rng.next_index(q));
          int b = static_cast<int>(rng.next_index(q - 1));
          if (b >= a) ++b;
          c.gates.push_back(Gate::cx(a, b));
        }
      }
    }
    for (int l = 0; l < q; ++l) c.gates.push_back(Gate::measure(l));

    std::vector<int> assignment = randmap(q, model.graph, rng.next_u64());
    RowDraft& d = drafts[i];
    d.map = route(c, assignment, model.graph, model.name);
    size_t day_idx = rng.next_index(model.snapshots.size());
    const CalibrationSnapshot& snap = model.snapshots[day_idx];
    d.day = snap.day;
    d.tokens = token_count(d.map.routed);

    Distribution ideal = ideal_distribution(c);
    for (int r = 0; r < cfg.label_runs; ++r) {
      ShotResult res = sample_noisy(d.map, snap, cfg.shots_per_label, rng.next_u64());
      d.label += tvd(ideal, res.to_distribution());
    }
    d.label /= cfg.label_runs;
  });

  int max_len = 8;
  if (!drafts.empty()) {
    std::vector<int> counts;
    counts.reserve(drafts.size());
    for (const RowDraft& d : drafts) counts.push_back(d.tokens);
    std::sort(counts.begin(), counts.end());
    size_t p99_at = static_cast<size_t>(std::ceil(0.99 * counts.size()));
    int p99 = counts[std::min(counts.size() - 1, p99_at == 0 ? 0 : p99_at - 1)];
    max_len = std::max(8, static_cast<int>(std::ceil(1.25 * p99)));
  }

  TrainingBundle b;
  b.set.max_len = max_len;
  for (RowDraft& d : drafts) {
    if (d.tokens > max_len) continue;  // oversize outliers are dropped, not truncated
    b.set.inputs.push_back(encode_flat(d.map.routed, max_len));
    b.set.labels.push_back(d.label);
    b.maps.push_back(std::move(d.map));
    b.days.push_back(d.day);
  }
  compute_normalization(b.set);
  return b;
}

TrainingSet gen_training_set(const DeviceModel& model, const TrainingConfig& cfg) {
  return gen_training_bundle(model, cfg).set;
}

std::pair<TrainingBundle, TrainingBundle> split_bundle(const TrainingBundle& b,
                                                       double held_fraction,
                                                       uint64_t seed) {
  if (!(held_fraction >= 0.0 && held_fraction < 1.0))
    throw std::invalid_argument("split_bundle: held_fraction must be in [0, 1)");
  int n = b.set.rows();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng.next_index(i + 1));
    std::swap(order[i], order[j]);
  }
  int held = static_cast<int>(std::ceil(held_fraction * n));
  TrainingBundle train, held_out;
  train.set.max_len = held_out.set.max_len = b.set.max_len;
  for (int r = 0; r < n; ++r) {
    TrainingBundle& dst = r < held ? held_out : train;
    int i = order[r];
    dst.set.inputs.push_back(b.set.inputs[i]);
    dst.set.labels.push_back(b.set.labels[i]);
    dst.maps.push_back(b.maps[i]);
    dst.days.push_back(b.days[i]);
  }
  compute_normalization(train.set);
  compute_normalization(held_out.set);
  return {std::move(train), std::move(held_out)};
}

std::string forest_json(const TvdForest& f) {
  json j;
  j["version"] = 1;
  j["device"] = f.device;
  j["max_len"] = f.max_len;
  j["hyper"] = {{"n_trees", f.hyper.n_trees},
                {"max_depth", f.hyper.max_depth},
                {"min_split", f.hyper.min_split},
                {"min_leaf", f.hyper.min_leaf},
                {"bootstrap", f.hyper.bootstrap},
                {"random_state", f.hyper.random_state}};
  j["norm_mean"] = f.norm_mean;
  j["norm_std"] = f.norm_std;
  json trees = json::array();
  for (const RegressionTree& t : f.trees) {
    json nodes = json::array();
    for (const TreeNode& nd : t.nodes)
      nodes.push_back({nd.feature, nd.threshold, nd.left, nd.right, nd.value});
    trees.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees);
  return j.dump() + "\n";
}

TvdForest forest_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("forest JSON parse error: ") + e.what());
  }
  TvdForest f;
  try {
    if (j.at("version").get<int>() != 1)
      throw std::invalid_argument("forest JSON: unsupported version");
    f.device = j.at("device").get<std::string>();
    f.max_len = j.at("max_len").get<int>();
    const json& h = j.at("hyper");
    f.hyper.n_trees = h.at("n_trees").get<int>();
    f.hyper.max_depth = h.at("max_depth").get<int>();
    f.hyper.min_split = h.at("min_split").get<int>();
    f.hyper.min_leaf = h.at("min_leaf").get<int>();
    f.hyper.bootstrap = h.at("bootstrap").get<bool>();
    f.hyper.random_state = h.at("random_state").get<uint64_t>();
    f.norm_mean = j.at("norm_mean").get<std::vector<double>>();
    f.norm_std = j.at("norm_std").get<std::vector<double>>();
    for (const json& tj : j.at("trees")) {
      RegressionTree t;
      for (const json& nj : tj) {
        if (!nj.is_array() || nj.size() != 5)
          throw std::invalid_argument("forest JSON: malformed node");
        t.nodes.push_back({nj[0].get<int>(), nj[1].get<double>(), nj[2].get<int>(),
                           nj[3].get<int>(), nj[4].get<double>()});
      }
      f.trees.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("forest JSON schema violation: ") + e.what());
  }
  if (static_cast<int>(f.trees.size()) != f.hyper.n_trees)
    throw std::invalid_argument("forest JSON: tree count != n_trees");
  return f;
}

void save_forest(const TvdForest& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << forest_json(f);
}

TvdForest load_forest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return forest_from_json(ss.str());
}

double forest_mse(const TvdForest& f, const TrainingBundle& data) {
  if (data.set.rows() == 0) throw std::invalid_argument("forest_mse: empty data");
  if (data.set.max_len != f.max_len)
    throw std::invalid_argument("forest_mse: token capacity mismatch");
  double acc = 0;
  for (int i = 0; i < data.set.rows(); ++i) {
    double err = (predict_row(f, data.set.inputs[i]).mean - data.set.labels[i]) / 100.0;
    acc += err * err;
  }
  return acc / data.set.rows();
}

double esp_mse(const DeviceModel& model, const TrainingBundle& data) {
  if (data.set.rows() == 0) throw std::invalid_argument("esp_mse: empty data");
  if (data.maps.size() != data.set.inputs.size() || data.days.size() != data.set.inputs.size())
    throw std::invalid_argument("esp_mse: bundle rows out of sync");
  double acc = 0;
  for (int i = 0; i < data.set.rows(); ++i) {
    double proxy = 100.0 * (1.0 - esp(data.maps[i], model.snapshot_at(data.days[i])));
    double err = (proxy - data.set.labels[i]) / 100.0;
    acc += err * err;
  }
  return acc / data.set.rows();
}

}  // namespace anchor
