// command-line front end: simulate | train | plan | bench | report | fleet
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "anchor/benchmarks.hpp"
#include "anchor/circuit.hpp"
#include "anchor/device.hpp"
#include "anchor/fleet.hpp"
#include "anchor/forest.hpp"
#include "anchor/lp.hpp"
#include "anchor/mapgen.hpp"
#include "anchor/pipeline.hpp"
#include "anchor/rng.hpp"
#include "anchor/sim.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace anchor;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

// sorted for deterministic device ordering
std::vector<DeviceModel> load_device_dir(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json")
      files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no device .json files in " + dir);
  std::vector<DeviceModel> devices;
  devices.reserve(files.size());
  for (const std::string& f : files) devices.push_back(load_device(f));
  return devices;
}

std::map<std::string, TvdForest> load_forest_dir(const std::string& dir,
                                                 const std::vector<DeviceModel>& devices) {
  std::map<std::string, TvdForest> forests;
  for (const DeviceModel& d : devices) {
    std::string path = dir + "/" + d.name + ".forest.json";
    TvdForest f = load_forest(path);
    f.device = d.name;
    forests[d.name] = std::move(f);
  }
  return forests;
}

int device_index_named(const std::vector<std::string>& names, const std::string& wanted) {
  if (wanted.empty()) return 0;
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == wanted) return static_cast<int>(i);
  throw std::runtime_error("unknown target computer: " + wanted);
}

json plan_to_json(const ShotPlan& sp, const TvdMatrix& t) {
  json j;
  j["computers"] = t.computers;
  j["maps"] = t.maps;
  j["fractions"] = sp.fractions;
  j["shots"] = sp.shots;
  j["equalized_tvd"] = sp.equalized_tvd;
  j["objective"] = sp.objective;
  j["epsilon_used"] = sp.epsilon_used;
  j["target_computer"] = sp.target_computer;
  return j;
}

// ---- simulate ----

struct SimulateOpts {
  std::string circuit_file, device_file;
  int day = 0;
  long long shots = 32000;
  uint64_t seed = 1;
  bool idle_decay = false;
};

void cmd_simulate(const SimulateOpts& o) {
  Circuit c = load_circuit(o.circuit_file);
  DeviceModel dev = load_device(o.device_file);
  const CalibrationSnapshot& snap = dev.snapshot_at(o.day);
  Circuit basis = decompose_to_basis(c);
  std::vector<int> asn = randmap(basis.num_qubits, dev.graph, mix_seed(o.seed, 'P'));
  CircuitMap map = route(basis, asn, dev.graph, dev.name);
  NoiseOptions opt;
  opt.idle_decay = o.idle_decay;
  ShotResult res = sample_noisy(map, snap, o.shots, mix_seed(o.seed, 'X'), opt);
  json j;
  j["circuit"] = c.name;
  j["device"] = dev.name;
  j["day"] = o.day;
  j["counts"] = res.counts;
  j["total"] = res.total;
  j["tvd_vs_ideal_pct"] = tvd(ideal_distribution(c), res.to_distribution());
  std::cout << j.dump(2) << "\n";
}

// ---- train ----

struct TrainOpts {
  std::string devices_dir, out_dir;
  int n_circuits = 20000;
  long long shots_per_label = 4096;
  int label_runs = 2;
  double held_fraction = 0.25;
  uint64_t seed = 1;
};

void cmd_train(const TrainOpts& o) {
  std::vector<DeviceModel> devices = load_device_dir(o.devices_dir);
  fs::create_directories(o.out_dir);
  char buf[160];
  for (size_t i = 0; i < devices.size(); ++i) {
    TrainingConfig cfg;
    cfg.n_circuits = o.n_circuits;
    cfg.shots_per_label = o.shots_per_label;
    cfg.label_runs = o.label_runs;
    cfg.seed = mix_seed(o.seed, i);  // same per-device stream the bench uses
    TrainingBundle bundle = gen_training_bundle(devices[i], cfg);
    auto [train, held] = split_bundle(bundle, o.held_fraction, mix_seed(cfg.seed, 0x8E1D));
    TvdForest f = fit_forest(train.set);
    f.device = devices[i].name;
    save_forest(f, o.out_dir + "/" + f.device + ".forest.json");
    std::snprintf(buf, sizeof buf, "%s rows %d held_mse %.6f esp_mse %.6f\n",
                  f.device.c_str(), train.set.rows(), forest_mse(f, held),
                  esp_mse(devices[i], held));
    std::cout << buf;
  }
}

// ---- plan ----

struct PlanOpts {
  std::string circuit_file, target, devices_dir, models_dir, tvd_override;
  int m = 12;
  int day = 0;
  double epsilon = 0.1;
  long long shots = 32000;
  uint64_t seed = 1;
};

void cmd_plan(const PlanOpts& o) {
  TvdMatrix t;
  if (!o.tvd_override.empty()) {
    json j = json::parse(read_file(o.tvd_override));
    t.computers = j.at("computers").get<std::vector<std::string>>();
    t.maps = j.at("maps").get<std::vector<std::string>>();
    t.values = j.at("values").get<std::vector<std::vector<double>>>();
  } else {
    if (o.circuit_file.empty() || o.devices_dir.empty() || o.models_dir.empty())
      throw std::runtime_error("plan needs a circuit, --devices and --models "
                               "(or a --tvd-override matrix)");
    Circuit c = load_circuit(o.circuit_file);
    std::vector<DeviceModel> devices = load_device_dir(o.devices_dir);
    std::map<std::string, TvdForest> forests = load_forest_dir(o.models_dir, devices);
    MapSetConfig ms;
    ms.m = o.m;
    std::vector<std::vector<EnsemblePrediction>> preds(devices.size());
    for (size_t i = 0; i < devices.size(); ++i) {
      ms.seed = mix_seed(o.seed, 'M', i);
      std::vector<CircuitMap> maps = generate_map_set(c, devices[i], o.day, ms);
      for (const CircuitMap& m : maps)
        preds[i].push_back(predict_ensemble(forests.at(devices[i].name), m));
      t.computers.push_back(devices[i].name);
    }
    int target = device_index_named(t.computers, o.target);
    std::vector<int> kept = confidence_filter(preds[target]);
    for (int jx : kept) t.maps.push_back("map" + std::to_string(jx));
    for (size_t i = 0; i < devices.size(); ++i) {
      std::vector<double> row;
      for (int jx : kept) row.push_back(preds[i][jx].mean);
      t.values.push_back(std::move(row));
    }
  }
  LpConfig cfg;
  cfg.epsilon = o.epsilon;
  cfg.target_computer = device_index_named(t.computers, o.target);
  ShotPlan sp = plan(t, cfg, o.shots);
  std::cout << plan_to_json(sp, t).dump(2) << "\n";
}

// ---- bench ----

std::vector<RunRecord> records_from_csv(const std::string& text, const std::string& what) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "technique,circuit,device,day,tvd_pct,wall_time_s,seed")
    throw std::runtime_error(what + ": not a records csv");
  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 7) throw std::runtime_error(what + ": malformed row: " + line);
    RunRecord r;
    r.technique = technique_from_string(fields[0]);
    r.circuit = fields[1];
    r.device = fields[2];
    r.day = std::stoi(fields[3]);
    r.tvd = std::stod(fields[4]);
    r.wall_time = std::stod(fields[5]);
    r.seed = std::stoull(fields[6]);
    records.push_back(std::move(r));
  }
  return records;
}

struct BenchOpts {
  std::string config_file, out_dir;
};

void cmd_bench(const BenchOpts& o) {
  json cfg_j = json::parse(read_file(o.config_file));

  std::vector<DeviceModel> devices;
  if (cfg_j.contains("devices_dir")) {
    devices = load_device_dir(cfg_j.at("devices_dir").get<std::string>());
  } else {
    json fj = cfg_j.value("fleet", json::object());
    FleetSpec fspec;
    fspec.devices = fj.value("devices", fspec.devices);
    fspec.qubits = fj.value("qubits", fspec.qubits);
    fspec.days = fj.value("days", fspec.days);
    fspec.drift_sigma = fj.value("drift_sigma", fspec.drift_sigma);
    fspec.seed = fj.value("seed", fspec.seed);
    devices = make_fleet(fspec);
  }

  Workbench wb;
  if (cfg_j.contains("models_dir")) {
    wb.devices = std::move(devices);
    wb.forests = load_forest_dir(cfg_j.at("models_dir").get<std::string>(), wb.devices);
  } else {
    json tj = cfg_j.value("training", json::object());
    TrainingConfig tc;
    tc.n_circuits = tj.value("n_circuits", 2000);
    tc.shots_per_label = tj.value("shots_per_label", tc.shots_per_label);
    tc.label_runs = tj.value("label_runs", tc.label_runs);
    tc.seed = tj.value("seed", tc.seed);
    wb = build_workbench(std::move(devices), tc);
  }

  ExperimentConfig ec;
  for (const Circuit& c : benchmark_suite()) ec.circuits.push_back(c.name);
  ec.circuits = cfg_j.value("circuits", ec.circuits);
  if (cfg_j.contains("techniques")) {
    ec.techniques.clear();
    for (const auto& name : cfg_j.at("techniques"))
      ec.techniques.push_back(technique_from_string(name.get<std::string>()));
  }
  ec.days = cfg_j.value("days", ec.days);
  ec.total_shots = cfg_j.value("total_shots", ec.total_shots);
  ec.m = cfg_j.value("m", ec.m);
  ec.k = cfg_j.value("k", ec.k);
  ec.epsilon = cfg_j.value("epsilon", ec.epsilon);
  ec.seed = cfg_j.value("seed", ec.seed);
  ec.runs_per_cell = cfg_j.value("runs_per_cell", ec.runs_per_cell);

  std::vector<RunRecord> temporal = experiment_temporal(wb, ec);
  std::vector<RunRecord> spatial = experiment_spatial(wb, ec);

  std::string temporal_csv = records_csv(temporal);
  std::string spatial_csv = records_csv(spatial);
  fs::create_directories(o.out_dir);
  write_file(o.out_dir + "/temporal.csv", temporal_csv);
  write_file(o.out_dir + "/spatial.csv", spatial_csv);
  // summarize the rounded records the csv carries, so `report` over these
  // files rebuilds summary.json byte-for-byte
  write_file(o.out_dir + "/summary.json",
             summary_json(records_from_csv(temporal_csv, "temporal"),
                          records_from_csv(spatial_csv, "spatial")));
  std::cout << "wrote " << temporal.size() << " temporal and " << spatial.size()
            << " spatial records to " << o.out_dir << "\n";
}

// ---- report ----

std::vector<RunRecord> parse_records_csv(const std::string& path) {
  return records_from_csv(read_file(path), path);
}

struct ReportOpts {
  std::string temporal_csv, spatial_csv;
};

void cmd_report(const ReportOpts& o) {
  std::vector<RunRecord> temporal = parse_records_csv(o.temporal_csv);
  std::vector<RunRecord> spatial;
  if (!o.spatial_csv.empty()) spatial = parse_records_csv(o.spatial_csv);
  std::cout << summary_json(temporal, spatial);
}

// ---- fleet ----

struct FleetOpts {
  std::string out_dir;
  FleetSpec spec;
};

void cmd_fleet(const FleetOpts& o) {
  std::vector<DeviceModel> devices = make_fleet(o.spec);
  fs::create_directories(o.out_dir);
  for (const DeviceModel& d : devices)
    save_device(d, o.out_dir + "/" + d.name + ".json");
  std::cout << "wrote " << devices.size() << " devices to " << o.out_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noise-adaptive circuit mapping and shot distribution toolkit"};
  app.require_subcommand(1);

  SimulateOpts sim_o;
  CLI::App* sim = app.add_subcommand("simulate", "run one circuit on a noisy device model");
  sim->add_option("circuit", sim_o.circuit_file, "circuit file")
      ->required()->check(CLI::ExistingFile);
  sim->add_option("device", sim_o.device_file, "device model json")
      ->required()->check(CLI::ExistingFile);
  sim->add_option("--day", sim_o.day, "calibration day");
  sim->add_option("--shots", sim_o.shots, "shots to draw");
  sim->add_option("--seed", sim_o.seed, "master seed");
  sim->add_flag("--idle-decay", sim_o.idle_decay, "enable the T1 reset channel");
  sim->callback([&] { cmd_simulate(sim_o); });

  TrainOpts train_o;
  CLI::App* train = app.add_subcommand("train", "fit one tvd predictor per device");
  train->add_option("--devices", train_o.devices_dir, "directory of device jsons")
      ->required()->check(CLI::ExistingDirectory);
  train->add_option("--out", train_o.out_dir, "output directory for forest files")->required();
  train->add_option("--n-circuits", train_o.n_circuits, "training circuits per device");
  train->add_option("--shots-per-label", train_o.shots_per_label, "shots per noisy label run");
  train->add_option("--label-runs", train_o.label_runs, "noisy runs averaged per label");
  train->add_option("--held-fraction", train_o.held_fraction, "held-out fraction for the mse");
  train->add_option("--seed", train_o.seed, "master seed");
  train->callback([&] { cmd_train(train_o); });

  PlanOpts plan_o;
  CLI::App* pln = app.add_subcommand("plan", "compute an lp shot plan for one circuit");
  pln->add_option("circuit", plan_o.circuit_file, "circuit file")->check(CLI::ExistingFile);
  pln->add_option("--target", plan_o.target, "target computer name (default: first)");
  pln->add_option("--devices", plan_o.devices_dir, "directory of device jsons");
  pln->add_option("--models", plan_o.models_dir, "directory of trained forests");
  pln->add_option("--m", plan_o.m, "maps per device");
  pln->add_option("--day", plan_o.day, "calibration day");
  pln->add_option("--epsilon", plan_o.epsilon, "allowed tvd ratio gap");
  pln->add_option("--shots", plan_o.shots, "total shots to split");
  pln->add_option("--seed", plan_o.seed, "master seed");
  pln->add_option("--tvd-override", plan_o.tvd_override,
                  "tvd matrix json; skips mapping and prediction")
      ->check(CLI::ExistingFile);
  pln->callback([&] { cmd_plan(plan_o); });

  BenchOpts bench_o;
  CLI::App* bench = app.add_subcommand("bench", "run the temporal and spatial experiments");
  bench->add_option("--config", bench_o.config_file, "experiment config json")
      ->required()->check(CLI::ExistingFile);
  bench->add_option("--out", bench_o.out_dir, "report directory")->required();
  bench->callback([&] { cmd_bench(bench_o); });

  ReportOpts report_o;
  CLI::App* report = app.add_subcommand("report", "rebuild the summary json from record csvs");
  report->add_option("temporal", report_o.temporal_csv, "temporal records csv")
      ->required()->check(CLI::ExistingFile);
  report->add_option("spatial", report_o.spatial_csv, "spatial records csv")
      ->check(CLI::ExistingFile);
  report->callback([&] { cmd_report(report_o); });

  FleetOpts fleet_o;
  CLI::App* fleet = app.add_subcommand("fleet", "write a synthetic drifting device fleet");
  fleet->add_option("--out", fleet_o.out_dir, "output directory")->required();
  fleet->add_option("--devices", fleet_o.spec.devices, "device count");
  fleet->add_option("--qubits", fleet_o.spec.qubits, "qubits per device");
  fleet->add_option("--days", fleet_o.spec.days, "calibration snapshots per device");
  fleet->add_option("--drift-sigma", fleet_o.spec.drift_sigma, "per-day log-normal drift");
  fleet->add_option("--seed", fleet_o.spec.seed, "fleet seed");
  fleet->callback([&] { cmd_fleet(fleet_o); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage problems are exit 1, --help is 0
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
