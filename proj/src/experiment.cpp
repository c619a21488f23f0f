#include "longtail/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace longtail {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kConfigVersion = 1;
constexpr const char* kCsvBanner = "# longtail-csv v1\n";

// --- enum names ---

const char* init_mode_name(InitMode m) {
  return m == InitMode::inverse_frequency ? "inverse_frequency" : "uniform";
}

InitMode init_mode_from(const std::string& s, const std::string& path) {
  if (s == "inverse_frequency") return InitMode::inverse_frequency;
  if (s == "uniform") return InitMode::uniform;
  throw ConfigError(path + ": unknown init mode '" + s + "'");
}

const char* adaptation_name(AdaptationMode m) {
  return m == AdaptationMode::group_wise ? "group_wise" : "class_wise";
}

AdaptationMode adaptation_from(const std::string& s, const std::string& path) {
  if (s == "group_wise") return AdaptationMode::group_wise;
  if (s == "class_wise") return AdaptationMode::class_wise;
  throw ConfigError(path + ": unknown adaptation mode '" + s + "'");
}

const char* signal_name(SignalMode m) {
  return m == SignalMode::validation_loss ? "validation_loss"
                                          : "validation_accuracy";
}

SignalMode signal_from(const std::string& s, const std::string& path) {
  if (s == "validation_loss") return SignalMode::validation_loss;
  if (s == "validation_accuracy") return SignalMode::validation_accuracy;
  throw ConfigError(path + ": unknown signal mode '" + s + "'");
}

// --- strict json helpers ---

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError((path.empty() ? item.key() : path + "." + item.key()) +
                        ": unknown key");
  }
}

std::string join_path(const std::string& path, const char* key) {
  return path.empty() ? key : path + "." + key;
}

template <typename T>
T fetch(const json& obj, const char* key, const std::string& path, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(join_path(path, key) + ": " + e.what());
  }
}

const json& section(const json& doc, const char* key) {
  const json& node = doc.at(key);
  if (!node.is_object())
    throw ConfigError(std::string(key) + ": must be an object");
  return node;
}

std::optional<double> fetch_optional(const json& obj, const char* key,
                                     const std::string& path,
                                     std::optional<double> fallback) {
  if (!obj.contains(key)) return fallback;
  if (obj.at(key).is_null()) return std::nullopt;
  try {
    return obj.at(key).get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(join_path(path, key) + ": " + e.what());
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void validate(const ExperimentConfig& c) {
  require(c.data.num_classes >= 1, "data.num_classes: must be >= 1");
  require(c.data.dim >= 1, "data.dim: must be >= 1");
  require(c.data.head_count >= 1, "data.head_count: must be >= 1");
  require(c.data.imbalance_ratio >= 1.0, "data.imbalance_ratio: must be >= 1");
  require(c.data.center_radius > 0.0, "data.center_radius: must be > 0");
  require(c.data.within_class_std >= 0.0, "data.within_class_std: must be >= 0");
  require(c.data.holdout_per_class >= 1, "data.holdout_per_class: must be >= 1");
  require(c.data.group_thresholds.size() == 2,
          "data.group_thresholds: exactly two cutoffs (tail/mid/head)");
  require(c.data.group_thresholds[0] < c.data.group_thresholds[1] &&
              c.data.group_thresholds[0] > 0,
          "data.group_thresholds: must be positive and strictly increasing");

  require(c.epochs >= 1, "training.epochs: must be >= 1");
  require(c.batch_size >= 1, "training.batch_size: must be >= 1");
  require(c.learning_rate > 0.0, "training.learning_rate: must be > 0");
  require(c.weight_decay >= 0.0, "training.weight_decay: must be >= 0");
  require(c.lr_decay_factor > 0.0, "training.lr_decay_factor: must be > 0");
  require(c.lr_decay_fraction >= 0.0 && c.lr_decay_fraction <= 1.0,
          "training.lr_decay_fraction: must be in [0, 1]");

  require(c.momentum > 0.0 && c.momentum <= 1.0,
          "augmentation.momentum: must be in (0, 1]");
  require(c.aug.virt_per_success >= 1,
          "augmentation.virt_per_success: must be >= 1");
  require(c.aug.max_virtual_per_iter >= 0,
          "augmentation.max_virtual_per_iter: must be >= 0 (0 = auto)");
  require(c.smote_k >= 1, "augmentation.smote_k: must be >= 1");

  require(c.controller.alpha > 1.0, "controller.alpha: must be > 1");
  require(c.controller.beta > 0.0 && c.controller.beta < 1.0,
          "controller.beta: must be in (0, 1)");
  require(c.controller.init_scale > 0.0, "controller.init_scale: must be > 0");
  if (c.controller.static_scale)
    require(*c.controller.static_scale > 0.0,
            "controller.static_scale: must be > 0");
  if (c.controller.cluster_epsilon)
    require(*c.controller.cluster_epsilon >= 0.0,
            "controller.cluster_epsilon: must be >= 0");
  require(c.controller.cluster_min_pts >= 1,
          "controller.cluster_min_pts: must be >= 1");
  require(c.controller.recluster_every >= 1,
          "controller.recluster_every: must be >= 1");

  require(c.rfs_threshold > 0.0 && c.rfs_threshold < 1.0,
          "validation.rfs_threshold: must be in (0, 1)");

  require(!c.modes.empty(), "modes: must not be empty");
  require(!c.seeds.empty(), "seeds: must not be empty");
  require(!c.output_dir.empty(), "output_dir: must not be empty");
}

// --- quantiles (type 7, linear interpolation) ---

double quantile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  if (values.size() == 1) return values[0];
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

double median(const std::vector<double>& values) { return quantile(values, 0.5); }

double interquartile_range(const std::vector<double>& values) {
  return quantile(values, 0.75) - quantile(values, 0.25);
}

double mean(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

// --- csv helpers ---

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SuiteError("cannot write " + path.string());
  out << content;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

struct SummaryRunRow {
  std::string mode;
  std::uint64_t seed = 0;
  // overall, tail, mid, head
  std::array<double, 4> accuracy{};
};

constexpr std::array<const char*, 4> kMetricNames{"overall_acc", "tail_acc",
                                                  "mid_acc", "head_acc"};

}  // namespace

const char* mode_name(AugmentationMode mode) {
  switch (mode) {
    case AugmentationMode::none: return "none";
    case AugmentationMode::fasa: return "fasa";
    case AugmentationMode::smote: return "smote";
  }
  return "none";
}

AugmentationMode mode_from_name(const std::string& name) {
  if (name == "none") return AugmentationMode::none;
  if (name == "fasa") return AugmentationMode::fasa;
  if (name == "smote") return AugmentationMode::smote;
  throw ConfigError("modes: unknown mode '" + name + "'");
}

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  check_keys(doc, "", {"version", "data", "training", "augmentation",
                       "controller", "validation", "modes", "seeds",
                       "output_dir"});
  if (!doc.contains("version")) throw ConfigError("version: missing");
  if (fetch<int>(doc, "version", "", -1) != kConfigVersion)
    throw ConfigError("version: expected " + std::to_string(kConfigVersion));

  ExperimentConfig c;

  if (doc.contains("data")) {
    const json& d = section(doc, "data");
    check_keys(d, "data",
               {"num_classes", "dim", "head_count", "imbalance_ratio",
                "center_radius", "within_class_std", "holdout_per_class",
                "imbalanced_val", "group_thresholds"});
    c.data.num_classes = fetch(d, "num_classes", "data", c.data.num_classes);
    c.data.dim = fetch(d, "dim", "data", c.data.dim);
    c.data.head_count = fetch(d, "head_count", "data", c.data.head_count);
    c.data.imbalance_ratio =
        fetch(d, "imbalance_ratio", "data", c.data.imbalance_ratio);
    c.data.center_radius =
        fetch(d, "center_radius", "data", c.data.center_radius);
    c.data.within_class_std =
        fetch(d, "within_class_std", "data", c.data.within_class_std);
    c.data.holdout_per_class =
        fetch(d, "holdout_per_class", "data", c.data.holdout_per_class);
    c.data.imbalanced_val =
        fetch(d, "imbalanced_val", "data", c.data.imbalanced_val);
    c.data.group_thresholds =
        fetch(d, "group_thresholds", "data", c.data.group_thresholds);
  }

  if (doc.contains("training")) {
    const json& t = section(doc, "training");
    check_keys(t, "training",
               {"epochs", "batch_size", "learning_rate", "weight_decay",
                "lr_decay_factor", "lr_decay_fraction"});
    c.epochs = fetch(t, "epochs", "training", c.epochs);
    c.batch_size = fetch(t, "batch_size", "training", c.batch_size);
    c.learning_rate = fetch(t, "learning_rate", "training", c.learning_rate);
    c.weight_decay = fetch(t, "weight_decay", "training", c.weight_decay);
    c.lr_decay_factor =
        fetch(t, "lr_decay_factor", "training", c.lr_decay_factor);
    c.lr_decay_fraction =
        fetch(t, "lr_decay_fraction", "training", c.lr_decay_fraction);
  }

  if (doc.contains("augmentation")) {
    const json& a = section(doc, "augmentation");
    check_keys(a, "augmentation",
               {"momentum", "virt_per_success", "max_virtual_per_iter",
                "smote_k"});
    c.momentum = fetch(a, "momentum", "augmentation", c.momentum);
    c.aug.virt_per_success =
        fetch(a, "virt_per_success", "augmentation", c.aug.virt_per_success);
    c.aug.max_virtual_per_iter = fetch(a, "max_virtual_per_iter",
                                       "augmentation", c.aug.max_virtual_per_iter);
    c.smote_k = fetch(a, "smote_k", "augmentation", c.smote_k);
  }

  if (doc.contains("controller")) {
    const json& k = section(doc, "controller");
    check_keys(k, "controller",
               {"alpha", "beta", "init_mode", "init_scale", "adaptation_mode",
                "signal", "static_scale", "cluster_epsilon", "cluster_min_pts",
                "recluster_every"});
    c.controller.alpha = fetch(k, "alpha", "controller", c.controller.alpha);
    c.controller.beta = fetch(k, "beta", "controller", c.controller.beta);
    if (k.contains("init_mode"))
      c.controller.init_mode = init_mode_from(
          fetch<std::string>(k, "init_mode", "controller", ""),
          "controller.init_mode");
    c.controller.init_scale =
        fetch(k, "init_scale", "controller", c.controller.init_scale);
    if (k.contains("adaptation_mode"))
      c.controller.adaptation_mode = adaptation_from(
          fetch<std::string>(k, "adaptation_mode", "controller", ""),
          "controller.adaptation_mode");
    if (k.contains("signal"))
      c.controller.signal =
          signal_from(fetch<std::string>(k, "signal", "controller", ""),
                      "controller.signal");
    c.controller.static_scale = fetch_optional(
        k, "static_scale", "controller", c.controller.static_scale);
    c.controller.cluster_epsilon = fetch_optional(
        k, "cluster_epsilon", "controller", c.controller.cluster_epsilon);
    c.controller.cluster_min_pts =
        fetch(k, "cluster_min_pts", "controller", c.controller.cluster_min_pts);
    c.controller.recluster_every =
        fetch(k, "recluster_every", "controller", c.controller.recluster_every);
  }

  if (doc.contains("validation")) {
    const json& v = section(doc, "validation");
    check_keys(v, "validation", {"rfs", "rfs_threshold"});
    c.rfs_on_validation = fetch(v, "rfs", "validation", c.rfs_on_validation);
    c.rfs_threshold =
        fetch(v, "rfs_threshold", "validation", c.rfs_threshold);
  }

  if (doc.contains("modes")) {
    const auto names =
        fetch<std::vector<std::string>>(doc, "modes", "", {});
    c.modes.clear();
    for (const std::string& name : names) c.modes.push_back(mode_from_name(name));
  }
  c.seeds = fetch(doc, "seeds", "", c.seeds);
  c.output_dir = fetch(doc, "output_dir", "", c.output_dir);

  validate(c);
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  json doc;
  doc["version"] = kConfigVersion;
  json& d = doc["data"];
  d["num_classes"] = c.data.num_classes;
  d["dim"] = c.data.dim;
  d["head_count"] = c.data.head_count;
  d["imbalance_ratio"] = c.data.imbalance_ratio;
  d["center_radius"] = c.data.center_radius;
  d["within_class_std"] = c.data.within_class_std;
  d["holdout_per_class"] = c.data.holdout_per_class;
  d["imbalanced_val"] = c.data.imbalanced_val;
  d["group_thresholds"] = c.data.group_thresholds;
  json& t = doc["training"];
  t["epochs"] = c.epochs;
  t["batch_size"] = c.batch_size;
  t["learning_rate"] = c.learning_rate;
  t["weight_decay"] = c.weight_decay;
  t["lr_decay_factor"] = c.lr_decay_factor;
  t["lr_decay_fraction"] = c.lr_decay_fraction;
  json& a = doc["augmentation"];
  a["momentum"] = c.momentum;
  a["virt_per_success"] = c.aug.virt_per_success;
  a["max_virtual_per_iter"] = c.aug.max_virtual_per_iter;
  a["smote_k"] = c.smote_k;
  json& k = doc["controller"];
  k["alpha"] = c.controller.alpha;
  k["beta"] = c.controller.beta;
  k["init_mode"] = init_mode_name(c.controller.init_mode);
  k["init_scale"] = c.controller.init_scale;
  k["adaptation_mode"] = adaptation_name(c.controller.adaptation_mode);
  k["signal"] = signal_name(c.controller.signal);
  k["static_scale"] = c.controller.static_scale
                          ? json(*c.controller.static_scale)
                          : json(nullptr);
  k["cluster_epsilon"] = c.controller.cluster_epsilon
                             ? json(*c.controller.cluster_epsilon)
                             : json(nullptr);
  k["cluster_min_pts"] = c.controller.cluster_min_pts;
  k["recluster_every"] = c.controller.recluster_every;
  json& v = doc["validation"];
  v["rfs"] = c.rfs_on_validation;
  v["rfs_threshold"] = c.rfs_threshold;
  json modes = json::array();
  for (AugmentationMode m : c.modes) modes.push_back(mode_name(m));
  doc["modes"] = modes;
  doc["seeds"] = c.seeds;
  doc["output_dir"] = c.output_dir;
  return doc.dump(2) + "\n";
}

RunConfig make_run_config(const ExperimentConfig& config, AugmentationMode mode,
                          std::uint64_t seed) {
  RunConfig run;
  run.data = config.data;
  run.epochs = config.epochs;
  run.batch_size = config.batch_size;
  run.learning_rate = config.learning_rate;
  run.weight_decay = config.weight_decay;
  run.lr_decay_factor = config.lr_decay_factor;
  run.lr_decay_fraction = config.lr_decay_fraction;
  run.momentum = config.momentum;
  run.mode = mode;
  run.aug = config.aug;
  run.smote_k = config.smote_k;
  run.controller = config.controller;
  run.rfs_on_validation = config.rfs_on_validation;
  run.rfs.threshold = config.rfs_threshold;
  run.seed = seed;
  return run;
}

namespace {

std::string metrics_csv(const RunReport& report) {
  std::string out = kCsvBanner;
  out += "epoch,overall_acc,tail_acc,mid_acc,head_acc,mean_val_loss\n";
  for (const EpochMetrics& m : report.epochs) {
    out += std::to_string(m.epoch);
    out += ',' + format_double(m.overall_accuracy);
    for (double acc : m.bin_accuracy) out += ',' + format_double(acc);
    out += ',' + format_double(m.mean_val_loss);
    out += '\n';
  }
  return out;
}

std::string weight_norms_csv(const RunReport& report) {
  std::string out = kCsvBanner;
  out += "epoch,class_id,norm\n";
  for (const EpochMetrics& m : report.epochs)
    for (std::size_t c = 0; c < m.weight_norms.size(); ++c)
      out += std::to_string(m.epoch) + ',' + std::to_string(c) + ',' +
             format_double(m.weight_norms[c]) + '\n';
  return out;
}

std::string trajectory_csv(const RunReport& report) {
  std::string out = kCsvBanner;
  out += "epoch,class_id,group_id,p_c,group_signal\n";
  for (const TrajectoryRow& row : report.trajectory) {
    out += std::to_string(row.epoch) + ',' + std::to_string(row.class_id) +
           ',' + std::to_string(row.group_id) + ',' + format_double(row.prob) +
           ',';
    if (row.group_signal) out += format_double(*row.group_signal);
    out += '\n';
  }
  return out;
}

struct RunCell {
  AugmentationMode mode;
  std::uint64_t seed;
  std::string dir_name;
  std::string status = "pending";
  std::string error;
  double seconds = 0.0;
  std::array<double, 4> final_accuracy{};
};

std::string summary_csv(const ExperimentConfig& config,
                        const std::vector<RunCell>& cells) {
  std::string out = kCsvBanner;
  out += "mode,kind,seed,overall_acc,tail_acc,mid_acc,head_acc\n";
  for (AugmentationMode mode : config.modes) {
    std::array<std::vector<double>, 4> columns;
    for (const RunCell& cell : cells) {
      if (cell.mode != mode) continue;
      out += std::string(mode_name(mode)) + ",run," +
             std::to_string(cell.seed);
      for (std::size_t i = 0; i < 4; ++i) {
        out += ',' + format_double(cell.final_accuracy[i]);
        columns[i].push_back(cell.final_accuracy[i]);
      }
      out += '\n';
    }
    if (columns[0].empty()) continue;
    const auto aggregate_row = [&](const char* kind, double (*f)(
                                                         const std::vector<double>&)) {
      out += std::string(mode_name(mode)) + ',' + kind + ',';
      for (std::size_t i = 0; i < 4; ++i) out += ',' + format_double(f(columns[i]));
      out += '\n';
    };
    aggregate_row("median", [](const std::vector<double>& v) { return median(v); });
    aggregate_row("iqr", [](const std::vector<double>& v) {
      return interquartile_range(v);
    });
    aggregate_row("mean", [](const std::vector<double>& v) { return mean(v); });
  }
  return out;
}

std::string manifest_json(const std::vector<RunCell>& cells, bool complete) {
  json doc;
  doc["complete"] = complete;
  json runs = json::array();
  for (const RunCell& cell : cells) {
    json entry;
    entry["dir"] = cell.dir_name;
    entry["mode"] = mode_name(cell.mode);
    entry["seed"] = cell.seed;
    entry["status"] = cell.status;
    if (!cell.error.empty()) entry["error"] = cell.error;
    runs.push_back(entry);
  }
  doc["runs"] = runs;
  return doc.dump(2) + "\n";
}

}  // namespace

void run_suite(const ExperimentConfig& config, const std::string& out_dir,
               const SuiteOptions& options) {
  const fs::path root(out_dir);
  fs::create_directories(root);
  write_file(root / "config.json", serialize_config(config));

  std::vector<RunCell> cells;
  for (AugmentationMode mode : config.modes)
    for (std::uint64_t seed : config.seeds) {
      RunCell cell;
      cell.mode = mode;
      cell.seed = seed;
      cell.dir_name = std::string(mode_name(mode)) + "_seed" +
                      std::to_string(seed);
      cells.push_back(cell);
    }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex cells_mutex;

  const auto worker = [&]() {
    while (true) {
      const std::size_t index = next.fetch_add(1);
      if (index >= cells.size() || abort.load()) return;
      RunCell& cell = cells[index];
      const auto started = std::chrono::steady_clock::now();
      try {
        const RunConfig run_config =
            make_run_config(config, cell.mode, cell.seed);
        const RunReport report = run_training(run_config);
        const fs::path run_dir = root / cell.dir_name;
        fs::create_directories(run_dir);
        write_file(run_dir / "metrics.csv", metrics_csv(report));
        write_file(run_dir / "weight_norms.csv", weight_norms_csv(report));
        if (!report.trajectory.empty())
          write_file(run_dir / "trajectory.csv", trajectory_csv(report));
        const auto elapsed = std::chrono::steady_clock::now() - started;
        std::lock_guard<std::mutex> lock(cells_mutex);
        cell.final_accuracy[0] = report.final_test.overall_accuracy;
        for (std::size_t b = 0; b < 3; ++b)
          cell.final_accuracy[b + 1] =
              b < report.final_test.bin_accuracy.size()
                  ? report.final_test.bin_accuracy[b]
                  : 0.0;
        cell.seconds = std::chrono::duration<double>(elapsed).count();
        cell.status = "ok";
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(cells_mutex);
        cell.status = "failed";
        cell.error = e.what();
        abort.store(true);
        return;
      }
    }
  };

  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  for (RunCell& cell : cells)
    if (cell.status == "pending") cell.status = "skipped";

  const bool complete = std::all_of(
      cells.begin(), cells.end(),
      [](const RunCell& cell) { return cell.status == "ok"; });

  if (options.log) {
    for (const RunCell& cell : cells)
      *options.log << cell.dir_name << ": " << cell.status
                   << (cell.status == "ok"
                           ? " (" + format_double(cell.seconds) + " s)"
                           : cell.error.empty() ? "" : " (" + cell.error + ")")
                   << '\n';
  }

  write_file(root / "manifest.json", manifest_json(cells, complete));
  if (!complete) {
    std::string failed;
    for (const RunCell& cell : cells)
      if (cell.status == "failed") failed = cell.dir_name + ": " + cell.error;
    throw SuiteError("suite aborted, partial results in " + out_dir + " (" +
                     failed + ")");
  }
  write_file(root / "summary.csv", summary_csv(config, cells));
}

namespace {

std::vector<SummaryRunRow> read_summary_runs(const fs::path& dir) {
  std::ifstream in(dir / "summary.csv");
  if (!in)
    throw ConfigError("compare: cannot open " + (dir / "summary.csv").string());
  std::vector<SummaryRunRow> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "mode,kind,seed,overall_acc,tail_acc,mid_acc,head_acc")
        throw ConfigError("compare: unexpected summary header in " +
                          dir.string());
      header_seen = true;
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 7 || fields[1] != "run") continue;
    SummaryRunRow row;
    row.mode = fields[0];
    row.seed = std::stoull(fields[2]);
    for (std::size_t i = 0; i < 4; ++i) row.accuracy[i] = std::stod(fields[3 + i]);
    rows.push_back(row);
  }
  return rows;
}

std::string pick_mode(const std::vector<SummaryRunRow>& rows,
                      const std::optional<std::string>& requested,
                      const std::string& dir) {
  std::vector<std::string> present;
  for (const SummaryRunRow& row : rows)
    if (std::find(present.begin(), present.end(), row.mode) == present.end())
      present.push_back(row.mode);
  if (present.empty()) throw ConfigError("compare: no runs in " + dir);
  if (requested) {
    if (std::find(present.begin(), present.end(), *requested) == present.end())
      throw ConfigError("compare: mode '" + *requested + "' not found in " + dir);
    return *requested;
  }
  if (present.size() > 1)
    throw ConfigError("compare: " + dir +
                      " holds several modes; name one explicitly");
  return present.front();
}

}  // namespace

ComparisonTable compare_suites(const std::string& dir_a,
                               const std::optional<std::string>& mode_a,
                               const std::string& dir_b,
                               const std::optional<std::string>& mode_b) {
  const ExperimentConfig config_a =
      load_config_file((fs::path(dir_a) / "config.json").string());
  const ExperimentConfig config_b =
      load_config_file((fs::path(dir_b) / "config.json").string());
  if (config_a.data.group_thresholds != config_b.data.group_thresholds)
    throw ConfigError("compare: bin definitions differ between suites");

  const auto rows_a = read_summary_runs(dir_a);
  const auto rows_b = read_summary_runs(dir_b);
  ComparisonTable table;
  table.mode_a = pick_mode(rows_a, mode_a, dir_a);
  table.mode_b = pick_mode(rows_b, mode_b, dir_b);

  std::vector<std::pair<const SummaryRunRow*, const SummaryRunRow*>> paired;
  for (const SummaryRunRow& a : rows_a) {
    if (a.mode != table.mode_a) continue;
    for (const SummaryRunRow& b : rows_b)
      if (b.mode == table.mode_b && b.seed == a.seed) {
        paired.emplace_back(&a, &b);
        break;
      }
  }
  if (paired.empty())
    throw ConfigError("compare: the suites share no seeds");
  table.paired_seeds = static_cast<int>(paired.size());

  for (std::size_t i = 0; i < kMetricNames.size(); ++i) {
    ComparisonRow row;
    row.metric = kMetricNames[i];
    std::vector<double> a_values, b_values;
    for (const auto& [a, b] : paired) {
      a_values.push_back(a->accuracy[i]);
      b_values.push_back(b->accuracy[i]);
      if (b->accuracy[i] > a->accuracy[i]) ++row.seeds_b_greater;
      else if (b->accuracy[i] < a->accuracy[i]) ++row.seeds_b_less;
      else ++row.seeds_equal;
    }
    row.median_a = median(a_values);
    row.median_b = median(b_values);
    row.delta = row.median_b - row.median_a;
    table.rows.push_back(row);
  }
  return table;
}

std::string comparison_to_csv(const ComparisonTable& table) {
  std::string out = kCsvBanner;
  out += "metric,median_a,median_b,delta,seeds_b_greater,seeds_equal,seeds_b_less\n";
  for (const ComparisonRow& row : table.rows) {
    out += row.metric + ',' + format_double(row.median_a) + ',' +
           format_double(row.median_b) + ',' + format_double(row.delta) + ',' +
           std::to_string(row.seeds_b_greater) + ',' +
           std::to_string(row.seeds_equal) + ',' +
           std::to_string(row.seeds_b_less) + '\n';
  }
  return out;
}

}  // namespace longtail
