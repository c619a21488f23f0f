#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "longtail/trainer.hpp"

namespace longtail {

// Configuration problems (malformed text, invalid ranges, unknown keys).
// Messages carry the offending key path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A run inside a suite failed; partial results stay on disk.
class SuiteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fully resolved experiment description: data spec, training
// hyperparameters, augmentation and controller settings, the mode/seed grid,
// and the output location. Parsed from versioned JSON with defaults applied
// and unknown keys rejected.
struct ExperimentConfig {
  SyntheticDataSpec data;

  int epochs = 40;
  int batch_size = 64;
  double learning_rate = 0.1;
  double weight_decay = 1e-4;
  double lr_decay_factor = 0.1;
  double lr_decay_fraction = 0.8;

  double momentum = 0.1;
  AugmentationConfig aug;
  int smote_k = 5;

  ControllerConfig controller;

  bool rfs_on_validation = false;
  double rfs_threshold = 1e-3;

  std::vector<AugmentationMode> modes{AugmentationMode::fasa};
  std::vector<std::uint64_t> seeds{0};
  std::string output_dir = "runs";

  bool operator==(const ExperimentConfig&) const = default;
};

const char* mode_name(AugmentationMode mode);
AugmentationMode mode_from_name(const std::string& name);

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

// Per-run trainer config for one (mode, seed) cell of the suite grid.
RunConfig make_run_config(const ExperimentConfig& config, AugmentationMode mode,
                          std::uint64_t seed);

// Shortest round-trip decimal representation; all CSV/JSON numbers go
// through this so outputs are byte-stable.
std::string format_double(double value);

struct SuiteOptions {
  int jobs = 1;
  std::ostream* log = nullptr;  // wall-clock and progress lines; never files
};

// Executes every (mode, seed) run, writing per-run CSVs
// (metrics/weight_norms/trajectory), a suite summary, the config echo and a
// manifest under out_dir. Throws SuiteError if any run fails; completed runs
// and the manifest are still written.
void run_suite(const ExperimentConfig& config, const std::string& out_dir,
               const SuiteOptions& options = {});

struct ComparisonRow {
  std::string metric;  // overall_acc, tail_acc, mid_acc, head_acc
  double median_a = 0.0;
  double median_b = 0.0;
  double delta = 0.0;  // B - A
  int seeds_b_greater = 0;
  int seeds_equal = 0;
  int seeds_b_less = 0;
};

struct ComparisonTable {
  std::string mode_a;
  std::string mode_b;
  int paired_seeds = 0;
  std::vector<ComparisonRow> rows;
};

// Reads two suite directories and compares final test metrics (medians plus
// per-seed sign counts over the seeds both suites share). Bin definitions
// must match. When a directory holds several modes the one to use must be
// named explicitly.
ComparisonTable compare_suites(const std::string& dir_a,
                               const std::optional<std::string>& mode_a,
                               const std::string& dir_b,
                               const std::optional<std::string>& mode_b);

std::string comparison_to_csv(const ComparisonTable& table);

}  // namespace longtail
