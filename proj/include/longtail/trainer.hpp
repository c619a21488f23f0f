#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "longtail/augmentation.hpp"
#include "longtail/classifier.hpp"
#include "longtail/dataset.hpp"
#include "longtail/feature_stats.hpp"
#include "longtail/rng.hpp"
#include "longtail/sampling.hpp"

namespace longtail {

enum class AugmentationMode { none, fasa, smote };

struct ControllerConfig {
  double alpha = 1.1;
  double beta = 0.9;
  InitMode init_mode = InitMode::inverse_frequency;
  double init_scale = 1.0;
  AdaptationMode adaptation_mode = AdaptationMode::group_wise;
  SignalMode signal = SignalMode::validation_loss;
  // When set, sampling stays fixed at the initial distribution with this
  // scale (the static-s ablation); no epoch adjustments happen.
  std::optional<double> static_scale;
  // Clustering radius; unset derives 0.5 * median pairwise Fisher distance.
  std::optional<double> cluster_epsilon;
  int cluster_min_pts = 2;
  int recluster_every = 1;  // epochs between grouping refreshes

  bool operator==(const ControllerConfig&) const = default;
};

struct TrainEpochOptions {
  double learning_rate = 0.1;
  int batch_size = 64;
  AugmentationMode mode = AugmentationMode::none;
  AugmentationConfig aug;
  int smote_k = 5;
};

struct EpochTrainStats {
  int iterations = 0;
  std::vector<std::uint64_t> virtual_per_class;
};

// One pass over seeded-shuffled mini-batches. Per iteration: real features
// update the statistics bank (fasa), a virtual batch is drawn, and one SGD
// step runs on the concatenation of real and virtual samples with equal
// weight. Mode none touches neither the bank nor aug_rng, so its parameter
// trajectory is exactly the plain SGD loop's.
EpochTrainStats train_epoch(
    SoftmaxClassifier& clf, const LongTailDataset& train,
    const TrainEpochOptions& options, StatisticsBank* bank,
    const std::vector<double>* sampling_probs,
    const std::vector<std::vector<FeatureVector>>* smote_pools, Rng& order_rng,
    Rng& aug_rng);

struct EvaluationResult {
  double overall_accuracy = 0.0;
  std::vector<double> bin_accuracy;  // indexed by bin_of(); 0 when bin empty
  double mean_per_class_loss = 0.0;  // over classes with samples
  std::vector<std::optional<double>> per_class_loss;
  std::vector<std::optional<double>> per_class_accuracy;
  std::vector<double> weight_norms;
};

// Accuracy and per-class losses over a dataset, optionally over the
// repeat-factor-resampled multiset. Bins come from the training class counts.
EvaluationResult evaluate(const SoftmaxClassifier& clf,
                          const LongTailDataset& data,
                          const std::vector<std::uint64_t>& train_counts,
                          const std::vector<int>& thresholds,
                          const RepeatFactorConfig* rfs = nullptr,
                          Rng* rfs_rng = nullptr);

struct EpochMetrics {
  int epoch = 0;
  double overall_accuracy = 0.0;
  std::vector<double> bin_accuracy;
  double mean_val_loss = 0.0;
  std::vector<double> weight_norms;
};

struct TrajectoryRow {
  int epoch = 0;
  int class_id = 0;
  int group_id = -1;  // -1 when no grouping is active (static sampling)
  double prob = 0.0;
  std::optional<double> group_signal;
};

struct RunConfig {
  SyntheticDataSpec data;  // data.seed is overwritten from `seed`
  int epochs = 40;
  int batch_size = 64;
  double learning_rate = 0.1;
  double weight_decay = 1e-4;
  double lr_decay_factor = 0.1;    // multiplier applied late in training
  double lr_decay_fraction = 0.8;  // fraction of epochs before the drop
  double momentum = 0.1;           // statistics bank momentum
  AugmentationMode mode = AugmentationMode::fasa;
  AugmentationConfig aug;
  int smote_k = 5;
  ControllerConfig controller;
  bool rfs_on_validation = false;
  RepeatFactorConfig rfs;
  std::uint64_t seed = 0;
};

struct RunReport {
  std::vector<EpochMetrics> epochs;       // validation metrics per epoch
  std::vector<TrajectoryRow> trajectory;  // empty in mode none
  EvaluationResult final_test;
  std::vector<std::uint64_t> train_class_counts;
  std::vector<int> group_thresholds;
};

// Full training loop: per epoch train -> evaluate on validation -> adjust
// sampling probabilities (fasa, adaptive) -> log. Ends with one balanced
// test-set evaluation. A pure function of its config.
RunReport run_training(const RunConfig& config);

}  // namespace longtail
