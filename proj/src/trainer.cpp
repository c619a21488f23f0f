#include "longtail/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace longtail {

namespace {

// sub-stream ids under the run master seed
enum : std::uint64_t {
  kDataStream = 0x10,
  kShuffleStream = 0x20,
  kAugStream = 0x30,
  kRfsStreamBase = 0x1000  // + epoch
};

std::vector<std::vector<FeatureVector>> build_class_pools(
    const LongTailDataset& train) {
  std::vector<std::vector<FeatureVector>> pools(train.num_classes());
  for (std::size_t i = 0; i < train.size(); ++i)
    pools[train.labels[i]].push_back(train.features[i]);
  return pools;
}

}  // namespace

EpochTrainStats train_epoch(
    SoftmaxClassifier& clf, const LongTailDataset& train,
    const TrainEpochOptions& options, StatisticsBank* bank,
    const std::vector<double>* sampling_probs,
    const std::vector<std::vector<FeatureVector>>* smote_pools, Rng& order_rng,
    Rng& aug_rng) {
  if (train.size() == 0) throw std::invalid_argument("train_epoch: empty dataset");
  if (options.batch_size < 1)
    throw std::invalid_argument("train_epoch: batch_size must be >= 1");
  const bool augmenting = options.mode != AugmentationMode::none;
  if (options.mode == AugmentationMode::fasa && (!bank || !sampling_probs))
    throw std::invalid_argument("train_epoch: fasa needs a bank and probabilities");
  if (options.mode == AugmentationMode::smote && (!smote_pools || !sampling_probs))
    throw std::invalid_argument("train_epoch: smote needs pools and probabilities");

  EpochTrainStats stats;
  stats.virtual_per_class.assign(train.num_classes(), 0);

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  order_rng.shuffle(order);

  const std::size_t batch_size = static_cast<std::size_t>(options.batch_size);
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t stop = std::min(order.size(), start + batch_size);
    std::vector<FeatureVector> batch;
    std::vector<int> labels;
    batch.reserve(stop - start);
    labels.reserve(stop - start);
    for (std::size_t i = start; i < stop; ++i) {
      batch.push_back(train.features[order[i]]);
      labels.push_back(train.labels[order[i]]);
    }

    if (options.mode == AugmentationMode::fasa)
      bank->observe_batch(batch, labels);

    if (augmenting) {
      const std::vector<double>& probs = *sampling_probs;
      if (options.mode == AugmentationMode::fasa) {
        const std::vector<VirtualFeature> virtuals =
            draw_virtual_batch(*bank, probs, options.aug, aug_rng);
        for (const VirtualFeature& v : virtuals) {
          ++stats.virtual_per_class[v.class_id];
          batch.push_back(v.values);
          labels.push_back(v.class_id);
        }
      } else {  // smote
        const int cap = options.aug.max_virtual_per_iter > 0
                            ? options.aug.max_virtual_per_iter
                            : 4 * train.num_classes();
        int emitted = 0;
        for (int c = 0; c < train.num_classes() && emitted < cap; ++c) {
          if (probs[c] <= 0.0 || (*smote_pools)[c].size() < 2) continue;
          if (!aug_rng.bernoulli(probs[c])) continue;
          for (int i = 0; i < options.aug.virt_per_success && emitted < cap; ++i) {
            VirtualFeature v =
                smote_generate((*smote_pools)[c], c, options.smote_k, aug_rng);
            ++stats.virtual_per_class[c];
            ++emitted;
            batch.push_back(std::move(v.values));
            labels.push_back(c);
          }
        }
      }
    }

    const LossAndGradients grads = forward_and_loss(clf, batch, labels);
    sgd_step(clf, grads, options.learning_rate);
    ++stats.iterations;
  }
  return stats;
}

EvaluationResult evaluate(const SoftmaxClassifier& clf,
                          const LongTailDataset& data,
                          const std::vector<std::uint64_t>& train_counts,
                          const std::vector<int>& thresholds,
                          const RepeatFactorConfig* rfs, Rng* rfs_rng) {
  const int num_classes = clf.num_classes;
  EvaluationResult result;
  result.per_class_loss.assign(num_classes, std::nullopt);
  result.per_class_accuracy.assign(num_classes, std::nullopt);
  result.weight_norms.resize(num_classes);
  for (int c = 0; c < num_classes; ++c)
    result.weight_norms[c] = clf.weight_norm(c);

  std::vector<std::size_t> indices(data.size());
  std::iota(indices.begin(), indices.end(), 0);
  if (rfs != nullptr) {
    if (rfs_rng == nullptr)
      throw std::invalid_argument("evaluate: RFS needs an rng");
    indices = repeat_factor_resample(data.labels, *rfs, *rfs_rng);
  }

  std::vector<double> loss_sum(num_classes, 0.0);
  std::vector<std::uint64_t> hit(num_classes, 0), seen(num_classes, 0);
  for (std::size_t i : indices) {
    const int y = data.labels[i];
    ++seen[y];
    loss_sum[y] += sample_loss(clf, data.features[i], y);
    if (predict(clf, data.features[i]) == y) ++hit[y];
  }

  const int num_bins = static_cast<int>(thresholds.size()) + 1;
  std::vector<std::uint64_t> bin_hit(num_bins, 0), bin_seen(num_bins, 0);
  std::uint64_t total_hit = 0, total_seen = 0;
  double class_loss_total = 0.0;
  int classes_with_loss = 0;
  for (int c = 0; c < num_classes; ++c) {
    if (seen[c] == 0) continue;
    const double n = static_cast<double>(seen[c]);
    result.per_class_loss[c] = loss_sum[c] / n;
    result.per_class_accuracy[c] = static_cast<double>(hit[c]) / n;
    class_loss_total += *result.per_class_loss[c];
    ++classes_with_loss;
    const int bin = bin_of(train_counts[c], thresholds);
    bin_hit[bin] += hit[c];
    bin_seen[bin] += seen[c];
    total_hit += hit[c];
    total_seen += seen[c];
  }

  result.overall_accuracy =
      total_seen > 0 ? static_cast<double>(total_hit) / total_seen : 0.0;
  result.bin_accuracy.resize(num_bins, 0.0);
  for (int b = 0; b < num_bins; ++b)
    if (bin_seen[b] > 0)
      result.bin_accuracy[b] = static_cast<double>(bin_hit[b]) / bin_seen[b];
  result.mean_per_class_loss =
      classes_with_loss > 0 ? class_loss_total / classes_with_loss : 0.0;
  return result;
}

RunReport run_training(const RunConfig& config) {
  if (config.epochs < 1)
    throw std::invalid_argument("run_training: epochs must be >= 1");

  SyntheticDataSpec data_spec = config.data;
  data_spec.seed = derive_seed(config.seed, kDataStream);
  const DatasetSplits splits = generate_dataset(data_spec);
  const std::vector<std::uint64_t>& counts = splits.train.class_counts;
  const int num_classes = data_spec.num_classes;

  SoftmaxClassifier clf(num_classes, data_spec.dim, config.weight_decay);

  const bool is_fasa = config.mode == AugmentationMode::fasa;
  const bool is_smote = config.mode == AugmentationMode::smote;
  const ControllerConfig& ctl = config.controller;
  const bool adaptive = is_fasa && !ctl.static_scale.has_value();

  StatisticsBank bank(num_classes, data_spec.dim, config.momentum);
  std::vector<std::vector<FeatureVector>> smote_pools;
  if (is_smote) smote_pools = build_class_pools(splits.train);

  SamplingState sampling;
  if (is_fasa || is_smote) {
    const double scale = ctl.static_scale.value_or(ctl.init_scale);
    sampling = init_probabilities(counts, scale, ctl.init_mode);
    sampling.alpha = ctl.alpha;
    sampling.beta = ctl.beta;
    sampling.adaptation_mode = ctl.adaptation_mode;
    sampling.signal = ctl.signal;
  }

  Rng order_rng(derive_seed(config.seed, kShuffleStream));
  Rng aug_rng(derive_seed(config.seed, kAugStream));

  TrainEpochOptions epoch_options;
  epoch_options.batch_size = config.batch_size;
  epoch_options.mode = config.mode;
  epoch_options.aug = config.aug;
  epoch_options.smote_k = config.smote_k;

  const int decay_epoch = static_cast<int>(
      std::floor(config.lr_decay_fraction * config.epochs));

  RunReport report;
  report.train_class_counts = counts;
  report.group_thresholds = data_spec.group_thresholds;

  ClassGrouping grouping;
  bool have_grouping = false;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    epoch_options.learning_rate =
        config.learning_rate *
        (epoch >= decay_epoch ? config.lr_decay_factor : 1.0);

    // frozen copy of the sampling distribution for this epoch
    const std::vector<double> probs = sampling.probs;
    train_epoch(clf, splits.train, epoch_options, is_fasa ? &bank : nullptr,
                (is_fasa || is_smote) ? &probs : nullptr,
                is_smote ? &smote_pools : nullptr, order_rng, aug_rng);

    Rng rfs_rng(derive_seed(config.seed, kRfsStreamBase + epoch));
    const EvaluationResult val = evaluate(
        clf, splits.val, counts, data_spec.group_thresholds,
        config.rfs_on_validation ? &config.rfs : nullptr,
        config.rfs_on_validation ? &rfs_rng : nullptr);

    EpochMetrics metrics;
    metrics.epoch = epoch;
    metrics.overall_accuracy = val.overall_accuracy;
    metrics.bin_accuracy = val.bin_accuracy;
    metrics.mean_val_loss = val.mean_per_class_loss;
    metrics.weight_norms = val.weight_norms;
    report.epochs.push_back(std::move(metrics));

    std::vector<std::optional<double>> signals;
    if (adaptive) {
      if (ctl.adaptation_mode == AdaptationMode::class_wise) {
        if (!have_grouping) {
          grouping = singleton_grouping(num_classes);
          have_grouping = true;
        }
      } else if (!have_grouping || epoch % std::max(1, ctl.recluster_every) == 0) {
        const double epsilon =
            ctl.cluster_epsilon.value_or(default_cluster_epsilon(bank));
        grouping = cluster_classes(bank, epsilon, ctl.cluster_min_pts);
        have_grouping = true;
      }
      const auto& per_class = ctl.signal == SignalMode::validation_loss
                                  ? val.per_class_loss
                                  : val.per_class_accuracy;
      signals = group_signal(per_class, grouping);
      adjust_probabilities(sampling, grouping, signals);
    }

    if (is_fasa || is_smote) {
      for (int c = 0; c < num_classes; ++c) {
        TrajectoryRow row;
        row.epoch = epoch;
        row.class_id = c;
        row.prob = sampling.probs[c];
        if (adaptive) {
          row.group_id = grouping.group_of(c);
          if (row.group_id >= 0 &&
              row.group_id < static_cast<int>(signals.size()))
            row.group_signal = signals[row.group_id];
        }
        report.trajectory.push_back(row);
      }
    }
  }

  report.final_test = evaluate(clf, splits.test, counts,
                               data_spec.group_thresholds, nullptr, nullptr);
  return report;
}

}  // namespace longtail
