#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "longtail/feature_stats.hpp"

namespace longtail {

// Synthetic long-tailed Gaussian mixture. Class centers sit uniformly on the
// radius-R sphere; per-class training counts decay exponentially from
// head_count down to head_count / imbalance_ratio.
struct SyntheticDataSpec {
  int num_classes = 10;
  int dim = 8;
  int head_count = 100;          // samples in the largest class
  double imbalance_ratio = 10.0; // max_c N_c / min_c N_c
  double center_radius = 3.0;
  double within_class_std = 1.0;
  int holdout_per_class = 20;    // balanced val/test size per class
  bool imbalanced_val = false;   // long-tailed validation instead of balanced
  std::vector<int> group_thresholds{10, 100};  // tail/mid/head cutoffs
  std::uint64_t seed = 0;

  bool operator==(const SyntheticDataSpec&) const = default;
};

struct LongTailDataset {
  std::vector<FeatureVector> features;
  std::vector<int> labels;
  std::vector<std::uint64_t> class_counts;
  std::vector<int> group_thresholds;

  std::size_t size() const { return labels.size(); }
  int num_classes() const { return static_cast<int>(class_counts.size()); }
};

struct DatasetSplits {
  LongTailDataset train;
  LongTailDataset val;
  LongTailDataset test;
};

// N_c = round(head_count * rho^(-c / (C-1))). Throws if any count rounds to
// zero.
std::vector<std::uint64_t> long_tail_counts(int num_classes, int head_count,
                                            double imbalance_ratio);

// bin index for a training count: 0 (tail) below the first threshold, then
// one bin per threshold; thresholds must be strictly increasing.
int bin_of(std::uint64_t count, const std::vector<int>& thresholds);

// Deterministic given spec.seed. Train follows the long-tailed profile; val
// and test are independent class-balanced holdouts (val optionally follows a
// scaled long-tailed profile when spec.imbalanced_val is set).
DatasetSplits generate_dataset(const SyntheticDataSpec& spec);

// Structured-text export for fixture sharing; versioned, loss-free for
// doubles, byte-stable.
std::string export_dataset(const LongTailDataset& dataset);
LongTailDataset import_dataset(const std::string& text);

}  // namespace longtail
