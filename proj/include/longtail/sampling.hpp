#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "longtail/feature_stats.hpp"
#include "longtail/rng.hpp"

namespace longtail {

enum class InitMode { inverse_frequency, uniform };
enum class AdaptationMode { group_wise, class_wise };
enum class SignalMode { validation_loss, validation_accuracy };

// Per-class virtual-feature sampling probabilities plus the bookkeeping the
// epoch-wise adjustment needs. probs[c] is the per-iteration Bernoulli
// probability of emitting virtual features for class c, always kept in [0,1].
struct SamplingState {
  std::vector<double> probs;
  double init_scale = 1.0;
  double alpha = 1.1;
  double beta = 0.9;
  AdaptationMode adaptation_mode = AdaptationMode::group_wise;
  SignalMode signal = SignalMode::validation_loss;
  // Signal recorded at the previous adjustment, indexed by group id
  // (class id in class_wise mode). Empty slots mean "no baseline yet".
  std::vector<std::optional<double>> prev_signal;
};

// Partition of class ids into super-groups. Groups are disjoint, cover all
// classes, and are ordered by their smallest member id.
struct ClassGrouping {
  std::vector<std::vector<int>> groups;
  double epsilon = 0.0;
  int min_pts = 0;

  int num_groups() const { return static_cast<int>(groups.size()); }
  // group id containing class_id; -1 if absent (never for a valid partition)
  int group_of(int class_id) const;
};

struct RepeatFactorConfig {
  double threshold = 1e-3;  // t in r_c = max(1, sqrt(t / f_c))
};

// probs[c] = clamp(scale * (1/N_c) / sum_j (1/N_j), 0, 1) in inverse-frequency
// mode, clamp(scale / C, 0, 1) in uniform mode. Throws if any count is zero.
SamplingState init_probabilities(const std::vector<std::uint64_t>& class_counts,
                                 double init_scale, InitMode mode);

// Fisher's-ratio distance between two class distributions:
// sum_k (mean_a[k] - mean_b[k])^2 / (std_a[k]^2 + std_b[k]^2 + eps).
// Symmetric, zero iff the means coincide; eps floors the denominator so
// zero-variance classes stay finite.
double fisher_distance(const ClassStatistics& a, const ClassStatistics& b,
                       double eps = 1e-8);

// Density-based clustering (DBSCAN) of classes under the Fisher's-ratio
// distance. A class is a core point when at least min_pts classes (itself
// included) lie within epsilon of it. Clusters are the connected components
// of core points; non-core classes within epsilon of a core join the
// earliest-formed such cluster; everything else (noise and classes whose
// statistics are not yet initialized) becomes a singleton group. Fully
// deterministic: cluster formation scans class ids in ascending order.
ClassGrouping cluster_classes(const StatisticsBank& bank, double epsilon,
                              int min_pts);

// 0.5 * median pairwise Fisher distance over initialized classes; the
// scale-free default radius for cluster_classes. Zero when fewer than two
// classes are initialized.
double default_cluster_epsilon(const StatisticsBank& bank);

// The trivial partition {{0}, {1}, ...}; class-wise adaptation uses it.
ClassGrouping singleton_grouping(int num_classes);

// r_c = max(1, sqrt(threshold / frequency)).
double repeat_factor(double frequency, double threshold);

// Repeat-factor resampling: sample i of class c appears floor(r_c) times plus
// once more with probability frac(r_c). Indices are emitted in input order,
// repeats adjacent. Deterministic given the rng seed.
std::vector<std::size_t> repeat_factor_resample(const std::vector<int>& labels,
                                                const RepeatFactorConfig& config,
                                                Rng& rng);

// Mean per-group signal over the member classes that have one; groups where
// every member is missing a signal yield nullopt and are skipped later.
std::vector<std::optional<double>> group_signal(
    const std::vector<std::optional<double>>& per_class_signal,
    const ClassGrouping& grouping);

// Multiplicative epoch adjustment. For each group with both a current and a
// stored previous signal: improvement (loss strictly down, or accuracy
// strictly up) scales every member's p by alpha clamped at 1, anything else
// (ties included) scales by beta clamped at 0. Groups missing either signal
// leave their classes untouched. Present current signals become the new
// baseline. The first call therefore only records baselines.
void adjust_probabilities(SamplingState& state, const ClassGrouping& grouping,
                          const std::vector<std::optional<double>>& current);

}  // namespace longtail
