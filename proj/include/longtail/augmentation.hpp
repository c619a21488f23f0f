#pragma once

#include <vector>

#include "longtail/feature_stats.hpp"
#include "longtail/rng.hpp"

namespace longtail {

struct VirtualFeature {
  int class_id = 0;
  std::vector<double> values;
};

struct AugmentationConfig {
  int virt_per_success = 1;      // virtual features per Bernoulli success
  int max_virtual_per_iter = 0;  // 0 = default budget of 4 * num_classes

  bool operator==(const AugmentationConfig&) const = default;
};

// values[k] = mean[k] + std[k] * noise[k]; the class's Gaussian prior
// perturbed by the supplied noise vector. Deterministic given the noise.
VirtualFeature generate_virtual(const ClassStatistics& stats,
                                const std::vector<double>& noise);

// Assemble one iteration's virtual batch: per class in ascending id order,
// draw a Bernoulli with the class's sampling probability; on success emit
// virt_per_success features with fresh standard-normal noise. The result is
// truncated at the budget cap, keeping lower class ids. Classes that are
// uninitialized or have zero probability emit nothing and consume no
// randomness.
std::vector<VirtualFeature> draw_virtual_batch(const StatisticsBank& bank,
                                               const std::vector<double>& probs,
                                               const AugmentationConfig& config,
                                               Rng& rng);

// One SMOTE interpolation step: lambda * anchor + (1 - lambda) * neighbor.
std::vector<double> smote_interpolate(const std::vector<double>& anchor,
                                      const std::vector<double>& neighbor,
                                      double lambda);

// SMOTE baseline: pick a random anchor from the class pool, pick uniformly
// among its k nearest neighbors under cosine distance, and return the convex
// combination with lambda in (0, 1]. Needs at least two pool features.
VirtualFeature smote_generate(const std::vector<FeatureVector>& class_pool,
                              int class_id, int k, Rng& rng);

}  // namespace longtail
