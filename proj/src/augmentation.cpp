#include "longtail/augmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace longtail {

namespace {

double cosine_distance(const std::vector<double>& a,
                       const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  if (na == 0.0 || nb == 0.0) return 1.0;  // zero vectors carry no direction
  return 1.0 - dot / std::sqrt(na * nb);
}

}  // namespace

VirtualFeature generate_virtual(const ClassStatistics& stats,
                                const std::vector<double>& noise) {
  if (!stats.initialized)
    throw std::invalid_argument(
        "generate_virtual: class " + std::to_string(stats.class_id) +
        " has no observed statistics");
  if (noise.size() != stats.mean.size())
    throw std::invalid_argument("generate_virtual: noise dimension mismatch");

  VirtualFeature feature;
  feature.class_id = stats.class_id;
  feature.values.resize(stats.mean.size());
  for (std::size_t k = 0; k < stats.mean.size(); ++k)
    feature.values[k] = stats.mean[k] + stats.stddev[k] * noise[k];
  return feature;
}

std::vector<VirtualFeature> draw_virtual_batch(const StatisticsBank& bank,
                                               const std::vector<double>& probs,
                                               const AugmentationConfig& config,
                                               Rng& rng) {
  if (static_cast<int>(probs.size()) != bank.num_classes())
    throw std::invalid_argument(
        "draw_virtual_batch: probabilities do not cover all classes");
  if (config.virt_per_success < 1)
    throw std::invalid_argument("draw_virtual_batch: virt_per_success < 1");

  const int cap = config.max_virtual_per_iter > 0 ? config.max_virtual_per_iter
                                                  : 4 * bank.num_classes();
  if (cap < config.virt_per_success)
    throw std::invalid_argument(
        "draw_virtual_batch: budget cap below virt_per_success");

  std::vector<VirtualFeature> batch;
  std::vector<double> noise(bank.dim());
  for (int c = 0; c < bank.num_classes(); ++c) {
    const ClassStatistics& stats = bank.statistics(c);
    if (!stats.initialized || probs[c] <= 0.0) continue;
    if (!rng.bernoulli(probs[c])) continue;
    for (int i = 0; i < config.virt_per_success; ++i) {
      for (double& n : noise) n = rng.normal();
      batch.push_back(generate_virtual(stats, noise));
    }
  }
  if (static_cast<int>(batch.size()) > cap) batch.resize(cap);
  return batch;
}

std::vector<double> smote_interpolate(const std::vector<double>& anchor,
                                      const std::vector<double>& neighbor,
                                      double lambda) {
  if (anchor.size() != neighbor.size())
    throw std::invalid_argument("smote_interpolate: dimension mismatch");
  std::vector<double> out(anchor.size());
  for (std::size_t k = 0; k < anchor.size(); ++k)
    out[k] = lambda * anchor[k] + (1.0 - lambda) * neighbor[k];
  return out;
}

VirtualFeature smote_generate(const std::vector<FeatureVector>& class_pool,
                              int class_id, int k, Rng& rng) {
  if (class_pool.size() < 2)
    throw std::invalid_argument(
        "smote_generate: need at least two features, class " +
        std::to_string(class_id) + " has " +
        std::to_string(class_pool.size()));
  if (k < 1) throw std::invalid_argument("smote_generate: k must be >= 1");

  const std::size_t anchor_idx = rng.uniform_index(class_pool.size());
  const std::vector<double>& anchor = class_pool[anchor_idx];

  // brute-force k nearest by cosine distance, anchor excluded
  std::vector<std::size_t> others;
  others.reserve(class_pool.size() - 1);
  for (std::size_t i = 0; i < class_pool.size(); ++i)
    if (i != anchor_idx) others.push_back(i);
  std::stable_sort(others.begin(), others.end(),
                   [&](std::size_t a, std::size_t b) {
                     return cosine_distance(anchor, class_pool[a]) <
                            cosine_distance(anchor, class_pool[b]);
                   });
  const std::size_t num_neighbors =
      std::min<std::size_t>(static_cast<std::size_t>(k), others.size());
  const std::size_t neighbor_idx = others[rng.uniform_index(num_neighbors)];

  const double lambda = rng.uniform_open0();  // (0, 1]
  VirtualFeature feature;
  feature.class_id = class_id;
  feature.values = smote_interpolate(anchor, class_pool[neighbor_idx], lambda);
  return feature;
}

}  // namespace longtail
