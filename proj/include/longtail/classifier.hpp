#pragma once

#include <vector>

#include "longtail/feature_stats.hpp"

namespace longtail {

// Linear softmax classifier, the classification head the augmentation and
// sampling machinery feeds. Weights are row-major C x d.
struct SoftmaxClassifier {
  int num_classes = 0;
  int dim = 0;
  std::vector<double> weights;  // num_classes * dim
  std::vector<double> biases;   // num_classes
  double weight_decay = 0.0;

  SoftmaxClassifier() = default;
  SoftmaxClassifier(int num_classes, int dim, double weight_decay = 0.0);

  double weight_at(int c, int k) const { return weights[c * dim + k]; }
  // L2 norm of class c's weight row.
  double weight_norm(int c) const;
};

struct LossAndGradients {
  double loss = 0.0;
  std::vector<double> grad_weights;
  std::vector<double> grad_biases;
};

// Mean softmax cross-entropy over the batch plus 0.5 * weight_decay * |W|^2,
// with exact analytic gradients. Throws on an empty batch or shape mismatch.
LossAndGradients forward_and_loss(const SoftmaxClassifier& clf,
                                  const std::vector<FeatureVector>& features,
                                  const std::vector<int>& labels);

// Cross-entropy of a single sample, no decay term; evaluation helper.
double sample_loss(const SoftmaxClassifier& clf, const FeatureVector& x, int y);

int predict(const SoftmaxClassifier& clf, const FeatureVector& x);

void sgd_step(SoftmaxClassifier& clf, const LossAndGradients& grads,
              double learning_rate);

}  // namespace longtail
