#include "longtail/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace longtail {

namespace {

// logits -> in-place softmax probabilities; returns logsumexp for the loss
double softmax_inplace(std::vector<double>& logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& z : logits) {
    z = std::exp(z - peak);
    sum += z;
  }
  for (double& z : logits) z /= sum;
  return peak + std::log(sum);
}

void compute_logits(const SoftmaxClassifier& clf, const FeatureVector& x,
                    std::vector<double>& logits) {
  for (int c = 0; c < clf.num_classes; ++c) {
    double z = clf.biases[c];
    const double* row = clf.weights.data() + c * clf.dim;
    for (int k = 0; k < clf.dim; ++k) z += row[k] * x[k];
    logits[c] = z;
  }
}

}  // namespace

SoftmaxClassifier::SoftmaxClassifier(int num_classes, int dim,
                                     double weight_decay)
    : num_classes(num_classes),
      dim(dim),
      weights(static_cast<std::size_t>(num_classes) * dim, 0.0),
      biases(num_classes, 0.0),
      weight_decay(weight_decay) {
  if (num_classes <= 0 || dim <= 0)
    throw std::invalid_argument("SoftmaxClassifier: bad shape");
}

double SoftmaxClassifier::weight_norm(int c) const {
  double sum = 0.0;
  for (int k = 0; k < dim; ++k) sum += weight_at(c, k) * weight_at(c, k);
  return std::sqrt(sum);
}

LossAndGradients forward_and_loss(const SoftmaxClassifier& clf,
                                  const std::vector<FeatureVector>& features,
                                  const std::vector<int>& labels) {
  if (features.empty())
    throw std::invalid_argument("forward_and_loss: empty batch");
  if (features.size() != labels.size())
    throw std::invalid_argument("forward_and_loss: feature/label mismatch");

  LossAndGradients out;
  out.grad_weights.assign(clf.weights.size(), 0.0);
  out.grad_biases.assign(clf.biases.size(), 0.0);

  const double inv_batch = 1.0 / static_cast<double>(features.size());
  std::vector<double> probs(clf.num_classes);
  for (std::size_t i = 0; i < features.size(); ++i) {
    const FeatureVector& x = features[i];
    const int y = labels[i];
    if (static_cast<int>(x.size()) != clf.dim)
      throw std::invalid_argument("forward_and_loss: feature dim mismatch");
    if (y < 0 || y >= clf.num_classes)
      throw std::invalid_argument("forward_and_loss: label out of range");

    compute_logits(clf, x, probs);
    const double logit_y = probs[y];
    const double logsumexp = softmax_inplace(probs);
    out.loss += (logsumexp - logit_y) * inv_batch;

    for (int c = 0; c < clf.num_classes; ++c) {
      const double residual = (probs[c] - (c == y ? 1.0 : 0.0)) * inv_batch;
      out.grad_biases[c] += residual;
      double* grad_row = out.grad_weights.data() + c * clf.dim;
      for (int k = 0; k < clf.dim; ++k) grad_row[k] += residual * x[k];
    }
  }

  if (clf.weight_decay > 0.0) {
    double sq = 0.0;
    for (std::size_t j = 0; j < clf.weights.size(); ++j) {
      sq += clf.weights[j] * clf.weights[j];
      out.grad_weights[j] += clf.weight_decay * clf.weights[j];
    }
    out.loss += 0.5 * clf.weight_decay * sq;
  }
  return out;
}

double sample_loss(const SoftmaxClassifier& clf, const FeatureVector& x,
                   int y) {
  std::vector<double> logits(clf.num_classes);
  compute_logits(clf, x, logits);
  const double logit_y = logits[y];
  const double logsumexp = softmax_inplace(logits);
  return logsumexp - logit_y;
}

int predict(const SoftmaxClassifier& clf, const FeatureVector& x) {
  std::vector<double> logits(clf.num_classes);
  compute_logits(clf, x, logits);
  // lowest class id wins ties
  return static_cast<int>(
      std::max_element(logits.begin(), logits.end()) - logits.begin());
}

void sgd_step(SoftmaxClassifier& clf, const LossAndGradients& grads,
              double learning_rate) {
  for (std::size_t j = 0; j < clf.weights.size(); ++j)
    clf.weights[j] -= learning_rate * grads.grad_weights[j];
  for (std::size_t j = 0; j < clf.biases.size(); ++j)
    clf.biases[j] -= learning_rate * grads.grad_biases[j];
}

}  // namespace longtail
