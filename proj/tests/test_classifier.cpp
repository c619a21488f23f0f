#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "longtail/classifier.hpp"
#include "longtail/rng.hpp"

using namespace longtail;

namespace {

std::pair<std::vector<FeatureVector>, std::vector<int>> random_instance(
    Rng& rng, int classes, int dim, int batch) {
  std::vector<FeatureVector> xs(batch, FeatureVector(dim));
  std::vector<int> ys(batch);
  for (int i = 0; i < batch; ++i) {
    ys[i] = static_cast<int>(rng.uniform_index(classes));
    for (double& v : xs[i]) v = rng.uniform_in(-2.0, 2.0);
  }
  return {xs, ys};
}

}  // namespace

TEST_CASE("zero parameters give the uniform-softmax loss") {
  SoftmaxClassifier clf(2, 3);
  const auto out = forward_and_loss(clf, {{1.0, -1.0, 0.5}, {0.0, 2.0, 1.0}},
                                    {0, 1});
  CHECK(out.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  SoftmaxClassifier wide(7, 2);
  const auto single = forward_and_loss(wide, {{0.3, 0.4}}, {4});
  CHECK(single.loss == doctest::Approx(std::log(7.0)).epsilon(1e-12));
}

TEST_CASE("analytic gradients match central finite differences") {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const int classes = 2 + static_cast<int>(rng.uniform_index(4));  // <= 5
    const int dim = 1 + static_cast<int>(rng.uniform_index(8));      // <= 8
    const int batch = 1 + static_cast<int>(rng.uniform_index(6));
    SoftmaxClassifier clf(classes, dim, trial % 2 == 0 ? 0.0 : 0.05);
    for (double& w : clf.weights) w = rng.uniform_in(-1.0, 1.0);
    for (double& b : clf.biases) b = rng.uniform_in(-1.0, 1.0);
    auto [xs, ys] = random_instance(rng, classes, dim, batch);

    const auto analytic = forward_and_loss(clf, xs, ys);
    const double h = 1e-4;
    for (std::size_t j = 0; j < clf.weights.size(); ++j) {
      SoftmaxClassifier plus = clf, minus = clf;
      plus.weights[j] += h;
      minus.weights[j] -= h;
      const double numeric = (forward_and_loss(plus, xs, ys).loss -
                              forward_and_loss(minus, xs, ys).loss) /
                             (2.0 * h);
      const double scale = std::max(1.0, std::abs(numeric));
      CHECK(std::abs(analytic.grad_weights[j] - numeric) < 1e-5 * scale);
    }
    for (std::size_t j = 0; j < clf.biases.size(); ++j) {
      SoftmaxClassifier plus = clf, minus = clf;
      plus.biases[j] += h;
      minus.biases[j] -= h;
      const double numeric = (forward_and_loss(plus, xs, ys).loss -
                              forward_and_loss(minus, xs, ys).loss) /
                             (2.0 * h);
      const double scale = std::max(1.0, std::abs(numeric));
      CHECK(std::abs(analytic.grad_biases[j] - numeric) < 1e-5 * scale);
    }
  }
}

TEST_CASE("duplicating every sample leaves the mean loss unchanged") {
  Rng rng(5);
  SoftmaxClassifier clf(3, 4, 0.01);
  for (double& w : clf.weights) w = rng.uniform_in(-1.0, 1.0);
  auto [xs, ys] = random_instance(rng, 3, 4, 6);

  std::vector<FeatureVector> doubled = xs;
  doubled.insert(doubled.end(), xs.begin(), xs.end());
  std::vector<int> doubled_labels = ys;
  doubled_labels.insert(doubled_labels.end(), ys.begin(), ys.end());

  const double base = forward_and_loss(clf, xs, ys).loss;
  const double twice = forward_and_loss(clf, doubled, doubled_labels).loss;
  CHECK(twice == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("empty batches and bad shapes are rejected") {
  SoftmaxClassifier clf(2, 2);
  CHECK_THROWS_AS(forward_and_loss(clf, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(forward_and_loss(clf, {{1.0}}, {0}), std::invalid_argument);
  CHECK_THROWS_AS(forward_and_loss(clf, {{1.0, 2.0}}, {5}),
                  std::invalid_argument);
}

TEST_CASE("sgd step moves parameters along the negative gradient") {
  SoftmaxClassifier clf(2, 2);
  const auto grads = forward_and_loss(clf, {{1.0, 0.0}}, {0});
  sgd_step(clf, grads, 0.5);
  // class-0 logit must rise for that sample
  CHECK(clf.weight_at(0, 0) > 0.0);
  CHECK(predict(clf, {1.0, 0.0}) == 0);
}

TEST_CASE("weight norms are per-row L2") {
  SoftmaxClassifier clf(2, 2);
  clf.weights = {3.0, 4.0, 0.0, 0.0};
  CHECK(clf.weight_norm(0) == doctest::Approx(5.0));
  CHECK(clf.weight_norm(1) == 0.0);
}
