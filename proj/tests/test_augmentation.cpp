#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "longtail/augmentation.hpp"
#include "longtail/feature_stats.hpp"
#include "longtail/rng.hpp"

using namespace longtail;

namespace {

ClassStatistics make_stats(int id, std::vector<double> mean,
                           std::vector<double> stddev) {
  ClassStatistics s;
  s.class_id = id;
  s.mean = std::move(mean);
  s.stddev = std::move(stddev);
  s.initialized = true;
  s.observation_count = 1;
  return s;
}

StatisticsBank bank_with(const std::vector<ClassStatistics>& all, int dim) {
  StatisticsBank bank(static_cast<int>(all.size()), dim, 0.1);
  for (const ClassStatistics& s : all) {
    if (!s.initialized) continue;
    // one-sample batch pins the mean; repeated pairs would disturb std, so
    // seed through a crafted two-sample batch reproducing mean/std exactly
    std::vector<FeatureVector> pair(2, FeatureVector(dim));
    for (int k = 0; k < dim; ++k) {
      pair[0][k] = s.mean[k] - s.stddev[k];
      pair[1][k] = s.mean[k] + s.stddev[k];
    }
    bank.observe_batch(pair, {s.class_id, s.class_id});
  }
  return bank;
}

}  // namespace

TEST_CASE("zero std collapses generation onto the mean") {
  const auto stats = make_stats(0, {1.0, -2.0, 5.0}, {0.0, 0.0, 0.0});
  const auto out = generate_virtual(stats, {3.7, -1.2, 100.0});
  CHECK(out.values == std::vector<double>{1.0, -2.0, 5.0});
  CHECK(out.class_id == 0);
}

TEST_CASE("direct substitution into the perturbation rule") {
  const auto stats = make_stats(1, {1.0, 2.0}, {0.5, 0.5});
  const auto out = generate_virtual(stats, {2.0, -2.0});
  CHECK(out.values[0] == doctest::Approx(2.0));
  CHECK(out.values[1] == doctest::Approx(1.0));
}

TEST_CASE("uninitialized class is rejected") {
  ClassStatistics s;
  s.class_id = 3;
  CHECK_THROWS_AS(generate_virtual(s, {}), std::invalid_argument);
}

TEST_CASE("generated moments approach the prior") {
  const std::vector<double> mu{1.5, -2.0, 0.0, 3.0};
  const std::vector<double> sigma{1.0, 0.5, 0.75, 0.25};
  const auto stats = make_stats(0, mu, sigma);
  Rng rng(42);
  const int n = 20000;
  std::vector<double> sum(4, 0.0), sq(4, 0.0), noise(4);
  for (int i = 0; i < n; ++i) {
    for (double& v : noise) v = rng.normal();
    const auto out = generate_virtual(stats, noise);
    for (int k = 0; k < 4; ++k) {
      sum[k] += out.values[k];
      sq[k] += out.values[k] * out.values[k];
    }
  }
  for (int k = 0; k < 4; ++k) {
    const double m = sum[k] / n;
    const double sd = std::sqrt(sq[k] / n - m * m);
    CHECK(std::abs(m - mu[k]) < 0.05);
    CHECK(std::abs(sd - sigma[k]) < 0.05);
  }
}

TEST_CASE("virtual batch: zero probabilities emit nothing") {
  const auto bank = bank_with({make_stats(0, {0.0}, {1.0}),
                               make_stats(1, {2.0}, {1.0})}, 1);
  Rng rng(1);
  CHECK(draw_virtual_batch(bank, {0.0, 0.0}, {}, rng).empty());
}

TEST_CASE("virtual batch: certain probabilities emit one group per class") {
  const auto bank = bank_with({make_stats(0, {0.0}, {1.0}),
                               make_stats(1, {2.0}, {1.0}),
                               make_stats(2, {4.0}, {1.0})}, 1);
  AugmentationConfig config;
  config.virt_per_success = 2;
  Rng rng(3);
  const auto batch = draw_virtual_batch(bank, {1.0, 1.0, 1.0}, config, rng);
  REQUIRE(batch.size() == 6);
  for (int c = 0; c < 3; ++c) {
    CHECK(batch[2 * c].class_id == c);
    CHECK(batch[2 * c + 1].class_id == c);
  }
}

TEST_CASE("virtual batch: uninitialized classes are skipped") {
  StatisticsBank bank(2, 1, 0.1);
  bank.observe_batch({{1.0}, {3.0}}, {0, 0});  // class 1 never observed
  Rng rng(5);
  const auto batch = draw_virtual_batch(bank, {1.0, 1.0}, {}, rng);
  REQUIRE(batch.size() == 1);
  CHECK(batch[0].class_id == 0);
}

TEST_CASE("virtual batch: success frequency follows the Bernoulli rate") {
  const auto bank = bank_with({make_stats(0, {0.0}, {1.0})}, 1);
  Rng rng(9);
  const int trials = 10000;
  int successes = 0;
  for (int i = 0; i < trials; ++i)
    successes += static_cast<int>(draw_virtual_batch(bank, {0.5}, {}, rng).size());
  const double freq = static_cast<double>(successes) / trials;
  const double se = std::sqrt(0.25 / trials);
  CHECK(std::abs(freq - 0.5) < 3.0 * se);
}

TEST_CASE("virtual batch: budget cap keeps the lowest class ids") {
  std::vector<ClassStatistics> all;
  for (int c = 0; c < 6; ++c) all.push_back(make_stats(c, {double(c)}, {0.0}));
  const auto bank = bank_with(all, 1);
  AugmentationConfig config;
  config.max_virtual_per_iter = 4;
  Rng rng(2);
  const auto batch =
      draw_virtual_batch(bank, std::vector<double>(6, 1.0), config, rng);
  REQUIRE(batch.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(batch[i].class_id == i);
}

TEST_CASE("virtual batch: identical seeds give identical batches") {
  const auto bank = bank_with({make_stats(0, {0.0, 1.0}, {1.0, 2.0}),
                               make_stats(1, {5.0, -1.0}, {0.5, 0.1})}, 2);
  const std::vector<double> probs{0.7, 0.4};
  Rng rng_a(77), rng_b(77);
  for (int iter = 0; iter < 20; ++iter) {
    const auto a = draw_virtual_batch(bank, probs, {}, rng_a);
    const auto b = draw_virtual_batch(bank, probs, {}, rng_b);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].class_id == b[i].class_id);
      CHECK(a[i].values == b[i].values);
    }
  }
}

TEST_CASE("generated coordinates are uncorrelated") {
  const auto stats = make_stats(0, {0.0, 0.0, 0.0}, {1.0, 2.0, 0.5});
  Rng rng(13);
  const int n = 20000;
  std::vector<double> noise(3), mean(3, 0.0);
  std::vector<std::vector<double>> samples;
  samples.reserve(n);
  for (int i = 0; i < n; ++i) {
    for (double& v : noise) v = rng.normal();
    samples.push_back(generate_virtual(stats, noise).values);
    for (int k = 0; k < 3; ++k) mean[k] += samples.back()[k];
  }
  for (double& m : mean) m /= n;
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      double cov = 0.0;
      for (const auto& s : samples) cov += (s[a] - mean[a]) * (s[b] - mean[b]);
      cov /= n;
      CHECK(std::abs(cov) < 0.05);
    }
}

TEST_CASE("interpolation endpoints and midpoint") {
  CHECK(smote_interpolate({0.0, 0.0}, {2.0, 2.0}, 1.0) ==
        std::vector<double>{0.0, 0.0});
  CHECK(smote_interpolate({0.0, 0.0}, {2.0, 2.0}, 0.5) ==
        std::vector<double>{1.0, 1.0});
}

TEST_CASE("smote rejects pools with fewer than two features") {
  Rng rng(4);
  CHECK_THROWS_AS(smote_generate({{1.0, 2.0}}, 0, 5, rng),
                  std::invalid_argument);
}

TEST_CASE("smote output lies on a segment between two pool points") {
  const std::vector<FeatureVector> pool{
      {1.0, 0.0}, {0.8, 0.6}, {0.0, 1.0}, {-1.0, 0.2}, {0.5, -0.5}};
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto out = smote_generate(pool, 7, 3, rng);
    CHECK(out.class_id == 7);
    bool on_some_segment = false;
    for (std::size_t i = 0; i < pool.size() && !on_some_segment; ++i) {
      for (std::size_t j = 0; j < pool.size() && !on_some_segment; ++j) {
        if (i == j) continue;
        // solve out = lambda*p_i + (1-lambda)*p_j coordinate-wise
        double lambda = 0.0;
        bool found = false;
        bool consistent = true;
        for (std::size_t k = 0; k < 2; ++k) {
          const double denom = pool[i][k] - pool[j][k];
          const double offset = out.values[k] - pool[j][k];
          if (std::abs(denom) < 1e-12) {
            if (std::abs(offset) > 1e-9) consistent = false;
            continue;
          }
          const double l = offset / denom;
          if (found && std::abs(l - lambda) > 1e-9) consistent = false;
          lambda = l;
          found = true;
        }
        if (consistent && found && lambda > 0.0 && lambda <= 1.0 + 1e-12)
          on_some_segment = true;
      }
    }
    CHECK(on_some_segment);
  }
}

TEST_CASE("smote neighbor choice respects cosine proximity") {
  // anchor directions: with k = 1 every interpolation partner must be the
  // closest-by-angle pool member, so all outputs stay inside the convex hull
  // of adjacent-direction pairs
  const std::vector<FeatureVector> pool{{1.0, 0.0}, {0.9, 0.1}, {-1.0, 0.0}};
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto out = smote_generate(pool, 0, 1, rng);
    // pairs (0,1) and (1,0) are mutual nearest by cosine; anchor 2's nearest
    // is 1. No segment touches the first quadrant's negative-x region except
    // via anchor 2, whose partner is always 1.
    if (out.values[0] < 0.0) {
      // must come from anchor 2 toward 1: x in [-1, 0.9]
      CHECK(out.values[1] >= -1e-12);
      CHECK(out.values[1] <= 0.1 + 1e-12);
    }
  }
}

TEST_CASE("drawing virtual batches never mutates the bank") {
  auto bank = bank_with({make_stats(0, {1.0}, {0.5}),
                         make_stats(1, {-2.0}, {1.5})}, 1);
  const std::string before = bank.snapshot();
  Rng rng(6);
  for (int iter = 0; iter < 50; ++iter)
    draw_virtual_batch(bank, {0.8, 0.8}, {}, rng);
  CHECK(bank.snapshot() == before);
}
