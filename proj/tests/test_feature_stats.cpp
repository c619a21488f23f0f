#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "longtail/feature_stats.hpp"
#include "longtail/rng.hpp"

using namespace longtail;

namespace {

// Independent scalar replay of the momentum recurrence: blends per-batch
// mean and population std coordinate by coordinate. Kept free of the
// StatisticsBank implementation on purpose.
struct ScalarReplay {
  std::vector<std::vector<double>> mean, stddev;  // [class][coord]
  std::vector<bool> init;
  double m;

  ScalarReplay(int classes, int dim, double momentum)
      : mean(classes, std::vector<double>(dim, 0.0)),
        stddev(classes, std::vector<double>(dim, 0.0)),
        init(classes, false),
        m(momentum) {}

  void feed(const std::vector<FeatureVector>& xs, const std::vector<int>& ys) {
    const int classes = static_cast<int>(mean.size());
    const int dim = static_cast<int>(mean[0].size());
    for (int c = 0; c < classes; ++c) {
      std::vector<const FeatureVector*> members;
      for (std::size_t i = 0; i < ys.size(); ++i)
        if (ys[i] == c) members.push_back(&xs[i]);
      if (members.empty()) continue;
      for (int k = 0; k < dim; ++k) {
        double mu = 0.0;
        for (const auto* x : members) mu += (*x)[k];
        mu /= static_cast<double>(members.size());
        double var = 0.0;
        for (const auto* x : members) var += ((*x)[k] - mu) * ((*x)[k] - mu);
        const double sd = std::sqrt(var / static_cast<double>(members.size()));
        if (!init[c]) {
          mean[c][k] = mu;
          stddev[c][k] = sd;
        } else {
          mean[c][k] = (1.0 - m) * mean[c][k] + m * mu;
          if (members.size() >= 2)
            stddev[c][k] = (1.0 - m) * stddev[c][k] + m * sd;
        }
      }
      init[c] = true;
    }
  }
};

std::pair<std::vector<FeatureVector>, std::vector<int>> random_batch(
    Rng& rng, int classes, int dim, int size) {
  std::vector<FeatureVector> xs(size, FeatureVector(dim));
  std::vector<int> ys(size);
  for (int i = 0; i < size; ++i) {
    ys[i] = static_cast<int>(rng.uniform_index(classes));
    for (double& v : xs[i]) v = rng.uniform_in(-5.0, 5.0);
  }
  return {xs, ys};
}

}  // namespace

TEST_CASE("first observation sets statistics directly") {
  StatisticsBank bank(2, 2, 0.1);
  bank.observe_batch({{3.0, 4.0}}, {0});
  const ClassStatistics& s = bank.statistics(0);
  CHECK(s.initialized);
  CHECK(s.mean == std::vector<double>{3.0, 4.0});
  CHECK(s.stddev == std::vector<double>{0.0, 0.0});
  CHECK(s.observation_count == 1);
  CHECK_FALSE(bank.statistics(1).initialized);
  CHECK(bank.statistics(1).observation_count == 0);
}

TEST_CASE("running mean is a fixed point when the batch mean matches") {
  StatisticsBank bank(1, 2, 0.1);
  bank.observe_batch({{1.0, 1.0}}, {0});
  bank.observe_batch({{0.0, 0.0}, {2.0, 2.0}}, {0, 0});  // batch mean [1,1]
  CHECK(bank.statistics(0).mean[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bank.statistics(0).mean[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("hand-evaluated momentum step") {
  // running mean [0,0], std [1,1]; batch {[2,0],[0,2]} has mean [1,1] and
  // population std [1,1]; with m = 0.1 the new state is [0.1,0.1] / [1,1]
  StatisticsBank bank(1, 2, 0.1);
  bank.observe_batch({{-1.0, -1.0}, {1.0, 1.0}}, {0, 0});  // mean 0, std 1
  REQUIRE(bank.statistics(0).mean[0] == doctest::Approx(0.0));
  REQUIRE(bank.statistics(0).stddev[0] == doctest::Approx(1.0));
  bank.observe_batch({{2.0, 0.0}, {0.0, 2.0}}, {0, 0});
  for (int k = 0; k < 2; ++k) {
    CHECK(bank.statistics(0).mean[k] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(bank.statistics(0).stddev[k] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("singleton batches skip the std blend but move the mean") {
  StatisticsBank bank(1, 1, 0.5);
  bank.observe_batch({{0.0}, {2.0}}, {0, 0});  // mean 1, std 1
  bank.observe_batch({{3.0}}, {0});
  CHECK(bank.statistics(0).mean[0] == doctest::Approx(2.0));  // 0.5*1+0.5*3
  CHECK(bank.statistics(0).stddev[0] == doctest::Approx(1.0));
  CHECK(bank.statistics(0).observation_count == 3);
}

TEST_CASE("observation counts accumulate per class") {
  StatisticsBank bank(3, 2, 0.1);
  for (int call = 0; call < 7; ++call)
    bank.observe_batch({{1.0, 2.0}, {3.0, 4.0}, {0.0, 0.0}}, {1, 1, 2});
  CHECK(bank.statistics(1).observation_count == 14);
  CHECK(bank.statistics(2).observation_count == 7);
  CHECK(bank.statistics(0).observation_count == 0);
}

TEST_CASE("input validation") {
  StatisticsBank bank(2, 2, 0.1);
  CHECK_THROWS_AS(bank.observe_batch({{1.0}}, {0}), std::invalid_argument);
  CHECK_THROWS_AS(bank.observe_batch({{1.0, 2.0}}, {2}), std::invalid_argument);
  CHECK_THROWS_AS(bank.observe_batch({{1.0, 2.0}}, {-1}), std::invalid_argument);
  CHECK_THROWS_AS(bank.observe_batch({{1.0, 2.0}}, {0, 1}),
                  std::invalid_argument);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(bank.observe_batch({{inf, 0.0}}, {0}), std::invalid_argument);
  CHECK_THROWS_AS(bank.statistics(5), std::out_of_range);
  CHECK_THROWS_AS(StatisticsBank(2, 2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(StatisticsBank(2, 2, 1.5), std::invalid_argument);
  // empty batch is a no-op success
  bank.observe_batch({}, {});
  CHECK_FALSE(bank.statistics(0).initialized);
}

TEST_CASE("classes absent from a batch are bitwise unchanged") {
  StatisticsBank bank(3, 4, 0.1);
  Rng rng(7);
  auto [xs, ys] = random_batch(rng, 3, 4, 24);
  bank.observe_batch(xs, ys);

  const ClassStatistics before = bank.statistics(1);
  std::vector<FeatureVector> other;
  std::vector<int> other_labels;
  for (int i = 0; i < 10; ++i) {
    FeatureVector x(4);
    for (double& v : x) v = rng.uniform_in(-3.0, 3.0);
    other.push_back(x);
    other_labels.push_back(i % 2 == 0 ? 0 : 2);  // never class 1
  }
  bank.observe_batch(other, other_labels);
  const ClassStatistics& after = bank.statistics(1);
  CHECK(std::memcmp(before.mean.data(), after.mean.data(),
                    before.mean.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(before.stddev.data(), after.stddev.data(),
                    before.stddev.size() * sizeof(double)) == 0);
  CHECK(before.observation_count == after.observation_count);
}

TEST_CASE("momentum recurrence matches the scalar replay oracle") {
  const int classes = 8, dim = 16, batches = 50;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    StatisticsBank bank(classes, dim, 0.1);
    ScalarReplay oracle(classes, dim, 0.1);
    Rng rng(seed);
    for (int b = 0; b < batches; ++b) {
      auto [xs, ys] = random_batch(rng, classes, dim, 32);
      bank.observe_batch(xs, ys);
      oracle.feed(xs, ys);
    }
    for (int c = 0; c < classes; ++c) {
      REQUIRE(bank.statistics(c).initialized == oracle.init[c]);
      if (!oracle.init[c]) continue;
      for (int k = 0; k < dim; ++k) {
        CHECK(bank.statistics(c).mean[k] ==
              doctest::Approx(oracle.mean[c][k]).epsilon(1e-10));
        CHECK(bank.statistics(c).stddev[k] ==
              doctest::Approx(oracle.stddev[c][k]).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("std stays non-negative under random update sequences") {
  StatisticsBank bank(4, 3, 0.3);
  Rng rng(21);
  for (int b = 0; b < 200; ++b) {
    auto [xs, ys] = random_batch(rng, 4, 3, 1 + static_cast<int>(rng.uniform_index(8)));
    bank.observe_batch(xs, ys);
  }
  for (int c = 0; c < 4; ++c)
    for (double sd : bank.statistics(c).stddev) CHECK(sd >= 0.0);
}

TEST_CASE("batch order changes the result") {
  std::vector<FeatureVector> a{{0.0}}, b{{10.0}};
  StatisticsBank forward(1, 1, 0.1), reversed(1, 1, 0.1);
  forward.observe_batch(a, {0});
  forward.observe_batch(b, {0});
  reversed.observe_batch(b, {0});
  reversed.observe_batch(a, {0});
  CHECK(forward.statistics(0).mean[0] != reversed.statistics(0).mean[0]);
}

TEST_CASE("snapshot round-trips and is byte-stable") {
  StatisticsBank bank(3, 2, 0.1);
  Rng rng(5);
  for (int b = 0; b < 4; ++b) {
    auto [xs, ys] = random_batch(rng, 3, 2, 10);
    bank.observe_batch(xs, ys);
  }
  const std::string snap = bank.snapshot();
  CHECK(snap == bank.snapshot());  // no intervening writes

  const StatisticsBank restored = StatisticsBank::restore(snap);
  CHECK(restored.num_classes() == 3);
  CHECK(restored.dim() == 2);
  CHECK(restored.momentum() == bank.momentum());
  for (int c = 0; c < 3; ++c) {
    CHECK(restored.statistics(c).mean == bank.statistics(c).mean);
    CHECK(restored.statistics(c).stddev == bank.statistics(c).stddev);
    CHECK(restored.statistics(c).observation_count ==
          bank.statistics(c).observation_count);
    CHECK(restored.statistics(c).initialized == bank.statistics(c).initialized);
  }
  CHECK(restored.snapshot() == snap);
}

TEST_CASE("snapshot equals a replay of the same call sequence") {
  const int classes = 5, dim = 3;
  StatisticsBank live(classes, dim, 0.1);
  std::vector<std::pair<std::vector<FeatureVector>, std::vector<int>>> log;
  Rng rng(11);
  for (int b = 0; b < 30; ++b) {
    auto batch = random_batch(rng, classes, dim, 12);
    log.push_back(batch);
    live.observe_batch(batch.first, batch.second);
  }
  StatisticsBank replayed(classes, dim, 0.1);
  for (const auto& [xs, ys] : log) replayed.observe_batch(xs, ys);
  CHECK(replayed.snapshot() == live.snapshot());
}
