#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace longtail {

using FeatureVector = std::vector<double>;

// Running per-class feature statistics. mean/stddev are per-coordinate and
// only meaningful once `initialized` is set by the first observation.
struct ClassStatistics {
  int class_id = 0;
  std::vector<double> mean;
  std::vector<double> stddev;
  std::uint64_t observation_count = 0;
  bool initialized = false;
};

// Online per-class mean/std, updated from mini-batches with a momentum rule:
// the batch mean and population std of each class present in the batch are
// blended into the running estimates as
//   mean <- (1 - m) * mean + m * batch_mean
//   std  <- (1 - m) * std  + m * batch_std
// The first observation of a class sets the estimates directly. Singleton
// batches (one sample of a class) update the mean but skip the std blend,
// since a one-sample spread estimate is meaningless.
//
// Single writer: observe_batch must be serialized within a run; reads may
// happen concurrently between writes.
class StatisticsBank {
 public:
  StatisticsBank(int num_classes, int dim, double momentum = 0.1);

  // One momentum step per class present in the batch; absent classes are
  // untouched. Throws std::invalid_argument on shape or label errors.
  void observe_batch(const std::vector<FeatureVector>& features,
                     const std::vector<int>& labels);

  const ClassStatistics& statistics(int class_id) const;

  int num_classes() const { return static_cast<int>(per_class_.size()); }
  int dim() const { return dim_; }
  double momentum() const { return momentum_; }

  // Versioned JSON snapshot; byte-stable and lossless for doubles.
  std::string snapshot() const;
  static StatisticsBank restore(const std::string& text);

 private:
  int dim_;
  double momentum_;
  std::vector<ClassStatistics> per_class_;
};

}  // namespace longtail
