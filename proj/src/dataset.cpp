#include "longtail/dataset.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "longtail/rng.hpp"

namespace longtail {

namespace {

constexpr int kDatasetVersion = 1;

// sub-stream ids under the dataset master seed
enum : std::uint64_t { kCentersStream = 1, kTrainStream, kValStream, kTestStream };

std::vector<FeatureVector> draw_centers(const SyntheticDataSpec& spec,
                                        Rng& rng) {
  std::vector<FeatureVector> centers(spec.num_classes);
  for (auto& center : centers) {
    center.resize(spec.dim);
    double norm = 0.0;
    do {
      norm = 0.0;
      for (double& v : center) {
        v = rng.normal();
        norm += v * v;
      }
      norm = std::sqrt(norm);
    } while (norm == 0.0);
    for (double& v : center) v = v / norm * spec.center_radius;
  }
  return centers;
}

void append_class_samples(LongTailDataset& out, const FeatureVector& center,
                          int class_id, std::uint64_t count, double noise_std,
                          Rng& rng) {
  for (std::uint64_t i = 0; i < count; ++i) {
    FeatureVector x(center.size());
    for (std::size_t k = 0; k < center.size(); ++k)
      x[k] = center[k] + noise_std * rng.normal();
    out.features.push_back(std::move(x));
    out.labels.push_back(class_id);
  }
  out.class_counts[class_id] += count;
}

LongTailDataset make_split(const SyntheticDataSpec& spec,
                           const std::vector<FeatureVector>& centers,
                           const std::vector<std::uint64_t>& counts, Rng& rng) {
  LongTailDataset data;
  data.class_counts.assign(spec.num_classes, 0);
  data.group_thresholds = spec.group_thresholds;
  for (int c = 0; c < spec.num_classes; ++c)
    append_class_samples(data, centers[c], c, counts[c],
                         spec.within_class_std, rng);
  return data;
}

}  // namespace

std::vector<std::uint64_t> long_tail_counts(int num_classes, int head_count,
                                            double imbalance_ratio) {
  if (num_classes <= 0)
    throw std::invalid_argument("long_tail_counts: num_classes must be > 0");
  if (head_count <= 0)
    throw std::invalid_argument("long_tail_counts: head_count must be > 0");
  if (!(imbalance_ratio >= 1.0))
    throw std::invalid_argument("long_tail_counts: imbalance ratio must be >= 1");

  std::vector<std::uint64_t> counts(num_classes);
  for (int c = 0; c < num_classes; ++c) {
    const double exponent =
        num_classes > 1 ? -static_cast<double>(c) / (num_classes - 1) : 0.0;
    const double value = head_count * std::pow(imbalance_ratio, exponent);
    const long long rounded = std::llround(value);
    if (rounded < 1)
      throw std::invalid_argument("long_tail_counts: class " +
                                  std::to_string(c) +
                                  " rounds to zero samples");
    counts[c] = static_cast<std::uint64_t>(rounded);
  }
  return counts;
}

int bin_of(std::uint64_t count, const std::vector<int>& thresholds) {
  for (std::size_t i = 1; i < thresholds.size(); ++i)
    if (thresholds[i] <= thresholds[i - 1])
      throw std::invalid_argument("bin_of: thresholds must be strictly increasing");
  int bin = 0;
  for (int t : thresholds) {
    if (count < static_cast<std::uint64_t>(t)) return bin;
    ++bin;
  }
  return bin;
}

DatasetSplits generate_dataset(const SyntheticDataSpec& spec) {
  if (spec.dim <= 0)
    throw std::invalid_argument("generate_dataset: dim must be > 0");
  if (spec.holdout_per_class <= 0)
    throw std::invalid_argument("generate_dataset: holdout_per_class must be > 0");
  if (!(spec.within_class_std >= 0.0))
    throw std::invalid_argument("generate_dataset: within_class_std must be >= 0");

  const std::vector<std::uint64_t> train_counts =
      long_tail_counts(spec.num_classes, spec.head_count, spec.imbalance_ratio);

  Rng center_rng(derive_seed(spec.seed, kCentersStream));
  const std::vector<FeatureVector> centers = draw_centers(spec, center_rng);

  DatasetSplits splits;
  Rng train_rng(derive_seed(spec.seed, kTrainStream));
  splits.train = make_split(spec, centers, train_counts, train_rng);

  std::vector<std::uint64_t> val_counts(spec.num_classes,
                                        spec.holdout_per_class);
  if (spec.imbalanced_val) {
    val_counts = long_tail_counts(spec.num_classes, spec.holdout_per_class,
                                  spec.imbalance_ratio);
  }
  Rng val_rng(derive_seed(spec.seed, kValStream));
  splits.val = make_split(spec, centers, val_counts, val_rng);

  const std::vector<std::uint64_t> test_counts(spec.num_classes,
                                               spec.holdout_per_class);
  Rng test_rng(derive_seed(spec.seed, kTestStream));
  splits.test = make_split(spec, centers, test_counts, test_rng);
  return splits;
}

std::string export_dataset(const LongTailDataset& dataset) {
  nlohmann::json doc;
  doc["version"] = kDatasetVersion;
  doc["features"] = dataset.features;
  doc["labels"] = dataset.labels;
  doc["class_counts"] = dataset.class_counts;
  doc["group_thresholds"] = dataset.group_thresholds;
  return doc.dump();
}

LongTailDataset import_dataset(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text);
  if (doc.at("version").get<int>() != kDatasetVersion)
    throw std::invalid_argument("import_dataset: unsupported version");
  LongTailDataset dataset;
  dataset.features = doc.at("features").get<std::vector<FeatureVector>>();
  dataset.labels = doc.at("labels").get<std::vector<int>>();
  dataset.class_counts =
      doc.at("class_counts").get<std::vector<std::uint64_t>>();
  dataset.group_thresholds = doc.at("group_thresholds").get<std::vector<int>>();
  if (dataset.features.size() != dataset.labels.size())
    throw std::invalid_argument("import_dataset: feature/label length mismatch");
  return dataset;
}

}  // namespace longtail
