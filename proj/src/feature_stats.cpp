#include "longtail/feature_stats.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace longtail {

namespace {

constexpr int kSnapshotVersion = 1;

}  // namespace

StatisticsBank::StatisticsBank(int num_classes, int dim, double momentum)
    : dim_(dim), momentum_(momentum) {
  if (num_classes <= 0)
    throw std::invalid_argument("StatisticsBank: num_classes must be > 0");
  if (dim <= 0) throw std::invalid_argument("StatisticsBank: dim must be > 0");
  if (!(momentum > 0.0) || momentum > 1.0)
    throw std::invalid_argument("StatisticsBank: momentum must be in (0, 1]");
  per_class_.resize(num_classes);
  for (int c = 0; c < num_classes; ++c) per_class_[c].class_id = c;
}

void StatisticsBank::observe_batch(const std::vector<FeatureVector>& features,
                                   const std::vector<int>& labels) {
  if (features.size() != labels.size())
    throw std::invalid_argument(
        "observe_batch: features and labels differ in length (" +
        std::to_string(features.size()) + " vs " +
        std::to_string(labels.size()) + ")");
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (static_cast<int>(features[i].size()) != dim_)
      throw std::invalid_argument(
          "observe_batch: feature " + std::to_string(i) + " has dimension " +
          std::to_string(features[i].size()) + ", bank expects " +
          std::to_string(dim_));
    if (labels[i] < 0 || labels[i] >= num_classes())
      throw std::invalid_argument("observe_batch: label " +
                                  std::to_string(labels[i]) +
                                  " out of range [0, " +
                                  std::to_string(num_classes()) + ")");
    for (double v : features[i])
      if (!std::isfinite(v))
        throw std::invalid_argument("observe_batch: non-finite feature entry");
  }
  if (features.empty()) return;

  std::vector<std::vector<std::size_t>> by_class(num_classes());
  for (std::size_t i = 0; i < labels.size(); ++i)
    by_class[labels[i]].push_back(i);

  for (int c = 0; c < num_classes(); ++c) {
    const auto& idx = by_class[c];
    if (idx.empty()) continue;
    const double n = static_cast<double>(idx.size());

    std::vector<double> batch_mean(dim_, 0.0);
    for (std::size_t i : idx)
      for (int k = 0; k < dim_; ++k) batch_mean[k] += features[i][k];
    for (int k = 0; k < dim_; ++k) batch_mean[k] /= n;

    // population std (divide by n)
    std::vector<double> batch_std(dim_, 0.0);
    for (std::size_t i : idx)
      for (int k = 0; k < dim_; ++k) {
        const double diff = features[i][k] - batch_mean[k];
        batch_std[k] += diff * diff;
      }
    for (int k = 0; k < dim_; ++k) batch_std[k] = std::sqrt(batch_std[k] / n);

    ClassStatistics& stats = per_class_[c];
    if (!stats.initialized) {
      stats.mean = batch_mean;
      stats.stddev = batch_std;
      stats.initialized = true;
    } else {
      const double m = momentum_;
      for (int k = 0; k < dim_; ++k)
        stats.mean[k] = (1.0 - m) * stats.mean[k] + m * batch_mean[k];
      if (idx.size() >= 2) {
        for (int k = 0; k < dim_; ++k)
          stats.stddev[k] = (1.0 - m) * stats.stddev[k] + m * batch_std[k];
      }
    }
    stats.observation_count += idx.size();
  }
}

const ClassStatistics& StatisticsBank::statistics(int class_id) const {
  if (class_id < 0 || class_id >= num_classes())
    throw std::out_of_range("statistics: class id " +
                            std::to_string(class_id) + " out of range [0, " +
                            std::to_string(num_classes()) + ")");
  return per_class_[class_id];
}

std::string StatisticsBank::snapshot() const {
  nlohmann::json doc;
  doc["version"] = kSnapshotVersion;
  doc["dim"] = dim_;
  doc["momentum"] = momentum_;
  nlohmann::json classes = nlohmann::json::array();
  for (const ClassStatistics& s : per_class_) {
    nlohmann::json entry;
    entry["id"] = s.class_id;
    entry["mean"] = s.mean;
    entry["std"] = s.stddev;
    entry["count"] = s.observation_count;
    entry["initialized"] = s.initialized;
    classes.push_back(entry);
  }
  doc["classes"] = classes;
  return doc.dump();
}

StatisticsBank StatisticsBank::restore(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text);
  if (doc.at("version").get<int>() != kSnapshotVersion)
    throw std::invalid_argument("snapshot: unsupported version");
  StatisticsBank bank(static_cast<int>(doc.at("classes").size()),
                      doc.at("dim").get<int>(),
                      doc.at("momentum").get<double>());
  for (const auto& entry : doc.at("classes")) {
    const int id = entry.at("id").get<int>();
    ClassStatistics& s = bank.per_class_.at(id);
    s.mean = entry.at("mean").get<std::vector<double>>();
    s.stddev = entry.at("std").get<std::vector<double>>();
    s.observation_count = entry.at("count").get<std::uint64_t>();
    s.initialized = entry.at("initialized").get<bool>();
  }
  return bank;
}

}  // namespace longtail
