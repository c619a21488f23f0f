#include "longtail/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace longtail {

namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

int ClassGrouping::group_of(int class_id) const {
  for (int g = 0; g < num_groups(); ++g)
    for (int c : groups[g])
      if (c == class_id) return g;
  return -1;
}

SamplingState init_probabilities(const std::vector<std::uint64_t>& class_counts,
                                 double init_scale, InitMode mode) {
  if (class_counts.empty())
    throw std::invalid_argument("init_probabilities: no classes");
  if (!(init_scale > 0.0))
    throw std::invalid_argument("init_probabilities: init_scale must be > 0");

  const std::size_t num_classes = class_counts.size();
  SamplingState state;
  state.init_scale = init_scale;
  state.probs.resize(num_classes);

  if (mode == InitMode::uniform) {
    const double p = init_scale / static_cast<double>(num_classes);
    std::fill(state.probs.begin(), state.probs.end(), clamp01(p));
    return state;
  }

  double inverse_sum = 0.0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (class_counts[c] == 0)
      throw std::invalid_argument("init_probabilities: class " +
                                  std::to_string(c) +
                                  " has no training samples");
    inverse_sum += 1.0 / static_cast<double>(class_counts[c]);
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    const double p =
        init_scale * (1.0 / static_cast<double>(class_counts[c])) / inverse_sum;
    state.probs[c] = clamp01(p);
  }
  return state;
}

double fisher_distance(const ClassStatistics& a, const ClassStatistics& b,
                       double eps) {
  if (!a.initialized || !b.initialized)
    throw std::invalid_argument("fisher_distance: statistics not initialized");
  if (a.mean.size() != b.mean.size())
    throw std::invalid_argument("fisher_distance: dimension mismatch (" +
                                std::to_string(a.mean.size()) + " vs " +
                                std::to_string(b.mean.size()) + ")");
  double dist = 0.0;
  for (std::size_t k = 0; k < a.mean.size(); ++k) {
    const double diff = a.mean[k] - b.mean[k];
    const double denom =
        a.stddev[k] * a.stddev[k] + b.stddev[k] * b.stddev[k] + eps;
    dist += diff * diff / denom;
  }
  return dist;
}

ClassGrouping cluster_classes(const StatisticsBank& bank, double epsilon,
                              int min_pts) {
  const int num_classes = bank.num_classes();
  ClassGrouping grouping;
  grouping.epsilon = epsilon;
  grouping.min_pts = min_pts;

  std::vector<int> active;  // initialized classes, ascending
  for (int c = 0; c < num_classes; ++c)
    if (bank.statistics(c).initialized) active.push_back(c);
  const int n = static_cast<int>(active.size());

  // pairwise distances over active classes
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      dist[i][j] = dist[j][i] =
          fisher_distance(bank.statistics(active[i]), bank.statistics(active[j]));

  std::vector<std::vector<int>> neighbors(n);
  std::vector<bool> core(n, false);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (dist[i][j] <= epsilon) neighbors[i].push_back(j);
    core[i] = static_cast<int>(neighbors[i].size()) >= min_pts;
  }

  // Seeded expansion in ascending id order: core points spread the cluster,
  // border points are absorbed by the first cluster that reaches them.
  constexpr int kUnassigned = -1;
  std::vector<int> cluster_of(n, kUnassigned);
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < n; ++i) {
    if (!core[i] || cluster_of[i] != kUnassigned) continue;
    const int id = static_cast<int>(clusters.size());
    clusters.emplace_back();
    std::deque<int> frontier{i};
    cluster_of[i] = id;
    while (!frontier.empty()) {
      const int p = frontier.front();
      frontier.pop_front();
      clusters[id].push_back(p);
      if (!core[p]) continue;  // border points do not expand
      for (int q : neighbors[p]) {
        if (cluster_of[q] != kUnassigned) continue;
        cluster_of[q] = id;
        frontier.push_back(q);
      }
    }
  }

  for (auto& members : clusters) {
    std::sort(members.begin(), members.end());
    std::vector<int> ids;
    ids.reserve(members.size());
    for (int local : members) ids.push_back(active[local]);
    grouping.groups.push_back(std::move(ids));
  }
  // noise among active classes
  for (int i = 0; i < n; ++i)
    if (cluster_of[i] == kUnassigned) grouping.groups.push_back({active[i]});
  // uninitialized classes defer to singletons
  for (int c = 0; c < num_classes; ++c)
    if (!bank.statistics(c).initialized) grouping.groups.push_back({c});

  std::sort(grouping.groups.begin(), grouping.groups.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              return a.front() < b.front();
            });
  return grouping;
}

double default_cluster_epsilon(const StatisticsBank& bank) {
  std::vector<int> active;
  for (int c = 0; c < bank.num_classes(); ++c)
    if (bank.statistics(c).initialized) active.push_back(c);
  if (active.size() < 2) return 0.0;

  std::vector<double> dists;
  dists.reserve(active.size() * (active.size() - 1) / 2);
  for (std::size_t i = 0; i < active.size(); ++i)
    for (std::size_t j = i + 1; j < active.size(); ++j)
      dists.push_back(
          fisher_distance(bank.statistics(active[i]), bank.statistics(active[j])));

  std::sort(dists.begin(), dists.end());
  const std::size_t n = dists.size();
  const double median =
      (n % 2 == 1) ? dists[n / 2] : 0.5 * (dists[n / 2 - 1] + dists[n / 2]);
  return 0.5 * median;
}

ClassGrouping singleton_grouping(int num_classes) {
  ClassGrouping grouping;
  grouping.groups.reserve(num_classes);
  for (int c = 0; c < num_classes; ++c) grouping.groups.push_back({c});
  return grouping;
}

double repeat_factor(double frequency, double threshold) {
  if (!(frequency > 0.0))
    throw std::invalid_argument("repeat_factor: frequency must be > 0");
  return std::max(1.0, std::sqrt(threshold / frequency));
}

std::vector<std::size_t> repeat_factor_resample(const std::vector<int>& labels,
                                                const RepeatFactorConfig& config,
                                                Rng& rng) {
  if (labels.empty())
    throw std::invalid_argument("repeat_factor_resample: empty labels");
  if (!(config.threshold > 0.0) || !(config.threshold < 1.0))
    throw std::invalid_argument(
        "repeat_factor_resample: threshold must be in (0, 1)");

  int max_label = 0;
  for (int label : labels) {
    if (label < 0)
      throw std::invalid_argument("repeat_factor_resample: negative label");
    max_label = std::max(max_label, label);
  }
  std::vector<std::uint64_t> counts(max_label + 1, 0);
  for (int label : labels) ++counts[label];

  const double total = static_cast<double>(labels.size());
  std::vector<double> factor(counts.size(), 1.0);
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] > 0)
      factor[c] = repeat_factor(static_cast<double>(counts[c]) / total,
                                config.threshold);

  std::vector<std::size_t> indices;
  indices.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double r = factor[labels[i]];
    const double whole = std::floor(r);
    const double frac = r - whole;
    std::size_t repeats = static_cast<std::size_t>(whole);
    if (frac > 0.0 && rng.uniform() < frac) ++repeats;
    for (std::size_t k = 0; k < repeats; ++k) indices.push_back(i);
  }
  return indices;
}

std::vector<std::optional<double>> group_signal(
    const std::vector<std::optional<double>>& per_class_signal,
    const ClassGrouping& grouping) {
  std::vector<std::optional<double>> result(grouping.num_groups());
  for (int g = 0; g < grouping.num_groups(); ++g) {
    double sum = 0.0;
    int present = 0;
    for (int c : grouping.groups[g]) {
      if (c < 0 || c >= static_cast<int>(per_class_signal.size())) continue;
      if (per_class_signal[c].has_value()) {
        sum += *per_class_signal[c];
        ++present;
      }
    }
    if (present > 0) result[g] = sum / present;
  }
  return result;
}

void adjust_probabilities(SamplingState& state, const ClassGrouping& grouping,
                          const std::vector<std::optional<double>>& current) {
  if (static_cast<int>(current.size()) != grouping.num_groups())
    throw std::invalid_argument(
        "adjust_probabilities: signal count does not match grouping");

  state.prev_signal.resize(grouping.num_groups());
  for (int g = 0; g < grouping.num_groups(); ++g) {
    const auto& now = current[g];
    auto& before = state.prev_signal[g];
    if (now.has_value() && before.has_value()) {
      const bool improved = (state.signal == SignalMode::validation_loss)
                                ? (*now < *before)
                                : (*now > *before);
      const double scale = improved ? state.alpha : state.beta;
      for (int c : grouping.groups[g]) {
        if (c < 0 || c >= static_cast<int>(state.probs.size())) continue;
        state.probs[c] = improved ? std::min(1.0, state.probs[c] * scale)
                                  : std::max(0.0, state.probs[c] * scale);
      }
    }
    if (now.has_value()) before = now;
  }
}

}  // namespace longtail
