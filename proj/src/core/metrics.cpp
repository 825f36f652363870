#include "core/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace facekit {

std::vector<int> stratified_folds(const std::vector<int>& labels,
                                  const std::vector<std::string>& class_names,
                                  int k, std::uint64_t seed) {
  if (k < 2) raise(ErrorCode::Usage, "fold count must be >= 2");
  std::vector<int> out(labels.size(), -1);
  std::mt19937_64 rng(seed);
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == static_cast<int>(c)) members.push_back(i);
    }
    if (members.size() < static_cast<std::size_t>(k)) {
      raise(ErrorCode::Validation,
            "class '" + class_names[c] + "' has " +
                std::to_string(members.size()) + " samples, needs >= " +
                std::to_string(k) + " for " + std::to_string(k) + "-fold CV");
    }
    shuffle_inplace(members, rng);
    // rotate the starting fold per class so overall fold sizes stay balanced
    for (std::size_t pos = 0; pos < members.size(); ++pos) {
      out[members[pos]] = static_cast<int>((pos + c) % static_cast<std::size_t>(k));
    }
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (out[i] < 0) {
      raise(ErrorCode::Validation,
            "sample " + std::to_string(i) + " has an unknown class label");
    }
  }
  return out;
}

FoldPlan make_folds(const DatasetManifest& m, int k, std::uint64_t seed) {
  std::vector<int> labels;
  labels.reserve(m.records.size());
  for (const auto& rec : m.records) labels.push_back(m.class_index(rec.label));
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.by_index = stratified_folds(labels, m.class_names, k, seed);
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    plan.assignments[m.records[i].id] = plan.by_index[i];
  }
  return plan;
}

double average_precision(
    const std::vector<std::pair<double, bool>>& scored) {
  std::size_t positives = 0;
  for (const auto& [score, is_pos] : scored) {
    if (is_pos) ++positives;
  }
  if (positives == 0) {
    raise(ErrorCode::Degenerate,
          "average precision undefined without positives");
  }
  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scored[a].first > scored[b].first;
  });
  double hits = 0.0;
  double sum_precision = 0.0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (scored[order[rank]].second) {
      hits += 1.0;
      sum_precision += hits / static_cast<double>(rank + 1);
    }
  }
  return sum_precision / static_cast<double>(positives);
}

}  // namespace facekit
