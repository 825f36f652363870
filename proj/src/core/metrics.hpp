#ifndef FACEKIT_CORE_METRICS_HPP_
#define FACEKIT_CORE_METRICS_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "core/types.hpp"

namespace facekit {

struct FoldPlan {
  int k = 5;
  std::uint64_t seed = 0;
  std::vector<int> by_index;                // fold per dataset position
  std::map<std::string, int> assignments;   // image id -> fold
};

// Stratified assignment over class-index labels; per-class fold sizes differ
// by at most one. Deterministic in (labels, class_names, k, seed).
std::vector<int> stratified_folds(const std::vector<int>& labels,
                                  const std::vector<std::string>& class_names,
                                  int k, std::uint64_t seed);

FoldPlan make_folds(const DatasetManifest& m, int k, std::uint64_t seed);

// Average precision of a scored list given in dataset order. Ranking is by
// descending score with ties kept in input order. Requires >= 1 positive.
double average_precision(const std::vector<std::pair<double, bool>>& scored);

}  // namespace facekit

#endif  // FACEKIT_CORE_METRICS_HPP_
