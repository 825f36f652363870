#ifndef FACEKIT_CORE_EVAL_HPP_
#define FACEKIT_CORE_EVAL_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/metrics.hpp"
#include "core/models.hpp"
#include "core/types.hpp"

namespace facekit {

struct EvalConfig {
  int folds = 5;
  std::uint64_t seed = 0;
  // Fixed params for every channel; when unset a grid search runs per channel
  // on the training split of fold 0 and the winner is reused everywhere.
  std::optional<SvmParams> params;
  ParamGrid grid = ParamGrid::defaults();
  SvmParams base;  // carries tol / max_iters for all fits
  double fusion_cost = 1.0;
  int fusion_inner_folds = 5;
  int threads = 0;
};

struct RankedEntry {
  std::string image_id;
  double score = 0.0;
  bool positive = false;
};

struct ChannelResult {
  std::string name;
  SvmParams params;
  std::map<std::string, double> ap;  // per class, pooled over folds
  double map = 0.0;
  std::vector<std::map<std::string, double>> per_fold_ap;
  std::vector<double> per_fold_map;
  std::map<std::string, std::vector<RankedEntry>> rankings;
};

struct EvalReport {
  std::vector<std::string> class_names;
  std::vector<std::string> channels;
  int folds = 5;
  std::uint64_t seed = 0;
  double fusion_cost = 1.0;
  std::map<std::string, int> fold_assignments;
  std::vector<ChannelResult> per_channel;
  ChannelResult fused;

  const ChannelResult* result_for(const std::string& name) const;
};

// Full five-fold protocol: per fold, per-channel one-vs-rest models and the
// fusion layer are trained on the other folds, the held-out fold is scored,
// and held-out scores are pooled into one ranked list per class. Fusion
// training rows come from an inner cross-validation inside each training
// split, never from a model scoring its own training data.
EvalReport run_cv(const DatasetManifest& manifest,
                  const std::map<std::string, ChannelData>& channel_data,
                  const std::vector<std::string>& channels,
                  const EvalConfig& cfg);

void save_report(const EvalReport& report, const std::string& path);
EvalReport load_report(const std::string& path);

// Plain-text table: one row per channel plus the fused row, one column per
// class plus the mean, as percentages.
std::string render_report(const EvalReport& report);

}  // namespace facekit

#endif  // FACEKIT_CORE_EVAL_HPP_
