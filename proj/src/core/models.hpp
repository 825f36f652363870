#ifndef FACEKIT_CORE_MODELS_HPP_
#define FACEKIT_CORE_MODELS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/svm.hpp"
#include "core/types.hpp"

namespace facekit {

// Feature rows with class-index labels, aligned by position.
struct LabeledData {
  std::vector<std::vector<double>> x;
  std::vector<int> label;
  std::vector<std::string> class_names;
};

// One-vs-rest RBF ensemble for a single feature channel.
struct TrainedChannelModel {
  std::string channel;
  std::vector<std::string> class_names;
  SvmParams params;
  Standardizer scaler;
  std::vector<BinarySvm> per_class;
};

TrainedChannelModel train_channel(const LabeledData& data,
                                  const std::string& channel,
                                  const SvmParams& params, std::uint64_t seed,
                                  int threads);

// Per-class decision values for one (raw, unstandardized) feature vector.
std::vector<double> channel_scores(const TrainedChannelModel& model,
                                   const std::vector<double>& x);

struct ParamGrid {
  std::vector<double> costs;
  std::vector<double> gammas;

  // cost in {0.1, 1, 10, 100}, gamma in powers of two 2^-7 .. 2^3
  static ParamGrid defaults();
};

// Full search over the grid, scored by inner-cross-validated mAP on the given
// training data only. Ties prefer the smaller cost, then the smaller gamma.
// The winner is reused across folds and classes by the callers.
SvmParams grid_search(const LabeledData& train, const ParamGrid& grid,
                      const SvmParams& base, std::uint64_t seed, int threads);

// Cross-validated per-class scores for every training point: each point is
// scored by models that never saw it. Rows are [channels x classes] wide, in
// the channel order given. Used to build unbiased fusion training data.
std::vector<std::vector<double>> inner_cv_scores(
    const std::vector<const LabeledData*>& channels, const std::vector<SvmParams>& params,
    int folds, std::uint64_t seed, int threads);

// Second-layer linear SVM over concatenated per-channel per-class scores.
struct FusionModel {
  std::vector<std::string> class_names;
  std::vector<std::string> channels;
  double cost = 1.0;
  Standardizer scaler;
  std::vector<BinarySvm> per_class;
  std::vector<std::vector<double>> weights;  // materialized per class
};

FusionModel train_fusion(const std::vector<std::vector<double>>& score_rows,
                         const std::vector<int>& labels,
                         const std::vector<std::string>& class_names,
                         const std::vector<std::string>& channels, double cost,
                         std::uint64_t seed, int threads);

std::vector<double> fusion_scores(const FusionModel& model,
                                  const std::vector<double>& score_row);

// A trained pipeline: per-channel models plus the optional fusion layer.
struct ModelBundle {
  std::vector<TrainedChannelModel> channel_models;
  std::optional<FusionModel> fusion;
};

void save_model_bundle(const ModelBundle& bundle, const std::string& path);
ModelBundle load_model_bundle(const std::string& path);

}  // namespace facekit

#endif  // FACEKIT_CORE_MODELS_HPP_
