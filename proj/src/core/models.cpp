#include "core/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "core/annot_io.hpp"
#include "core/errors.hpp"
#include "core/metrics.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace facekit {

using nlohmann::json;

namespace {

void check_labels(const LabeledData& data) {
  if (data.x.size() != data.label.size()) {
    raise(ErrorCode::Usage, "feature rows and labels misaligned");
  }
  if (data.class_names.size() < 2) {
    raise(ErrorCode::Degenerate, "at least two classes are required");
  }
}

int min_class_count(const std::vector<int>& labels, std::size_t num_classes) {
  std::vector<int> counts(num_classes, 0);
  for (int l : labels) {
    if (l >= 0 && static_cast<std::size_t>(l) < num_classes) ++counts[l];
  }
  int m = counts.empty() ? 0 : counts.front();
  for (int c : counts) m = std::min(m, c);
  return m;
}

}  // namespace

TrainedChannelModel train_channel(const LabeledData& data,
                                  const std::string& channel,
                                  const SvmParams& params, std::uint64_t seed,
                                  int threads) {
  check_labels(data);
  const std::size_t num_classes = data.class_names.size();
  std::vector<int> counts(num_classes, 0);
  for (int l : data.label) {
    if (l < 0 || static_cast<std::size_t>(l) >= num_classes) {
      raise(ErrorCode::Validation, "label index out of range");
    }
    ++counts[static_cast<std::size_t>(l)];
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (counts[c] == 0) {
      raise(ErrorCode::Degenerate,
            "class '" + data.class_names[c] + "' has no positive examples");
    }
  }

  TrainedChannelModel model;
  model.channel = channel;
  model.class_names = data.class_names;
  model.params = params;
  model.scaler.fit(data.x);
  const auto scaled = model.scaler.apply_all(data.x);

  model.per_class.resize(num_classes);
  parallel_for(num_classes, threads, [&](std::size_t c) {
    std::vector<int> y(data.label.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = data.label[i] == static_cast<int>(c) ? 1 : -1;
    }
    model.per_class[c] = train_binary(scaled, y, params, KernelKind::Rbf,
                                      derive_seed(seed, {0x5c0ull, c}));
  });
  return model;
}

std::vector<double> channel_scores(const TrainedChannelModel& model,
                                   const std::vector<double>& x) {
  const std::vector<double> z = model.scaler.apply(x);
  std::vector<double> out;
  out.reserve(model.per_class.size());
  for (const auto& m : model.per_class) out.push_back(decision(m, z));
  return out;
}

ParamGrid ParamGrid::defaults() {
  ParamGrid g;
  g.costs = {0.1, 1.0, 10.0, 100.0};
  for (int e = -7; e <= 3; ++e) g.gammas.push_back(std::ldexp(1.0, e));
  return g;
}

std::vector<std::vector<double>> inner_cv_scores(
    const std::vector<const LabeledData*>& channels,
    const std::vector<SvmParams>& params, int folds, std::uint64_t seed,
    int threads) {
  if (channels.empty() || channels.size() != params.size()) {
    raise(ErrorCode::Usage, "channels and params misaligned");
  }
  const LabeledData& first = *channels.front();
  check_labels(first);
  const std::size_t n = first.x.size();
  const std::size_t num_classes = first.class_names.size();
  for (const LabeledData* ch : channels) {
    if (ch->x.size() != n || ch->label != first.label) {
      raise(ErrorCode::Usage, "channel rows misaligned across channels");
    }
  }

  const int k = std::min<int>(folds, min_class_count(first.label, num_classes));
  if (k < 2) {
    raise(ErrorCode::Degenerate,
          "too few samples per class for inner cross-validation");
  }
  const std::vector<int> assign =
      stratified_folds(first.label, first.class_names, k, seed);

  std::vector<std::vector<double>> rows(
      n, std::vector<double>(channels.size() * num_classes, 0.0));

  struct Task {
    int fold;
    std::size_t channel;
  };
  std::vector<Task> tasks;
  for (int g = 0; g < k; ++g) {
    for (std::size_t ch = 0; ch < channels.size(); ++ch) {
      tasks.push_back({g, ch});
    }
  }
  parallel_for(tasks.size(), threads, [&](std::size_t t) {
    const int g = tasks[t].fold;
    const std::size_t ch = tasks[t].channel;
    const LabeledData& data = *channels[ch];

    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < n; ++i) {
      (assign[i] == g ? test_idx : train_idx).push_back(i);
    }
    std::vector<std::vector<double>> xtrain;
    std::vector<int> ltrain;
    xtrain.reserve(train_idx.size());
    ltrain.reserve(train_idx.size());
    for (std::size_t i : train_idx) {
      xtrain.push_back(data.x[i]);
      ltrain.push_back(data.label[i]);
    }
    Standardizer scaler;
    scaler.fit(xtrain);
    const auto strain = scaler.apply_all(xtrain);

    for (std::size_t c = 0; c < num_classes; ++c) {
      std::vector<int> y(strain.size());
      for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = ltrain[i] == static_cast<int>(c) ? 1 : -1;
      }
      const BinarySvm m =
          train_binary(strain, y, params[ch], KernelKind::Rbf,
                       derive_seed(seed, {static_cast<std::uint64_t>(g), ch, c}));
      for (std::size_t i : test_idx) {
        rows[i][ch * num_classes + c] = decision(m, scaler.apply(data.x[i]));
      }
    }
  });
  return rows;
}

SvmParams grid_search(const LabeledData& train, const ParamGrid& grid,
                      const SvmParams& base, std::uint64_t seed, int threads) {
  check_labels(train);
  if (grid.costs.empty() || grid.gammas.empty()) {
    raise(ErrorCode::Usage, "parameter grid is empty");
  }
  struct Point {
    SvmParams params;
    double map = -1.0;
  };
  std::vector<Point> points;
  for (double c : grid.costs) {
    for (double g : grid.gammas) {
      SvmParams p = base;
      p.cost = c;
      p.gamma = g;
      points.push_back({p, -1.0});
    }
  }
  const std::uint64_t cv_seed = derive_seed(seed, {0x62a1dull});
  const std::vector<const LabeledData*> channels = {&train};
  parallel_for(points.size(), threads, [&](std::size_t i) {
    const auto rows =
        inner_cv_scores(channels, {points[i].params}, 3, cv_seed, 1);
    double sum = 0.0;
    for (std::size_t c = 0; c < train.class_names.size(); ++c) {
      std::vector<std::pair<double, bool>> scored;
      scored.reserve(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        scored.emplace_back(rows[r][c], train.label[r] == static_cast<int>(c));
      }
      sum += average_precision(scored);
    }
    points[i].map = sum / static_cast<double>(train.class_names.size());
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const Point& cand = points[i];
    const Point& cur = points[best];
    if (cand.map > cur.map ||
        (cand.map == cur.map &&
         (cand.params.cost < cur.params.cost ||
          (cand.params.cost == cur.params.cost &&
           cand.params.gamma < cur.params.gamma)))) {
      best = i;
    }
  }
  return points[best].params;
}

FusionModel train_fusion(const std::vector<std::vector<double>>& score_rows,
                         const std::vector<int>& labels,
                         const std::vector<std::string>& class_names,
                         const std::vector<std::string>& channels, double cost,
                         std::uint64_t seed, int threads) {
  if (score_rows.size() != labels.size()) {
    raise(ErrorCode::Usage, "score rows and labels misaligned");
  }
  const std::size_t width = channels.size() * class_names.size();
  for (const auto& r : score_rows) {
    if (r.size() != width) {
      raise(ErrorCode::Dimension,
            "fusion rows must have channels x classes = " +
                std::to_string(width) + " values, got " +
                std::to_string(r.size()));
    }
  }
  FusionModel model;
  model.class_names = class_names;
  model.channels = channels;
  model.cost = cost;
  model.scaler.fit(score_rows);
  const auto scaled = model.scaler.apply_all(score_rows);

  SvmParams params;
  params.cost = cost;
  model.per_class.resize(class_names.size());
  model.weights.resize(class_names.size());
  parallel_for(class_names.size(), threads, [&](std::size_t c) {
    std::vector<int> y(labels.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = labels[i] == static_cast<int>(c) ? 1 : -1;
    }
    model.per_class[c] = train_binary(scaled, y, params, KernelKind::Linear,
                                      derive_seed(seed, {0xf510ull, c}));
    model.weights[c] = linear_weights(model.per_class[c]);
    if (model.weights[c].empty()) model.weights[c].assign(width, 0.0);
  });
  return model;
}

std::vector<double> fusion_scores(const FusionModel& model,
                                  const std::vector<double>& score_row) {
  const std::vector<double> z = model.scaler.apply(score_row);
  std::vector<double> out;
  out.reserve(model.per_class.size());
  for (const auto& m : model.per_class) out.push_back(decision(m, z));
  return out;
}

namespace {

json scaler_to_json(const Standardizer& s) {
  json j;
  j["mean"] = s.mean;
  j["inv_std"] = s.inv_std;
  return j;
}

Standardizer scaler_from_json(const json& j) {
  Standardizer s;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.inv_std = j.at("inv_std").get<std::vector<double>>();
  return s;
}

json params_to_json(const SvmParams& p) {
  json j;
  j["cost"] = p.cost;
  j["gamma"] = p.gamma;
  j["tol"] = p.tol;
  j["max_iters"] = p.max_iters;
  return j;
}

SvmParams params_from_json(const json& j) {
  SvmParams p;
  p.cost = j.at("cost").get<double>();
  p.gamma = j.at("gamma").get<double>();
  p.tol = j.at("tol").get<double>();
  p.max_iters = j.at("max_iters").get<long long>();
  return p;
}

json binary_to_json(const BinarySvm& m) {
  json j;
  j["kernel"] = m.kernel == KernelKind::Rbf ? "rbf" : "linear";
  j["bias"] = m.bias;
  j["converged"] = m.converged;
  j["iterations"] = m.iterations;
  j["kkt_gap"] = m.kkt_gap;
  j["sv_indices"] = m.sv_indices;
  j["coef"] = m.coef;
  j["sv"] = m.sv;
  return j;
}

BinarySvm binary_from_json(const json& j, const SvmParams& params) {
  BinarySvm m;
  m.kernel = j.at("kernel").get<std::string>() == "linear" ? KernelKind::Linear
                                                           : KernelKind::Rbf;
  m.params = params;
  m.bias = j.at("bias").get<double>();
  m.converged = j.at("converged").get<bool>();
  m.iterations = j.at("iterations").get<long long>();
  m.kkt_gap = j.at("kkt_gap").get<double>();
  m.sv_indices = j.at("sv_indices").get<std::vector<int>>();
  m.coef = j.at("coef").get<std::vector<double>>();
  m.sv = j.at("sv").get<std::vector<std::vector<double>>>();
  m.canonicalize();
  return m;
}

}  // namespace

void save_model_bundle(const ModelBundle& bundle, const std::string& path) {
  json j;
  j["format"] = kModelFormat;
  json chans = json::array();
  for (const auto& cm : bundle.channel_models) {
    json c;
    c["channel"] = cm.channel;
    c["class_names"] = cm.class_names;
    c["params"] = params_to_json(cm.params);
    c["scaler"] = scaler_to_json(cm.scaler);
    json models = json::array();
    for (const auto& m : cm.per_class) models.push_back(binary_to_json(m));
    c["models"] = models;
    chans.push_back(c);
  }
  j["channels"] = chans;
  if (bundle.fusion) {
    const FusionModel& f = *bundle.fusion;
    json fj;
    fj["class_names"] = f.class_names;
    fj["channels"] = f.channels;
    fj["cost"] = f.cost;
    fj["scaler"] = scaler_to_json(f.scaler);
    json models = json::array();
    for (const auto& m : f.per_class) models.push_back(binary_to_json(m));
    fj["models"] = models;
    fj["weights"] = f.weights;
    j["fusion"] = fj;
  } else {
    j["fusion"] = nullptr;
  }
  atomic_write_text(path, j.dump(2) + "\n");
}

ModelBundle load_model_bundle(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    raise(ErrorCode::Parse, std::string("model file: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kModelFormat) {
      raise(ErrorCode::Parse, "unsupported model format");
    }
    ModelBundle bundle;
    for (const auto& c : j.at("channels")) {
      TrainedChannelModel cm;
      cm.channel = c.at("channel").get<std::string>();
      cm.class_names = c.at("class_names").get<std::vector<std::string>>();
      cm.params = params_from_json(c.at("params"));
      cm.scaler = scaler_from_json(c.at("scaler"));
      for (const auto& m : c.at("models")) {
        cm.per_class.push_back(binary_from_json(m, cm.params));
      }
      bundle.channel_models.push_back(std::move(cm));
    }
    if (!j.at("fusion").is_null()) {
      const json& fj = j.at("fusion");
      FusionModel f;
      f.class_names = fj.at("class_names").get<std::vector<std::string>>();
      f.channels = fj.at("channels").get<std::vector<std::string>>();
      f.cost = fj.at("cost").get<double>();
      f.scaler = scaler_from_json(fj.at("scaler"));
      SvmParams p;
      p.cost = f.cost;
      for (const auto& m : fj.at("models")) {
        f.per_class.push_back(binary_from_json(m, p));
      }
      f.weights = fj.at("weights").get<std::vector<std::vector<double>>>();
      bundle.fusion = std::move(f);
    }
    return bundle;
  } catch (const json::exception& e) {
    raise(ErrorCode::Parse, std::string("model file: ") + e.what());
  }
}

}  // namespace facekit
