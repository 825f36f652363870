#include "core/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "core/annot_io.hpp"
#include "core/errors.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace facekit {

using nlohmann::json;

namespace {

// Scores for every record, filled fold by fold; each record is scored exactly
// once, by models that never saw it.
using ScoreMatrix = std::vector<std::vector<double>>;  // [record][class]

ChannelResult pool_results(const std::string& name, const SvmParams& params,
                           const ScoreMatrix& scores,
                           const std::vector<int>& labels,
                           const std::vector<std::string>& class_names,
                           const DatasetManifest& manifest,
                           const std::vector<int>& fold_of, int folds) {
  ChannelResult res;
  res.name = name;
  res.params = params;
  double sum = 0.0;
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    std::vector<std::pair<double, bool>> scored;
    scored.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
      scored.emplace_back(scores[i][c], labels[i] == static_cast<int>(c));
    }
    const double ap = average_precision(scored);
    res.ap[class_names[c]] = ap;
    sum += ap;

    std::vector<std::size_t> order(scored.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return scored[a].first > scored[b].first;
                     });
    auto& ranking = res.rankings[class_names[c]];
    ranking.reserve(order.size());
    for (std::size_t i : order) {
      ranking.push_back(
          {manifest.records[i].id, scored[i].first, scored[i].second});
    }
  }
  res.map = sum / static_cast<double>(class_names.size());

  res.per_fold_ap.resize(static_cast<std::size_t>(folds));
  res.per_fold_map.resize(static_cast<std::size_t>(folds), 0.0);
  for (int f = 0; f < folds; ++f) {
    double fold_sum = 0.0;
    for (std::size_t c = 0; c < class_names.size(); ++c) {
      std::vector<std::pair<double, bool>> scored;
      for (std::size_t i = 0; i < scores.size(); ++i) {
        if (fold_of[i] != f) continue;
        scored.emplace_back(scores[i][c], labels[i] == static_cast<int>(c));
      }
      const double ap = average_precision(scored);
      res.per_fold_ap[static_cast<std::size_t>(f)][class_names[c]] = ap;
      fold_sum += ap;
    }
    res.per_fold_map[static_cast<std::size_t>(f)] =
        fold_sum / static_cast<double>(class_names.size());
  }
  return res;
}

}  // namespace

const ChannelResult* EvalReport::result_for(const std::string& name) const {
  if (name == "fused") return &fused;
  for (const auto& r : per_channel) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

EvalReport run_cv(const DatasetManifest& manifest,
                  const std::map<std::string, ChannelData>& channel_data,
                  const std::vector<std::string>& channels,
                  const EvalConfig& cfg) {
  if (channels.empty()) raise(ErrorCode::Usage, "no channels requested");
  for (const auto& name : channels) {
    if (name == "fused") {
      raise(ErrorCode::Usage, "'fused' is a reserved channel name");
    }
    if (std::count(channels.begin(), channels.end(), name) != 1) {
      raise(ErrorCode::Usage, "duplicate channel '" + name + "'");
    }
  }
  const std::size_t n = manifest.records.size();
  const std::size_t num_classes = manifest.class_names.size();

  std::vector<int> labels;
  labels.reserve(n);
  for (const auto& rec : manifest.records) {
    labels.push_back(manifest.class_index(rec.label));
  }

  // aligned feature matrices, manifest order
  std::vector<std::vector<std::vector<double>>> features(channels.size());
  for (std::size_t ch = 0; ch < channels.size(); ++ch) {
    auto it = channel_data.find(channels[ch]);
    if (it == channel_data.end()) {
      raise(ErrorCode::Usage, "channel '" + channels[ch] + "' not loaded");
    }
    validate_channel(it->second);
    check_channel_covers(it->second, manifest);
    std::unordered_map<std::string, const FeatureVector*> by_id;
    for (const auto& row : it->second.rows) by_id.emplace(row.image_id, &row);
    auto& mat = features[ch];
    mat.reserve(n);
    for (const auto& rec : manifest.records) {
      mat.push_back(by_id.at(rec.id)->values);
    }
  }

  const FoldPlan plan = make_folds(manifest, cfg.folds, cfg.seed);

  // one parameter set per channel, shared by every fold and class
  std::vector<SvmParams> params(channels.size());
  for (std::size_t ch = 0; ch < channels.size(); ++ch) {
    if (cfg.params) {
      params[ch] = *cfg.params;
    } else {
      LabeledData search;
      search.class_names = manifest.class_names;
      for (std::size_t i = 0; i < n; ++i) {
        if (plan.by_index[i] == 0) continue;
        search.x.push_back(features[ch][i]);
        search.label.push_back(labels[i]);
      }
      params[ch] = grid_search(search, cfg.grid, cfg.base,
                               derive_seed(cfg.seed, {0x6e1dull, ch}),
                               cfg.threads);
    }
  }

  std::vector<ScoreMatrix> chan_scores(
      channels.size(), ScoreMatrix(n, std::vector<double>(num_classes, 0.0)));
  ScoreMatrix fused_scores(n, std::vector<double>(num_classes, 0.0));

  parallel_for(static_cast<std::size_t>(cfg.folds), cfg.threads, [&](std::size_t f) {
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < n; ++i) {
      (plan.by_index[i] == static_cast<int>(f) ? test_idx : train_idx)
          .push_back(i);
    }

    std::vector<LabeledData> train_data(channels.size());
    std::vector<TrainedChannelModel> models(channels.size());
    for (std::size_t ch = 0; ch < channels.size(); ++ch) {
      auto& data = train_data[ch];
      data.class_names = manifest.class_names;
      data.x.reserve(train_idx.size());
      data.label.reserve(train_idx.size());
      for (std::size_t i : train_idx) {
        data.x.push_back(features[ch][i]);
        data.label.push_back(labels[i]);
      }
      models[ch] = train_channel(data, channels[ch], params[ch],
                                 derive_seed(cfg.seed, {0x0175ull, f, ch}), 1);
      for (std::size_t i : test_idx) {
        chan_scores[ch][i] = channel_scores(models[ch], features[ch][i]);
      }
    }

    // fusion layer: first-layer scores for its training rows come from an
    // inner cross-validation, so no row was scored by a model that saw it
    std::vector<const LabeledData*> ptrs;
    for (const auto& d : train_data) ptrs.push_back(&d);
    const auto fusion_rows =
        inner_cv_scores(ptrs, params, cfg.fusion_inner_folds,
                        derive_seed(cfg.seed, {0xf01dull, f}), 1);
    const FusionModel fusion = train_fusion(
        fusion_rows, train_data.front().label, manifest.class_names, channels,
        cfg.fusion_cost, derive_seed(cfg.seed, {0xf051ull, f}), 1);

    for (std::size_t i : test_idx) {
      std::vector<double> row;
      row.reserve(channels.size() * num_classes);
      for (std::size_t ch = 0; ch < channels.size(); ++ch) {
        row.insert(row.end(), chan_scores[ch][i].begin(),
                   chan_scores[ch][i].end());
      }
      fused_scores[i] = fusion_scores(fusion, row);
    }
  });

  EvalReport report;
  report.class_names = manifest.class_names;
  report.channels = channels;
  report.folds = cfg.folds;
  report.seed = cfg.seed;
  report.fusion_cost = cfg.fusion_cost;
  report.fold_assignments = plan.assignments;
  for (std::size_t ch = 0; ch < channels.size(); ++ch) {
    report.per_channel.push_back(
        pool_results(channels[ch], params[ch], chan_scores[ch], labels,
                     manifest.class_names, manifest, plan.by_index, cfg.folds));
  }
  SvmParams fusion_params = cfg.base;
  fusion_params.cost = cfg.fusion_cost;
  report.fused =
      pool_results("fused", fusion_params, fused_scores, labels,
                   manifest.class_names, manifest, plan.by_index, cfg.folds);
  return report;
}

namespace {

json params_json(const SvmParams& p) {
  json j;
  j["cost"] = p.cost;
  j["gamma"] = p.gamma;
  j["tol"] = p.tol;
  j["max_iters"] = p.max_iters;
  return j;
}

SvmParams params_from(const json& j) {
  SvmParams p;
  p.cost = j.at("cost").get<double>();
  p.gamma = j.at("gamma").get<double>();
  p.tol = j.at("tol").get<double>();
  p.max_iters = j.at("max_iters").get<long long>();
  return p;
}

json result_json(const ChannelResult& r) {
  json j;
  j["params"] = params_json(r.params);
  j["ap"] = r.ap;
  j["map"] = r.map;
  j["per_fold_ap"] = r.per_fold_ap;
  j["per_fold_map"] = r.per_fold_map;
  return j;
}

ChannelResult result_from(const std::string& name, const json& j) {
  ChannelResult r;
  r.name = name;
  r.params = params_from(j.at("params"));
  r.ap = j.at("ap").get<std::map<std::string, double>>();
  r.map = j.at("map").get<double>();
  r.per_fold_ap =
      j.at("per_fold_ap").get<std::vector<std::map<std::string, double>>>();
  r.per_fold_map = j.at("per_fold_map").get<std::vector<double>>();
  return r;
}

}  // namespace

void save_report(const EvalReport& report, const std::string& path) {
  json j;
  j["format"] = kReportFormat;
  json config;
  config["channels"] = report.channels;
  config["folds"] = report.folds;
  config["seed"] = report.seed;
  config["fusion_cost"] = report.fusion_cost;
  config["tie_break"] = "stable-dataset-order";
  j["config"] = config;
  j["classes"] = report.class_names;
  j["fold_assignments"] = report.fold_assignments;
  json results;
  for (const auto& r : report.per_channel) results[r.name] = result_json(r);
  results["fused"] = result_json(report.fused);
  j["results"] = results;
  json rankings;
  auto ranking_json = [](const ChannelResult& r) {
    json out;
    for (const auto& [cls, list] : r.rankings) {
      json arr = json::array();
      for (const auto& e : list) {
        arr.push_back(json::array({e.image_id, e.score, e.positive}));
      }
      out[cls] = arr;
    }
    return out;
  };
  for (const auto& r : report.per_channel) rankings[r.name] = ranking_json(r);
  rankings["fused"] = ranking_json(report.fused);
  j["rankings"] = rankings;
  atomic_write_text(path, j.dump(2) + "\n");
}

EvalReport load_report(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    raise(ErrorCode::Parse, std::string("report file: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kReportFormat) {
      raise(ErrorCode::Parse, "unsupported report format");
    }
    EvalReport report;
    report.class_names = j.at("classes").get<std::vector<std::string>>();
    const json& config = j.at("config");
    report.channels = config.at("channels").get<std::vector<std::string>>();
    report.folds = config.at("folds").get<int>();
    report.seed = config.at("seed").get<std::uint64_t>();
    report.fusion_cost = config.at("fusion_cost").get<double>();
    report.fold_assignments =
        j.at("fold_assignments").get<std::map<std::string, int>>();
    const json& results = j.at("results");
    for (const auto& name : report.channels) {
      report.per_channel.push_back(result_from(name, results.at(name)));
    }
    report.fused = result_from("fused", results.at("fused"));
    if (j.contains("rankings")) {
      auto parse_rankings = [&](const std::string& name, ChannelResult& r) {
        const json& rk = j.at("rankings");
        if (!rk.contains(name)) return;
        for (auto it = rk.at(name).begin(); it != rk.at(name).end(); ++it) {
          std::vector<RankedEntry> list;
          for (const auto& e : it.value()) {
            list.push_back({e.at(0).get<std::string>(), e.at(1).get<double>(),
                            e.at(2).get<bool>()});
          }
          r.rankings[it.key()] = std::move(list);
        }
      };
      for (auto& r : report.per_channel) parse_rankings(r.name, r);
      parse_rankings("fused", report.fused);
    }
    return report;
  } catch (const json::exception& e) {
    raise(ErrorCode::Parse, std::string("report file: ") + e.what());
  }
}

std::string render_report(const EvalReport& report) {
  std::ostringstream out;
  std::vector<std::size_t> widths;
  std::size_t name_w = 7;  // "Channel"
  for (const auto& r : report.per_channel) {
    name_w = std::max(name_w, r.name.size());
  }
  name_w = std::max(name_w, std::string("fused").size());
  for (const auto& c : report.class_names) {
    widths.push_back(std::max<std::size_t>(c.size(), 5));
  }

  out << std::left << std::setw(static_cast<int>(name_w)) << "Channel";
  for (std::size_t c = 0; c < report.class_names.size(); ++c) {
    out << "  " << std::right << std::setw(static_cast<int>(widths[c]))
        << report.class_names[c];
  }
  out << "  " << std::right << std::setw(6) << "mAP" << '\n';

  auto row = [&](const ChannelResult& r) {
    out << std::left << std::setw(static_cast<int>(name_w)) << r.name;
    out << std::fixed << std::setprecision(1);
    for (std::size_t c = 0; c < report.class_names.size(); ++c) {
      const auto it = r.ap.find(report.class_names[c]);
      const double v = it == r.ap.end() ? 0.0 : it->second;
      out << "  " << std::right << std::setw(static_cast<int>(widths[c]))
          << v * 100.0;
    }
    out << "  " << std::right << std::setw(6) << r.map * 100.0 << '\n';
  };
  for (const auto& r : report.per_channel) row(r);
  row(report.fused);
  return out.str();
}

}  // namespace facekit
