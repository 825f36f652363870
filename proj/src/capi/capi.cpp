#include "facekit/facekit.h"

#include <cstring>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "core/annot_io.hpp"
#include "core/descriptors.hpp"
#include "core/errors.hpp"
#include "core/eval.hpp"
#include "core/merge.hpp"
#include "core/metrics.hpp"
#include "core/models.hpp"
#include "core/rng.hpp"
#include "core/synth.hpp"
#include "core/types.hpp"

using nlohmann::json;

struct fk_manifest {
  facekit::DatasetManifest manifest;
  std::vector<std::string> warnings;
};

struct fk_channel {
  facekit::ChannelData data;
};

struct fk_report {
  facekit::EvalReport report;
  std::string rendered;
};

namespace {

thread_local std::string g_last_error;

int fail(facekit::ErrorCode code, const std::string& msg) {
  g_last_error = msg;
  return static_cast<int>(code);
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return FK_OK;
  } catch (const facekit::Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::exception& e) {
    return fail(facekit::ErrorCode::Internal, e.what());
  } catch (...) {
    return fail(facekit::ErrorCode::Internal, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) facekit::raise(facekit::ErrorCode::Usage, what);
}

struct NamedChannel {
  std::string name;
  std::string path;
};

std::vector<NamedChannel> parse_channels_csv(const char* csv) {
  require(csv != nullptr && *csv != '\0', "empty channel list");
  std::vector<NamedChannel> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= item.size()) {
      facekit::raise(facekit::ErrorCode::Usage,
                     "channel entry '" + item + "' is not name=path");
    }
    NamedChannel nc{item.substr(0, eq), item.substr(eq + 1)};
    for (const auto& seen : out) {
      if (seen.name == nc.name) {
        facekit::raise(facekit::ErrorCode::Usage,
                       "duplicate channel '" + nc.name + "'");
      }
    }
    out.push_back(std::move(nc));
  }
  require(!out.empty(), "empty channel list");
  return out;
}

facekit::SvmParams convert_params(const fk_svm_params* p) {
  facekit::SvmParams out;
  if (p != nullptr) {
    out.cost = p->cost;
    out.gamma = p->gamma;
    out.tol = p->tol;
    out.max_iters = p->max_iters;
  }
  return out;
}

facekit::DescriptorConfig convert_config(const fk_descriptor_config* cfg) {
  facekit::DescriptorConfig out;
  if (cfg != nullptr) {
    out.max_distance_bins = cfg->max_distance_bins;
    out.pie_angle_deg = cfg->pie_angle_deg;
    out.grid_rows = cfg->grid_rows;
    out.grid_cols = cfg->grid_cols;
    out.normalize = cfg->normalize != 0;
  }
  return out;
}

// Loads channel files and aligns rows with the manifest record order.
struct AlignedChannels {
  std::vector<std::string> names;
  std::map<std::string, facekit::ChannelData> data;
  std::vector<facekit::LabeledData> labeled;  // per channel
  std::vector<int> labels;
};

AlignedChannels load_aligned(const facekit::DatasetManifest& manifest,
                             const std::vector<NamedChannel>& entries) {
  AlignedChannels out;
  out.labels.reserve(manifest.records.size());
  for (const auto& rec : manifest.records) {
    out.labels.push_back(manifest.class_index(rec.label));
  }
  for (const auto& entry : entries) {
    facekit::ChannelData c = facekit::load_channel(entry.path, entry.name);
    facekit::check_channel_covers(c, manifest);
    std::unordered_map<std::string, const facekit::FeatureVector*> by_id;
    for (const auto& row : c.rows) by_id.emplace(row.image_id, &row);
    facekit::LabeledData data;
    data.class_names = manifest.class_names;
    data.label = out.labels;
    data.x.reserve(manifest.records.size());
    for (const auto& rec : manifest.records) {
      data.x.push_back(by_id.at(rec.id)->values);
    }
    out.names.push_back(entry.name);
    out.labeled.push_back(std::move(data));
    out.data.emplace(entry.name, std::move(c));
  }
  return out;
}

}  // namespace

extern "C" {

const char* fk_status_name(int code) {
  return facekit::error_code_name(static_cast<facekit::ErrorCode>(code));
}

const char* fk_last_error(void) { return g_last_error.c_str(); }

const char* fk_version(void) { return "facekit 1.0.0"; }

const char* fk_format_versions(void) {
  return "fk-annot/1 fk-chan/1 fk-model/1 fk-report/1 fk-scores/1";
}

int fk_manifest_load(const char* path, fk_manifest** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    auto loaded = facekit::load_annotations(path);
    *out = new fk_manifest{std::move(loaded.manifest), std::move(loaded.warnings)};
  });
}

int fk_manifest_save(const fk_manifest* m, const char* path) {
  return guarded([&] {
    require(m != nullptr && path != nullptr, "null argument");
    facekit::save_annotations(m->manifest, path);
  });
}

void fk_manifest_free(fk_manifest* m) { delete m; }

int fk_manifest_record_count(const fk_manifest* m) {
  return m == nullptr ? 0 : static_cast<int>(m->manifest.records.size());
}

int fk_manifest_class_count(const fk_manifest* m) {
  return m == nullptr ? 0 : static_cast<int>(m->manifest.class_names.size());
}

const char* fk_manifest_class_name(const fk_manifest* m, int idx) {
  if (m == nullptr || idx < 0 ||
      idx >= static_cast<int>(m->manifest.class_names.size())) {
    return nullptr;
  }
  return m->manifest.class_names[static_cast<std::size_t>(idx)].c_str();
}

const char* fk_manifest_record_id(const fk_manifest* m, int idx) {
  if (m == nullptr || idx < 0 ||
      idx >= static_cast<int>(m->manifest.records.size())) {
    return nullptr;
  }
  return m->manifest.records[static_cast<std::size_t>(idx)].id.c_str();
}

const char* fk_manifest_record_label(const fk_manifest* m, int idx) {
  if (m == nullptr || idx < 0 ||
      idx >= static_cast<int>(m->manifest.records.size())) {
    return nullptr;
  }
  return m->manifest.records[static_cast<std::size_t>(idx)].label.c_str();
}

int fk_manifest_record_face_count(const fk_manifest* m, int idx) {
  if (m == nullptr || idx < 0 ||
      idx >= static_cast<int>(m->manifest.records.size())) {
    return -1;
  }
  return static_cast<int>(
      m->manifest.records[static_cast<std::size_t>(idx)].faces.size());
}

int fk_manifest_warning_count(const fk_manifest* m) {
  return m == nullptr ? 0 : static_cast<int>(m->warnings.size());
}

const char* fk_manifest_warning(const fk_manifest* m, int idx) {
  if (m == nullptr || idx < 0 || idx >= static_cast<int>(m->warnings.size())) {
    return nullptr;
  }
  return m->warnings[static_cast<std::size_t>(idx)].c_str();
}

double fk_box_iou(double acx, double acy, double aw, double ah, double bcx,
                  double bcy, double bw, double bh) {
  facekit::FaceBox a, b;
  a.cx = acx;
  a.cy = acy;
  a.w = aw;
  a.h = ah;
  b.cx = bcx;
  b.cy = bcy;
  b.w = bw;
  b.h = bh;
  return facekit::iou(a, b);
}

int fk_merge_files(const char* oriented_path, const char* vj_path,
                   double same_region_iou, const char* out_path) {
  return guarded([&] {
    require(oriented_path != nullptr && vj_path != nullptr &&
                out_path != nullptr,
            "null argument");
    facekit::MergeConfig cfg;
    if (same_region_iou > 0.0) cfg.same_region_iou = same_region_iou;
    const auto oriented = facekit::load_annotations(oriented_path);
    const auto vj = facekit::load_annotations(vj_path);
    const auto merged =
        facekit::merge_manifests(oriented.manifest, vj.manifest, cfg);
    facekit::save_annotations(merged, out_path);
  });
}

void fk_descriptor_config_init(fk_descriptor_config* cfg) {
  if (cfg == nullptr) return;
  cfg->max_distance_bins = 5;
  cfg->pie_angle_deg = 60;
  cfg->grid_rows = 1;
  cfg->grid_cols = 3;
  cfg->normalize = 0;
}

int fk_descriptor_dim(const fk_descriptor_config* cfg, const char* name) {
  int dim = -1;
  const int rc = guarded([&] {
    require(name != nullptr, "null descriptor name");
    dim = facekit::descriptor_dim(name, convert_config(cfg));
  });
  return rc == FK_OK ? dim : -1;
}

int fk_manifest_descriptor(const fk_manifest* m, int record_idx,
                           const fk_descriptor_config* cfg, const char* name,
                           double* out, int capacity, int* out_dim) {
  return guarded([&] {
    require(m != nullptr && name != nullptr && out != nullptr, "null argument");
    require(record_idx >= 0 &&
                record_idx < static_cast<int>(m->manifest.records.size()),
            "record index out of range");
    const auto v = facekit::compute_descriptor(
        name, m->manifest.records[static_cast<std::size_t>(record_idx)],
        convert_config(cfg));
    if (static_cast<int>(v.size()) > capacity) {
      facekit::raise(facekit::ErrorCode::Usage, "output buffer too small");
    }
    std::memcpy(out, v.data(), v.size() * sizeof(double));
    if (out_dim != nullptr) *out_dim = static_cast<int>(v.size());
  });
}

int fk_extract_file(const char* annot_path, const fk_descriptor_config* cfg,
                    const char* name, const char* out_path) {
  return guarded([&] {
    require(annot_path != nullptr && out_path != nullptr, "null argument");
    const std::string desc = name == nullptr ? "facedesc" : name;
    const auto loaded = facekit::load_annotations(annot_path);
    const auto channel =
        facekit::extract_channel(loaded.manifest, desc, convert_config(cfg));
    facekit::save_channel(channel, out_path);
  });
}

int fk_channel_load(const char* path, fk_channel** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new fk_channel{facekit::load_channel(path)};
  });
}

void fk_channel_free(fk_channel* c) { delete c; }

int fk_channel_row_count(const fk_channel* c) {
  return c == nullptr ? 0 : static_cast<int>(c->data.rows.size());
}

int fk_channel_dim(const fk_channel* c) {
  return c == nullptr ? 0 : c->data.dim;
}

const char* fk_channel_name(const fk_channel* c) {
  return c == nullptr ? nullptr : c->data.name.c_str();
}

int fk_synth_file(int per_class, uint64_t seed, double pos_jitter,
                  double flip_prob, double dropout, const char* out_path) {
  return guarded([&] {
    require(out_path != nullptr, "null argument");
    auto specs = facekit::default_archetypes();
    for (auto& s : specs) {
      s.noise.pos_jitter = pos_jitter;
      s.noise.flip_prob = flip_prob;
      s.noise.dropout = dropout;
    }
    const auto manifest = facekit::generate(specs, per_class, seed);
    facekit::save_annotations(manifest, out_path);
  });
}

void fk_svm_params_init(fk_svm_params* p) {
  if (p == nullptr) return;
  const facekit::SvmParams d;
  p->cost = d.cost;
  p->gamma = d.gamma;
  p->tol = d.tol;
  p->max_iters = d.max_iters;
}

int fk_train_file(const char* annot_path, const char* channels_csv,
                  const fk_svm_params* params, int with_fusion, uint64_t seed,
                  int threads, const char* model_out) {
  return guarded([&] {
    require(annot_path != nullptr && model_out != nullptr, "null argument");
    const auto entries = parse_channels_csv(channels_csv);
    const auto loaded = facekit::load_annotations(annot_path);
    const auto aligned = load_aligned(loaded.manifest, entries);

    facekit::ModelBundle bundle;
    std::vector<facekit::SvmParams> per_channel_params;
    for (std::size_t ch = 0; ch < aligned.names.size(); ++ch) {
      facekit::SvmParams p;
      if (params != nullptr) {
        p = convert_params(params);
      } else {
        p = facekit::grid_search(aligned.labeled[ch],
                                 facekit::ParamGrid::defaults(),
                                 facekit::SvmParams{},
                                 facekit::derive_seed(seed, {0x6e1dull, ch}),
                                 threads);
      }
      per_channel_params.push_back(p);
      bundle.channel_models.push_back(facekit::train_channel(
          aligned.labeled[ch], aligned.names[ch], p,
          facekit::derive_seed(seed, {0x0175ull, ch}), threads));
    }
    if (with_fusion != 0) {
      std::vector<const facekit::LabeledData*> ptrs;
      for (const auto& d : aligned.labeled) ptrs.push_back(&d);
      const auto rows = facekit::inner_cv_scores(
          ptrs, per_channel_params, 5, facekit::derive_seed(seed, {0xf01dull}),
          threads);
      bundle.fusion = facekit::train_fusion(
          rows, aligned.labels, loaded.manifest.class_names, aligned.names, 1.0,
          facekit::derive_seed(seed, {0xf051ull}), threads);
    }
    facekit::save_model_bundle(bundle, model_out);
  });
}

int fk_predict_file(const char* model_path, const char* annot_path,
                    const char* channels_csv, const char* scores_out) {
  return guarded([&] {
    require(model_path != nullptr && annot_path != nullptr &&
                scores_out != nullptr,
            "null argument");
    const auto bundle = facekit::load_model_bundle(model_path);
    require(!bundle.channel_models.empty(), "model bundle has no channels");
    const auto entries = parse_channels_csv(channels_csv);
    const auto loaded = facekit::load_annotations(annot_path);

    std::map<std::string, const facekit::TrainedChannelModel*> models;
    for (const auto& cm : bundle.channel_models) models[cm.channel] = &cm;
    std::map<std::string, std::unordered_map<std::string, const facekit::FeatureVector*>>
        rows_by_channel;
    std::map<std::string, facekit::ChannelData> channel_storage;
    for (const auto& entry : entries) {
      if (models.find(entry.name) == models.end()) {
        facekit::raise(facekit::ErrorCode::Usage,
                       "model has no channel '" + entry.name + "'");
      }
      facekit::ChannelData c = facekit::load_channel(entry.path, entry.name);
      facekit::check_channel_covers(c, loaded.manifest);
      channel_storage.emplace(entry.name, std::move(c));
    }
    for (const auto& cm : bundle.channel_models) {
      if (channel_storage.find(cm.channel) == channel_storage.end()) {
        facekit::raise(facekit::ErrorCode::Usage,
                       "missing channel file for '" + cm.channel + "'");
      }
      auto& by_id = rows_by_channel[cm.channel];
      for (const auto& row : channel_storage.at(cm.channel).rows) {
        by_id.emplace(row.image_id, &row);
      }
    }

    const auto& class_names = bundle.channel_models.front().class_names;
    std::ostringstream out;
    json header;
    header["format"] = facekit::kScoresFormat;
    header["classes"] = class_names;
    std::vector<std::string> channel_order;
    for (const auto& cm : bundle.channel_models) {
      channel_order.push_back(cm.channel);
    }
    header["channels"] = channel_order;
    out << header.dump() << '\n';

    for (const auto& rec : loaded.manifest.records) {
      json row;
      row["image_id"] = rec.id;
      json per_channel = json::object();
      std::vector<double> fused_input;
      for (const auto& cm : bundle.channel_models) {
        const auto scores = facekit::channel_scores(
            cm, rows_by_channel.at(cm.channel).at(rec.id)->values);
        per_channel[cm.channel] = scores;
        fused_input.insert(fused_input.end(), scores.begin(), scores.end());
      }
      row["channels"] = per_channel;
      if (bundle.fusion) {
        row["fused"] = facekit::fusion_scores(*bundle.fusion, fused_input);
      } else {
        row["fused"] = nullptr;
      }
      out << row.dump() << '\n';
    }
    facekit::atomic_write_text(scores_out, out.str());
  });
}

int fk_eval_file(const char* annot_path, const char* channels_csv, int folds,
                 uint64_t seed, const fk_svm_params* params, int threads,
                 const char* report_out) {
  return guarded([&] {
    require(annot_path != nullptr && report_out != nullptr, "null argument");
    const auto entries = parse_channels_csv(channels_csv);
    const auto loaded = facekit::load_annotations(annot_path);

    std::map<std::string, facekit::ChannelData> channels;
    std::vector<std::string> names;
    for (const auto& entry : entries) {
      channels.emplace(entry.name,
                       facekit::load_channel(entry.path, entry.name));
      names.push_back(entry.name);
    }
    facekit::EvalConfig cfg;
    cfg.folds = folds > 0 ? folds : 5;
    cfg.seed = seed;
    cfg.threads = threads;
    if (params != nullptr) cfg.params = convert_params(params);
    const auto report = facekit::run_cv(loaded.manifest, channels, names, cfg);
    facekit::save_report(report, report_out);
  });
}

int fk_report_load(const char* path, fk_report** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new fk_report{facekit::load_report(path), {}};
  });
}

void fk_report_free(fk_report* r) { delete r; }

int fk_report_map(const fk_report* r, const char* result, double* out) {
  return guarded([&] {
    require(r != nullptr && result != nullptr && out != nullptr,
            "null argument");
    const auto* res = r->report.result_for(result);
    if (res == nullptr) {
      facekit::raise(facekit::ErrorCode::Usage,
                     std::string("no result named '") + result + "'");
    }
    *out = res->map;
  });
}

int fk_report_class_ap(const fk_report* r, const char* result,
                       const char* class_name, double* out) {
  return guarded([&] {
    require(r != nullptr && result != nullptr && class_name != nullptr &&
                out != nullptr,
            "null argument");
    const auto* res = r->report.result_for(result);
    if (res == nullptr) {
      facekit::raise(facekit::ErrorCode::Usage,
                     std::string("no result named '") + result + "'");
    }
    const auto it = res->ap.find(class_name);
    if (it == res->ap.end()) {
      facekit::raise(facekit::ErrorCode::Usage,
                     std::string("no class named '") + class_name + "'");
    }
    *out = it->second;
  });
}

const char* fk_report_text(fk_report* r) {
  if (r == nullptr) return nullptr;
  if (r->rendered.empty()) r->rendered = facekit::render_report(r->report);
  return r->rendered.c_str();
}

}  // extern "C"
