#include "core/merge.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <unordered_map>

#include "core/errors.hpp"

namespace facekit {

namespace {

int source_rank(FaceSource s) { return static_cast<int>(s); }

// Canonical processing order: larger boxes first, ties broken by full field
// comparison so equal inputs in any order give identical output.
bool canonical_less(const FaceBox& a, const FaceBox& b) {
  const double neg_area_a = -(a.w * a.h);
  const double neg_area_b = -(b.w * b.h);
  const int sa = source_rank(a.source);
  const int sb = source_rank(b.source);
  return std::tie(neg_area_a, a.cx, a.cy, a.w, a.h, a.orientation, a.mirrored,
                  sa) < std::tie(neg_area_b, b.cx, b.cy, b.w, b.h,
                                 b.orientation, b.mirrored, sb);
}

int quantize_to_step(double degrees, int step) {
  return static_cast<int>(std::llround(degrees / step)) * step;
}

void validate_config(const MergeConfig& cfg) {
  if (!(cfg.same_region_iou > 0.0) || cfg.same_region_iou > 1.0) {
    raise(ErrorCode::Usage, "same_region_iou must be in (0, 1]");
  }
  if (cfg.quantization_step <= 0) {
    raise(ErrorCode::Usage, "quantization_step must be positive");
  }
}

}  // namespace

std::vector<FaceBox> merge_detections(const std::vector<FaceBox>& oriented,
                                      const std::vector<FaceBox>& vj,
                                      const MergeConfig& cfg) {
  validate_config(cfg);

  std::vector<FaceBox> ori = oriented;
  std::sort(ori.begin(), ori.end(), canonical_less);

  std::vector<FaceBox> frontal, profile;
  for (const FaceBox& v : vj) {
    bool covered = false;
    for (const FaceBox& o : ori) {
      if (iou(o, v) >= cfg.same_region_iou) {
        covered = true;
        break;
      }
    }
    if (covered) continue;  // oriented detector wins in the same region
    if (v.source == FaceSource::VjProfile) {
      profile.push_back(v);
    } else {
      frontal.push_back(v);
    }
  }
  std::sort(frontal.begin(), frontal.end(), canonical_less);
  std::sort(profile.begin(), profile.end(), canonical_less);

  std::vector<FaceBox> out = ori;
  std::vector<bool> profile_used(profile.size(), false);
  for (const FaceBox& f : frontal) {
    int best = -1;
    double best_iou = 0.0;
    for (std::size_t p = 0; p < profile.size(); ++p) {
      if (profile_used[p]) continue;
      const double ov = iou(f, profile[p]);
      if (ov >= cfg.same_region_iou && ov > best_iou) {
        best = static_cast<int>(p);
        best_iou = ov;
      }
    }
    if (best >= 0) {
      // frontal and profile fired on the same face: the overlap decides how
      // far the face is turned, full overlap reading as frontal
      profile_used[static_cast<std::size_t>(best)] = true;
      const FaceBox& p = profile[static_cast<std::size_t>(best)];
      FaceBox m;
      m.cx = (f.cx + p.cx) / 2.0;
      m.cy = (f.cy + p.cy) / 2.0;
      m.w = (f.w + p.w) / 2.0;
      m.h = (f.h + p.h) / 2.0;
      int angle = quantize_to_step((1.0 - best_iou) * 90.0, cfg.quantization_step);
      m.orientation = p.mirrored ? -angle : angle;
      m.source = FaceSource::Merged;
      m.mirrored = p.mirrored;
      out.push_back(m);
    } else {
      FaceBox kept = f;
      kept.orientation = 0;
      out.push_back(kept);
    }
  }
  for (std::size_t p = 0; p < profile.size(); ++p) {
    if (profile_used[p]) continue;
    FaceBox kept = profile[p];
    kept.orientation = kept.mirrored ? -90 : 90;
    out.push_back(kept);
  }

  // Suppression pass: the combination rules above can still leave overlapping
  // pairs (e.g. two oriented detections), and the output contract is that no
  // two boxes share a region.
  std::sort(out.begin(), out.end(), canonical_less);
  std::vector<FaceBox> kept;
  kept.reserve(out.size());
  for (const FaceBox& b : out) {
    bool suppressed = false;
    for (const FaceBox& k : kept) {
      if (iou(b, k) >= cfg.same_region_iou) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(b);
  }
  return kept;
}

DatasetManifest merge_manifests(const DatasetManifest& oriented,
                                const DatasetManifest& vj,
                                const MergeConfig& cfg) {
  validate_config(cfg);
  for (const auto& rec : oriented.records) {
    for (const auto& f : rec.faces) {
      if (!f.orientation) {
        raise(ErrorCode::Validation,
              "record '" + rec.id +
                  "': oriented-detector face without orientation");
      }
    }
  }
  std::unordered_map<std::string, const ImageRecord*> vj_by_id;
  for (const auto& rec : vj.records) {
    for (const auto& f : rec.faces) {
      if (f.source != FaceSource::VjFrontal &&
          f.source != FaceSource::VjProfile) {
        raise(ErrorCode::Validation,
              "record '" + rec.id + "': cascade face with source '" +
                  face_source_name(f.source) + "' (expected vj-frontal/vj-profile)");
      }
      if (f.orientation) {
        raise(ErrorCode::Validation,
              "record '" + rec.id + "': cascade face must not carry orientation");
      }
    }
    vj_by_id.emplace(rec.id, &rec);
  }

  DatasetManifest out;
  out.class_names = oriented.class_names;
  static const std::vector<FaceBox> no_faces;
  for (const auto& rec : oriented.records) {
    auto it = vj_by_id.find(rec.id);
    const std::vector<FaceBox>* vj_faces = &no_faces;
    if (it != vj_by_id.end()) {
      if (it->second->width != rec.width || it->second->height != rec.height) {
        raise(ErrorCode::Validation,
              "record '" + rec.id + "': image dimensions differ between inputs");
      }
      vj_faces = &it->second->faces;
      vj_by_id.erase(it);
    }
    ImageRecord merged = rec;
    merged.faces = merge_detections(rec.faces, *vj_faces, cfg);
    out.records.push_back(std::move(merged));
  }
  for (const auto& rec : vj.records) {
    if (vj_by_id.find(rec.id) == vj_by_id.end()) continue;  // already merged
    ImageRecord merged = rec;
    merged.faces = merge_detections({}, rec.faces, cfg);
    out.records.push_back(std::move(merged));
  }
  normalize_and_validate(out, false, nullptr);
  return out;
}

}  // namespace facekit
