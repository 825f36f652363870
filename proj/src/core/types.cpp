#include "core/types.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "core/errors.hpp"

namespace facekit {

const char* face_source_name(FaceSource s) {
  switch (s) {
    case FaceSource::OrientedDetector: return "oriented-detector";
    case FaceSource::VjFrontal: return "vj-frontal";
    case FaceSource::VjProfile: return "vj-profile";
    case FaceSource::Merged: return "merged";
    case FaceSource::GroundTruth: return "ground-truth";
  }
  return "ground-truth";
}

std::optional<FaceSource> face_source_from_name(const std::string& name) {
  if (name == "oriented-detector") return FaceSource::OrientedDetector;
  if (name == "vj-frontal") return FaceSource::VjFrontal;
  if (name == "vj-profile") return FaceSource::VjProfile;
  if (name == "merged") return FaceSource::Merged;
  if (name == "ground-truth") return FaceSource::GroundTruth;
  return std::nullopt;
}

int snap_orientation(double degrees) {
  double clamped = std::clamp(degrees, -90.0, 90.0);
  return static_cast<int>(std::llround(clamped / kOrientationStep)) *
         kOrientationStep;
}

double iou(const FaceBox& a, const FaceBox& b) {
  const double ax0 = a.cx - a.w / 2.0, ax1 = a.cx + a.w / 2.0;
  const double ay0 = a.cy - a.h / 2.0, ay1 = a.cy + a.h / 2.0;
  const double bx0 = b.cx - b.w / 2.0, bx1 = b.cx + b.w / 2.0;
  const double by0 = b.cy - b.h / 2.0, by1 = b.cy + b.h / 2.0;
  const double iw = std::min(ax1, bx1) - std::max(ax0, bx0);
  const double ih = std::min(ay1, by1) - std::max(ay0, by0);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

int DatasetManifest::class_index(const std::string& label) const {
  for (std::size_t i = 0; i < class_names.size(); ++i) {
    if (class_names[i] == label) return static_cast<int>(i);
  }
  return -1;
}

const ImageRecord* DatasetManifest::find(const std::string& id) const {
  for (const auto& r : records) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

const std::vector<std::string>& default_class_names() {
  static const std::vector<std::string> names = {
      "boxing-punching", "dining",   "handshaking", "highfive", "hugging",
      "kicking",         "kissing",  "partying",    "speech",   "talking"};
  return names;
}

void normalize_and_validate(DatasetManifest& m, bool classes_fixed,
                            std::vector<std::string>* warnings) {
  std::unordered_set<std::string> seen_ids;
  seen_ids.reserve(m.records.size());
  std::unordered_set<std::string> known(m.class_names.begin(),
                                        m.class_names.end());
  for (auto& rec : m.records) {
    if (rec.id.empty()) {
      raise(ErrorCode::Validation, "record with empty id");
    }
    if (!seen_ids.insert(rec.id).second) {
      raise(ErrorCode::Validation, "duplicate image id '" + rec.id + "'");
    }
    if (rec.width <= 0 || rec.height <= 0) {
      raise(ErrorCode::Validation,
            "record '" + rec.id + "': image dimensions must be positive");
    }
    if (rec.label.empty()) {
      raise(ErrorCode::Validation, "record '" + rec.id + "': empty label");
    }
    if (known.find(rec.label) == known.end()) {
      if (classes_fixed) {
        raise(ErrorCode::Validation, "record '" + rec.id + "': unknown label '" +
                                         rec.label + "'");
      }
      known.insert(rec.label);
      m.class_names.push_back(rec.label);
    }
    for (auto& f : rec.faces) {
      if (!(f.w > 0.0) || !(f.h > 0.0) || !std::isfinite(f.w) ||
          !std::isfinite(f.h)) {
        raise(ErrorCode::Validation,
              "record '" + rec.id + "': face size must be positive");
      }
      if (!std::isfinite(f.cx) || !std::isfinite(f.cy)) {
        raise(ErrorCode::Validation,
              "record '" + rec.id + "': non-finite face center");
      }
      const double cx = std::clamp(f.cx, 0.0, static_cast<double>(rec.width));
      const double cy = std::clamp(f.cy, 0.0, static_cast<double>(rec.height));
      if (cx != f.cx || cy != f.cy) {
        if (warnings != nullptr) {
          warnings->push_back("record '" + rec.id +
                              "': face center clamped to image bounds");
        }
        f.cx = cx;
        f.cy = cy;
      }
      if (f.orientation) {
        f.orientation = snap_orientation(static_cast<double>(*f.orientation));
      }
    }
  }
}

void validate_channel(const ChannelData& c) {
  if (c.rows.empty()) return;
  const std::size_t dim = c.dim > 0 ? static_cast<std::size_t>(c.dim)
                                    : c.rows.front().values.size();
  for (const auto& row : c.rows) {
    if (row.values.size() != dim) {
      raise(ErrorCode::Dimension,
            "channel '" + c.name + "': row '" + row.image_id + "' has " +
                std::to_string(row.values.size()) + " values, expected " +
                std::to_string(dim));
    }
    for (double v : row.values) {
      if (!std::isfinite(v)) {
        raise(ErrorCode::Validation, "channel '" + c.name + "': row '" +
                                         row.image_id + "' has non-finite value");
      }
    }
  }
}

void check_channel_covers(const ChannelData& c, const DatasetManifest& m) {
  std::unordered_map<std::string, bool> wanted;
  wanted.reserve(m.records.size());
  for (const auto& r : m.records) wanted.emplace(r.id, false);
  std::string unknown;
  for (const auto& row : c.rows) {
    auto it = wanted.find(row.image_id);
    if (it == wanted.end()) {
      if (!unknown.empty()) unknown += ", ";
      unknown += row.image_id;
    } else {
      it->second = true;
    }
  }
  if (!unknown.empty()) {
    raise(ErrorCode::MissingId,
          "channel '" + c.name + "': unknown image ids: " + unknown);
  }
  std::string missing;
  for (const auto& r : m.records) {
    if (!wanted[r.id]) {
      if (!missing.empty()) missing += ", ";
      missing += r.id;
    }
  }
  if (!missing.empty()) {
    raise(ErrorCode::MissingId,
          "channel '" + c.name + "': missing vectors for image ids: " + missing);
  }
}

}  // namespace facekit
